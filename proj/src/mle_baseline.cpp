#include "weibayes/mle_baseline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "weibayes/errors.hpp"
#include "weibayes/parallel.hpp"
#include "weibayes/weibull_model.hpp"

namespace weibayes {

namespace {

// Stream-path tag so calibration draws never coincide with harness draws.
constexpr std::uint64_t kCalibrationStream = 0xB0;

void require_admissible(const CensoredSample& s) {
  if (s.r() < 2) {
    throw NoFiniteMle("no finite MLE: at least two failures are needed (r = " +
                      std::to_string(s.r()) + ")");
  }
  const auto times = s.times();
  const auto status = s.status();
  double first = -1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (status[i] != Status::kFailed) continue;
    if (first < 0.0) {
      first = times[i];
    } else if (times[i] != first) {
      return;
    }
  }
  throw NoFiniteMle("no finite MLE: all failure times are equal");
}

struct Profile {
  double value;
  double slope;
};

// g(beta) and g'(beta) = -1/beta^2 - Var_w(ln x) with weights x^beta.
Profile profile_at(double beta, const CensoredSample& s) {
  const auto logs = s.sorted_log_times();
  const double top = logs.back();
  double sum_w = 0.0;
  double sum_wl = 0.0;
  double sum_wll = 0.0;
  for (double l : logs) {
    const double d = l - top;
    const double w = std::exp(beta * d);
    sum_w += w;
    sum_wl += w * d;
    sum_wll += w * d * d;
  }
  const double mean_d = sum_wl / sum_w;
  const double var = std::max(0.0, sum_wll / sum_w - mean_d * mean_d);
  const double mean_log_failures = s.log_P() / static_cast<double>(s.r());
  return {mean_log_failures - top + 1.0 / beta - mean_d, -1.0 / (beta * beta) - var};
}

}  // namespace

double profile_equation(double beta, const CensoredSample& s) {
  if (!(beta > 0.0)) {
    throw InputError("profile equation: beta must be positive");
  }
  require_admissible(s);
  return profile_at(beta, s).value;
}

MleResult fit(const CensoredSample& s, double R) {
  require_admissible(s);
  const double K = log_inverse_reliability(R);

  double lo = 1e-3;
  double hi = 1e2;
  int iterations = 0;
  while (profile_at(lo, s).value <= 0.0) {
    lo *= 0.1;
    if (lo < 1e-12) throw NoFiniteMle("no finite MLE: profile score has no positive side");
  }
  while (profile_at(hi, s).value > 0.0) {
    hi *= 10.0;
    ++iterations;
    if (hi > 1e6) {
      throw NoFiniteMle("no finite MLE: profile score stays positive up to beta = 1e6");
    }
  }

  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (profile_at(mid, s).value > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }

  double beta = 0.5 * (lo + hi);
  auto current = profile_at(beta, s);
  for (int step = 0; step < 5 && current.value != 0.0; ++step) {
    const double candidate = beta - current.value / current.slope;
    if (!(candidate >= lo && candidate <= hi)) break;
    const auto next = profile_at(candidate, s);
    if (!(std::abs(next.value) < std::abs(current.value))) break;
    beta = candidate;
    current = next;
    ++iterations;
  }

  const double log_alpha =
      (log_s_of_beta(s, beta) - std::log(static_cast<double>(s.r()))) / beta;
  const double alpha = std::exp(log_alpha);
  return {alpha, beta, alpha * std::pow(K, 1.0 / beta), iterations,
          std::abs(current.value) < kProfileTolerance};
}

UnbiasingEntry calibrate_B(std::size_t n, std::size_t r, std::size_t replications,
                           std::uint64_t seed, double generating_beta, std::size_t threads) {
  if (r < 2 || r > n) {
    throw InputError("B calibration needs 2 <= r <= n");
  }
  if (replications < 10000) {
    throw InputError("B calibration needs at least 10^4 replications");
  }
  const auto model = to_reliable_life(ShapeScaleWeibull(1.0, generating_beta), 0.5);

  std::vector<double> ratio(replications, NAN);
  parallel_for(replications, threads, [&](std::size_t rep) {
    auto stream = CounterStream::derive(seed, {kCalibrationStream, n, r, rep});
    const auto draws = sample(model, n, stream);
    try {
      const auto result = fit(type2_censor(draws, r), 0.5);
      if (result.converged) ratio[rep] = result.beta_hat / generating_beta;
    } catch (const NoFiniteMle&) {
    }
  });

  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t used = 0;
  for (double v : ratio) {
    if (std::isnan(v)) continue;
    sum += v;
    sum_sq += v * v;
    ++used;
  }
  if (used < 2) {
    throw NoFiniteMle("B calibration: fewer than two usable replications");
  }
  const double mean = sum / static_cast<double>(used);
  const double var = (sum_sq - static_cast<double>(used) * mean * mean) /
                     static_cast<double>(used - 1);
  const double se_mean = std::sqrt(std::max(0.0, var) / static_cast<double>(used));
  return {n, r, 1.0 / mean, replications, se_mean / (mean * mean), seed,
          replications - used};
}

double unbiased_beta(double beta_hat, const UnbiasingEntry& entry, std::size_t n,
                     std::size_t r) {
  if (!(beta_hat > 0.0)) {
    throw InputError("beta_hat must be positive");
  }
  if (entry.n != n || entry.r != r) {
    throw InputError("unbiasing factor was calibrated for (n, r) = (" + std::to_string(entry.n) +
                     ", " + std::to_string(entry.r) + "), not (" + std::to_string(n) + ", " +
                     std::to_string(r) + ")");
  }
  return entry.B * beta_hat;
}

nlohmann::json to_json(const MleResult& m) {
  return {{"alpha_hat", m.alpha_hat},
          {"beta_hat", m.beta_hat},
          {"x_R_hat", m.x_R_hat},
          {"iterations", m.iterations},
          {"converged", m.converged}};
}

std::string calibration_csv_header() { return "n,r,B,replications,std_error,seed"; }

std::string calibration_csv_row(const UnbiasingEntry& e) {
  std::ostringstream os;
  os.precision(17);
  os << e.n << ',' << e.r << ',' << e.B << ',' << e.replications << ',' << e.std_error << ','
     << e.seed;
  return os.str();
}

CalibrationCache::CalibrationCache(std::string path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) load(path_);
}

std::optional<UnbiasingEntry> CalibrationCache::find(std::size_t n, std::size_t r,
                                                     std::size_t replications,
                                                     std::uint64_t seed) const {
  for (const auto& e : entries_) {
    if (e.n == n && e.r == r && e.replications == replications && e.seed == seed) return e;
  }
  return std::nullopt;
}

void CalibrationCache::insert(const UnbiasingEntry& entry) {
  for (auto& e : entries_) {
    if (e.n == entry.n && e.r == entry.r && e.replications == entry.replications &&
        e.seed == entry.seed) {
      e = entry;
      return;
    }
  }
  entries_.push_back(entry);
}

UnbiasingEntry CalibrationCache::get_or_calibrate(std::size_t n, std::size_t r,
                                                  std::size_t replications, std::uint64_t seed,
                                                  std::size_t threads) {
  if (auto hit = find(n, r, replications, seed)) return *hit;
  const auto entry = calibrate_B(n, r, replications, seed, 1.0, threads);
  insert(entry);
  if (!path_.empty()) save(path_);
  return entry;
}

void CalibrationCache::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open calibration cache '" + path + "'");
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("n,", 0) == 0) continue;
    std::istringstream row(line);
    UnbiasingEntry e{};
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
    row >> e.n >> c1 >> e.r >> c2 >> e.B >> c3 >> e.replications >> c4 >> e.std_error >> c5 >>
        e.seed;
    if (!row || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
      throw InputError("calibration cache line " + std::to_string(line_no) + " is malformed");
    }
    insert(e);
  }
}

void CalibrationCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write calibration cache '" + path + "'");
  }
  out << calibration_csv_header() << '\n';
  for (const auto& e : entries_) out << calibration_csv_row(e) << '\n';
}

}  // namespace weibayes
