#include "weibayes/simulation_harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "weibayes/errors.hpp"
#include "weibayes/parallel.hpp"
#include "weibayes/random.hpp"
#include "weibayes/weibull_model.hpp"

namespace weibayes::sim {

namespace {

constexpr std::uint64_t kSampleStream = 0x5A;

constexpr std::array<const char*, 9> kCaseNames = {"I",  "II",  "III",  "IV", "V",
                                                   "VI", "VII", "VIII", "IX"};

std::string number_text(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse number in " + context);
  }
  if (used != text.size()) {
    throw InputError("cannot parse number in " + context);
  }
  return v;
}

std::string full_precision(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<double> draw_lifetimes(const ReliableLifeWeibull& model, std::size_t n, std::size_t r,
                                   std::uint64_t seed, std::size_t rep) {
  auto stream = CounterStream::derive(seed, {kSampleStream, n, r, rep});
  return sample(model, n, stream);
}

}  // namespace

CaseLabel parse_case(const std::string& label) {
  for (std::size_t i = 0; i < kCaseNames.size(); ++i) {
    if (label == kCaseNames[i]) return static_cast<CaseLabel>(i + 1);
  }
  throw InputError("unknown prior case '" + label + "' (expected I..IX)");
}

std::string to_string(CaseLabel label) { return kCaseNames[static_cast<std::size_t>(label) - 1]; }

std::optional<IntervalTable> paper_intervals(double true_beta) {
  if (true_beta == 2.0) {
    return IntervalTable{BetaInterval(1.0, 3.0), BetaInterval(2.0, 4.0), BetaInterval(0.5, 2.0)};
  }
  if (true_beta == 1.0) {
    return IntervalTable{BetaInterval(0.7, 1.3), BetaInterval(1.0, 1.3), BetaInterval(0.7, 1.0)};
  }
  if (true_beta == 0.6) {
    return IntervalTable{BetaInterval(0.3, 0.9), BetaInterval(0.6, 0.9), BetaInterval(0.3, 0.6)};
  }
  return std::nullopt;
}

CaseDefinition build_case(CaseLabel label, double true_beta, double true_x_R,
                          const std::optional<IntervalTable>& intervals) {
  const auto table = intervals ? intervals : paper_intervals(true_beta);
  if (!table) {
    throw InputError("no built-in prior intervals for true beta = " + number_text(true_beta) +
                     "; supply intervals explicitly");
  }
  const auto index = static_cast<std::size_t>(label) - 1;
  if (index >= kCaseNames.size()) {
    throw InputError("unknown prior case");
  }
  constexpr std::array<double, 3> kXbarFactor = {1.0, 10.0, 0.1};
  return {label, (*table)[index / 3], kXbarFactor[index % 3] * true_x_R};
}

WSetting WSetting::parse(const std::string& label) {
  if (label == "unit") return {Kind::kUnit, 1.0};
  if (label == "piecewise96") return {Kind::kPiecewise96, 0.0};
  const std::string lower_prefix = "1/beta1+";
  if (label.rfind(lower_prefix, 0) == 0) {
    return {Kind::kInverseLowerPlus, parse_number(label.substr(lower_prefix.size()), label)};
  }
  const std::string over_suffix = "/beta";
  if (label.size() > over_suffix.size() &&
      label.compare(label.size() - over_suffix.size(), over_suffix.size(), over_suffix) == 0) {
    const double c = parse_number(label.substr(0, label.size() - over_suffix.size()), label);
    if (!(c > 0.0)) throw InputError("w setting '" + label + "' needs a positive constant");
    return {Kind::kConstantOverBeta, c};
  }
  const double v = parse_number(label, "w setting '" + label + "'");
  if (!(v > 0.0)) throw InputError("w setting '" + label + "' must be positive");
  return {Kind::kFixed, v};
}

WRule WSetting::resolve(const BetaInterval& iv) const {
  switch (kind_) {
    case Kind::kConstantOverBeta:
      return WRule::constant_over_beta(value_);
    case Kind::kInverseLowerPlus:
      return WRule::fixed(1.0 / iv.beta1() + value_);
    case Kind::kFixed:
      return WRule::fixed(value_);
    case Kind::kUnit:
      return WRule::unit();
    case Kind::kPiecewise96:
      return WRule::piecewise96();
  }
  return WRule::unit();
}

std::string WSetting::label() const {
  switch (kind_) {
    case Kind::kConstantOverBeta:
      return number_text(value_) + "/beta";
    case Kind::kInverseLowerPlus:
      return "1/beta1+" + number_text(value_);
    case Kind::kFixed:
      return number_text(value_);
    case Kind::kUnit:
      return "unit";
    case Kind::kPiecewise96:
      return "piecewise96";
  }
  return {};
}

std::vector<WSetting> paper_w_settings() {
  return {WSetting::constant_over_beta(1.1), WSetting::constant_over_beta(1.4),
          WSetting::constant_over_beta(1.8), WSetting::inverse_lower_plus(0.1)};
}

void ExperimentConfig::validate() const {
  if (!(true_beta > 0.0) || !(true_x_R > 0.0)) {
    throw InputError("experiment: true beta and x_R must be positive");
  }
  log_inverse_reliability(R);
  if (n == 0 || r == 0 || r > n) {
    throw InputError("experiment: need 1 <= r <= n");
  }
  if (replications == 0) {
    throw InputError("experiment: replications must be at least 1");
  }
  quadrature.validate();
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw InputError("experiment config must be a JSON object");
  }
  ExperimentConfig cfg;
  try {
    cfg.true_beta = j.at("true_beta").get<double>();
    cfg.true_x_R = j.value("true_x_R", 1.0);
    cfg.R = j.value("R", 0.98);
    cfg.n = j.at("n").get<std::size_t>();
    cfg.r = j.value("r", cfg.n);
    cfg.replications = j.value("replications", std::size_t{2000});
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.threads = j.value("threads", std::size_t{0});
    if (j.contains("prior_cases")) {
      cfg.prior_cases.clear();
      for (const auto& c : j["prior_cases"]) cfg.prior_cases.push_back(parse_case(c.get<std::string>()));
    }
    if (j.contains("w_rules")) {
      cfg.w_settings.clear();
      for (const auto& w : j["w_rules"]) cfg.w_settings.push_back(WSetting::parse(w.get<std::string>()));
    }
    if (j.contains("intervals")) {
      const auto& iv = j["intervals"];
      auto read = [&](const char* key) {
        const auto& pair = iv.at(key);
        return BetaInterval(pair.at(0).get<double>(), pair.at(1).get<double>());
      };
      cfg.intervals = IntervalTable{read("1"), read("2"), read("3")};
    }
    if (j.contains("rel_tol")) cfg.quadrature.rel_tol = j["rel_tol"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PerformanceMetrics metrics(std::span<const double> estimates, double true_value) {
  if (estimates.empty()) {
    throw InputError("metrics: no estimates");
  }
  const auto count = static_cast<double>(estimates.size());
  double sum = 0.0;
  for (double v : estimates) sum += v;
  const double mean = sum / count;
  double ss = 0.0;
  for (double v : estimates) ss += (v - mean) * (v - mean);
  PerformanceMetrics m;
  m.bias = mean - true_value;
  m.std_dev = std::sqrt(ss / count);
  m.rmse = std::sqrt(m.std_dev * m.std_dev + m.bias * m.bias);
  m.count = estimates.size();
  return m;
}

CellResult run_cell(const ExperimentConfig& cfg, const CaseDefinition& case_def,
                    const WSetting& setting) {
  cfg.validate();
  // throws ConstraintViolation with the offending beta before any sampling
  const PriorSpec spec(case_def.interval, case_def.xbar_R, cfg.R, setting.resolve(case_def.interval));
  const ReliableLifeWeibull truth(cfg.true_x_R, cfg.true_beta, cfg.R);

  std::vector<double> x_est(cfg.replications, NAN);
  std::vector<double> b_est(cfg.replications, NAN);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t rep) {
    const auto data = type2_censor(draw_lifetimes(truth, cfg.n, cfg.r, cfg.seed, rep), cfg.r);
    const auto est = estimate(spec, data, cfg.quadrature);
    if (est.converged && std::isfinite(est.x_R_tilde) && std::isfinite(est.beta_tilde)) {
      x_est[rep] = est.x_R_tilde;
      b_est[rep] = est.beta_tilde;
    }
  });

  std::vector<double> xs;
  std::vector<double> bs;
  for (std::size_t i = 0; i < cfg.replications; ++i) {
    if (std::isnan(x_est[i])) continue;
    xs.push_back(x_est[i]);
    bs.push_back(b_est[i]);
  }
  const std::size_t failures = cfg.replications - xs.size();
  if (xs.empty()) {
    throw std::runtime_error("cell " + to_string(case_def.label) + " / " + setting.label() +
                             ": every replication failed to converge");
  }
  CellResult cell{case_def.label, setting.label(), metrics(xs, cfg.true_x_R),
                  metrics(bs, cfg.true_beta)};
  cell.x_R.failures = failures;
  cell.beta.failures = failures;
  return cell;
}

std::vector<CellResult> run_experiment(const ExperimentConfig& cfg) {
  std::vector<CellResult> out;
  for (CaseLabel label : cfg.prior_cases) {
    const auto case_def = build_case(label, cfg.true_beta, cfg.true_x_R, cfg.intervals);
    for (const auto& setting : cfg.w_settings) {
      out.push_back(run_cell(cfg, case_def, setting));
    }
  }
  return out;
}

MleRow run_mle_row(double true_beta, std::size_t n, std::size_t r, double R,
                   std::size_t replications, std::uint64_t seed, const MleRowOptions& options) {
  if (r < 2 || r > n) {
    throw InputError("MLE row needs 2 <= r <= n");
  }
  if (replications == 0) {
    throw InputError("MLE row needs at least one replication");
  }
  const ReliableLifeWeibull truth(1.0, true_beta, R);

  std::vector<double> x_est(replications, NAN);
  std::vector<double> b_est(replications, NAN);
  parallel_for(replications, options.threads, [&](std::size_t rep) {
    const auto data = type2_censor(draw_lifetimes(truth, n, r, seed, rep), r);
    try {
      const auto result = fit(data, R);
      if (result.converged) {
        x_est[rep] = result.x_R_hat;
        b_est[rep] = result.beta_hat;
      }
    } catch (const NoFiniteMle&) {
    }
  });

  std::vector<double> xs;
  std::vector<double> bs;
  for (std::size_t i = 0; i < replications; ++i) {
    if (std::isnan(x_est[i])) continue;
    xs.push_back(x_est[i]);
    bs.push_back(b_est[i]);
  }
  if (xs.empty()) {
    throw NoFiniteMle("MLE row: no replication produced a finite estimate");
  }

  const std::uint64_t cal_seed = options.calibration_seed.value_or(seed);
  const auto calibration =
      options.cache
          ? options.cache->get_or_calibrate(n, r, options.calibration_replications, cal_seed,
                                            options.threads)
          : calibrate_B(n, r, options.calibration_replications, cal_seed, 1.0, options.threads);

  std::vector<double> unbiased;
  unbiased.reserve(bs.size());
  for (double b : bs) unbiased.push_back(unbiased_beta(b, calibration, n, r));

  MleRow row{n, r, metrics(xs, 1.0), metrics(bs, true_beta), metrics(unbiased, true_beta).std_dev,
             calibration};
  row.x_R.failures = replications - xs.size();
  row.beta.failures = row.x_R.failures;
  return row;
}

TableDesign table_design(const std::string& id) {
  static const std::vector<std::pair<std::size_t, std::size_t>> kComplete = {
      {3, 3}, {5, 5}, {7, 7}, {10, 10}, {15, 15}, {22, 22}, {30, 30}};
  static const std::vector<std::pair<std::size_t, std::size_t>> kCensored = {
      {5, 3}, {10, 4}, {10, 6}, {20, 8}, {20, 12}, {40, 16}, {40, 24}};
  if (id == "3") return {id, true, 2.0, {{3, 3}}};
  if (id == "4") return {id, true, 1.0, {{3, 3}}};
  if (id == "5") return {id, true, 0.6, {{3, 3}}};
  if (id == "6") return {id, true, 2.0, {{5, 3}}};
  if (id == "7") return {id, true, 1.0, {{5, 3}}};
  if (id == "8") return {id, true, 0.6, {{5, 3}}};
  if (id == "3b") return {id, false, 2.0, kComplete};
  if (id == "4b") return {id, false, 1.0, kComplete};
  if (id == "5b") return {id, false, 0.6, kComplete};
  if (id == "6b") return {id, false, 2.0, kCensored};
  if (id == "7b") return {id, false, 1.0, kCensored};
  if (id == "8b") return {id, false, 0.6, kCensored};
  throw InputError("unknown table id '" + id + "' (expected 3..8 or 3b..8b)");
}

TableResult reproduce_table(const std::string& id, std::size_t replications, std::uint64_t seed,
                            const MleRowOptions& mle_options, std::size_t threads) {
  TableResult result{table_design(id), {}, {}};
  const auto& design = result.design;
  if (design.bayes) {
    ExperimentConfig cfg;
    cfg.true_beta = design.true_beta;
    cfg.n = design.designs.front().first;
    cfg.r = design.designs.front().second;
    cfg.replications = replications;
    cfg.seed = seed;
    cfg.threads = threads;
    result.cells = run_experiment(cfg);
  } else {
    MleRowOptions options = mle_options;
    if (options.threads == 0) options.threads = threads;
    for (const auto& [n, r] : design.designs) {
      result.mle_rows.push_back(
          run_mle_row(design.true_beta, n, r, 0.98, replications, seed, options));
    }
  }
  return result;
}

std::string paper_format(double value) {
  if (value == 0.0) return ".00E+00";
  if (!std::isfinite(value)) return full_precision(value);
  const bool negative = value < 0.0;
  const double magnitude = std::abs(value);
  int exponent = static_cast<int>(std::floor(std::log10(magnitude))) + 1;
  long digits = std::lround(magnitude / std::pow(10.0, exponent) * 100.0);
  if (digits >= 100) {
    digits = 10;
    ++exponent;
  } else if (digits < 10) {
    // log10 rounding put the mantissa just below 0.1
    --exponent;
    digits = std::lround(magnitude / std::pow(10.0, exponent) * 100.0);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s.%02ldE%c%02d", negative ? "-" : "", digits,
                exponent < 0 ? '-' : '+', std::abs(exponent));
  return buf;
}

namespace {

std::string fmt(double v, bool paper_style) { return paper_style ? paper_format(v) : full_precision(v); }

}  // namespace

void write_table_csv(std::ostream& out, const TableResult& table, bool paper_style) {
  if (table.design.bayes) {
    const auto settings = paper_w_settings();
    out << "test";
    for (const auto& s : settings) out << ",RQ_xR[w=" << s.label() << "]";
    for (const auto& s : settings) out << ",RQ_beta[w=" << s.label() << "]";
    out << ",failures\n";
    const std::size_t width = settings.size();
    for (std::size_t row = 0; row * width < table.cells.size(); ++row) {
      const auto* cells = &table.cells[row * width];
      std::size_t failures = 0;
      out << to_string(cells[0].label);
      for (std::size_t k = 0; k < width; ++k) out << ',' << fmt(cells[k].x_R.rmse, paper_style);
      for (std::size_t k = 0; k < width; ++k) {
        out << ',' << fmt(cells[k].beta.rmse, paper_style);
        failures += cells[k].x_R.failures;
      }
      out << ',' << failures << '\n';
    }
  } else {
    out << "n,r,RQ_xR,RQ_beta,DS_beta_bar,B,failures\n";
    for (const auto& row : table.mle_rows) {
      out << row.n << ',' << row.r << ',' << fmt(row.x_R.rmse, paper_style) << ','
          << fmt(row.beta.rmse, paper_style) << ',' << fmt(row.ds_beta_bar, paper_style) << ','
          << fmt(row.calibration.B, paper_style) << ',' << row.x_R.failures << '\n';
    }
  }
}

void write_cells_csv(std::ostream& out, const ExperimentConfig& cfg,
                     std::span<const CellResult> cells, bool paper_style) {
  out << "case,w_rule,n,r,true_beta,bias_xR,DS_xR,RQ_xR,bias_beta,DS_beta,RQ_beta,count,failures\n";
  for (const auto& c : cells) {
    out << to_string(c.label) << ',' << c.w_label << ',' << cfg.n << ',' << cfg.r << ','
        << full_precision(cfg.true_beta) << ',' << fmt(c.x_R.bias, paper_style) << ','
        << fmt(c.x_R.std_dev, paper_style) << ',' << fmt(c.x_R.rmse, paper_style) << ','
        << fmt(c.beta.bias, paper_style) << ',' << fmt(c.beta.std_dev, paper_style) << ','
        << fmt(c.beta.rmse, paper_style) << ',' << c.x_R.count << ',' << c.x_R.failures << '\n';
  }
}

}  // namespace weibayes::sim
