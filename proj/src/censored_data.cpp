#include "weibayes/censored_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>

#include "weibayes/errors.hpp"

namespace weibayes {

CensoredSample::CensoredSample(std::vector<double> times, std::vector<Status> status)
    : times_(std::move(times)), status_(std::move(status)) {
  if (times_.size() != status_.size()) {
    throw InputError("censored sample: times and status lengths differ");
  }
  sorted_log_times_.reserve(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw InputError("censored sample: times must be positive and finite");
    }
    const double log_t = std::log(t);
    sorted_log_times_.push_back(log_t);
    if (status_[i] == Status::kFailed) {
      ++failures_;
      log_P_ += log_t;
    }
  }
  std::sort(sorted_log_times_.begin(), sorted_log_times_.end());
}

CensoredSample CensoredSample::complete(std::vector<double> times) {
  std::vector<Status> status(times.size(), Status::kFailed);
  return {std::move(times), std::move(status)};
}

std::vector<std::size_t> CensoredSample::failed_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < status_.size(); ++i) {
    if (status_[i] == Status::kFailed) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> CensoredSample::censored_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < status_.size(); ++i) {
    if (status_[i] == Status::kCensored) out.push_back(i);
  }
  return out;
}

bool CensoredSample::is_type2_canonical() const {
  double largest_failure = 0.0;
  double smallest_censored = INFINITY;
  double largest_censored = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (status_[i] == Status::kFailed) {
      largest_failure = std::max(largest_failure, times_[i]);
    } else {
      smallest_censored = std::min(smallest_censored, times_[i]);
      largest_censored = std::max(largest_censored, times_[i]);
    }
  }
  if (failures_ == times_.size()) return true;
  if (failures_ == 0) return false;
  return smallest_censored == largest_failure && largest_censored == largest_failure;
}

CensoredSample CensoredSample::scaled(double c) const {
  if (!(c > 0.0)) {
    throw InputError("scale factor must be positive");
  }
  std::vector<double> times = times_;
  for (double& t : times) t *= c;
  return {std::move(times), status_};
}

CensoredSample type2_censor(std::span<const double> complete, std::size_t r) {
  if (r < 1 || r > complete.size()) {
    throw InputError("type-II censoring requires 1 <= r <= n");
  }
  std::vector<double> times(complete.begin(), complete.end());
  for (double t : times) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw InputError("type-II censoring: lifetimes must be positive and finite");
    }
  }
  std::sort(times.begin(), times.end());
  std::vector<Status> status(times.size(), Status::kFailed);
  const double stop = times[r - 1];
  for (std::size_t i = r; i < times.size(); ++i) {
    times[i] = stop;
    status[i] = Status::kCensored;
  }
  return {std::move(times), std::move(status)};
}

double s_of_beta(const CensoredSample& s, double beta) {
  // ascending order keeps the small terms from being absorbed early
  double sum = 0.0;
  for (double log_t : s.sorted_log_times()) {
    sum += std::exp(beta * log_t);
  }
  return sum;
}

double log_s_of_beta(const CensoredSample& s, double beta) {
  const auto logs = s.sorted_log_times();
  if (logs.empty()) {
    return -INFINITY;
  }
  const double peak = beta * logs.back();
  double acc = 0.0;
  for (double log_t : logs) {
    acc += std::exp(beta * log_t - peak);
  }
  return peak + std::log(acc);
}

double log_likelihood(const CensoredSample& s, const ReliableLifeWeibull& p) {
  const double K = p.K();
  const double beta = p.beta();
  const double log_xR = std::log(p.x_R());
  const auto r = static_cast<double>(s.r());
  double value = (beta - 1.0) * s.log_P();
  if (s.r() > 0) {
    value += r * (std::log(K * beta) - beta * log_xR);
  }
  if (!s.empty()) {
    value -= K * std::exp(log_s_of_beta(s, beta) - beta * log_xR);
  }
  return value;
}

namespace {

std::string_view trim(std::string_view v) {
  const auto first = v.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = v.find_last_not_of(" \t\r");
  return v.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail_at(std::size_t line_no, const std::string& msg) {
  throw InputError("sample CSV line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

CensoredSample read_sample_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t time_col = 0;
  std::size_t status_col = 0;
  std::size_t columns = 0;
  bool have_header = false;
  std::vector<double> times;
  std::vector<Status> status;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (!have_header) {
      bool found_time = false;
      bool found_status = false;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "time") {
          time_col = i;
          found_time = true;
        } else if (fields[i] == "status") {
          status_col = i;
          found_status = true;
        }
      }
      if (!found_time || !found_status) {
        fail_at(line_no, "header must name the columns 'time' and 'status'");
      }
      columns = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != columns) {
      fail_at(line_no, "expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(fields.size()));
    }
    const auto text = fields[time_col];
    double t = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail_at(line_no, "time '" + std::string(text) + "' is not a number");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
      fail_at(line_no, "time must be positive");
    }
    const auto st = fields[status_col];
    if (st == "failed") {
      status.push_back(Status::kFailed);
    } else if (st == "censored") {
      status.push_back(Status::kCensored);
    } else {
      fail_at(line_no, "unknown status '" + std::string(st) + "' (expected failed or censored)");
    }
    times.push_back(t);
  }
  if (!have_header) {
    throw InputError("sample CSV: missing header");
  }
  return {std::move(times), std::move(status)};
}

}  // namespace weibayes
