#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "weibayes/weibull_model.hpp"

namespace weibayes {

enum class Status { kFailed, kCensored };

/// Right-censored lifetimes. Any censoring pattern is accepted; `type2_censor`
/// builds the canonical type-II form (r smallest failures, the rest censored
/// at the r-th order statistic).
class CensoredSample {
 public:
  CensoredSample() = default;
  CensoredSample(std::vector<double> times, std::vector<Status> status);

  /// All items failed.
  static CensoredSample complete(std::vector<double> times);

  std::size_t n() const noexcept { return times_.size(); }
  std::size_t r() const noexcept { return failures_; }
  bool empty() const noexcept { return times_.empty(); }

  std::span<const double> times() const noexcept { return times_; }
  std::span<const Status> status() const noexcept { return status_; }

  /// Indices of failed (D) and censored (C) items.
  std::vector<std::size_t> failed_indices() const;
  std::vector<std::size_t> censored_indices() const;

  /// ln x_i over every item, sorted ascending.
  std::span<const double> sorted_log_times() const noexcept { return sorted_log_times_; }

  /// ln P = sum of ln x_i over failed items.
  double log_P() const noexcept { return log_P_; }

  /// True when failures are the r smallest values and every censored time
  /// equals the largest failure.
  bool is_type2_canonical() const;

  /// Multiply every time by c > 0.
  CensoredSample scaled(double c) const;

 private:
  std::vector<double> times_;
  std::vector<Status> status_;
  std::vector<double> sorted_log_times_;
  std::size_t failures_ = 0;
  double log_P_ = 0.0;
};

/// Sort, keep the r smallest as failures, censor the rest at the r-th value.
CensoredSample type2_censor(std::span<const double> complete, std::size_t r);

/// S(beta) = sum over all items of x_i^beta.
double s_of_beta(const CensoredSample& s, double beta);

/// ln S(beta), evaluated by log-sum-exp so it stays finite for any time scale.
double log_s_of_beta(const CensoredSample& s, double beta);

/// Log of the censored likelihood, constants included:
/// r ln(K beta / x_R^beta) + (beta - 1) ln P - K S(beta) / x_R^beta.
double log_likelihood(const CensoredSample& s, const ReliableLifeWeibull& p);

/// Parse a `time,status` CSV (header required). Throws InputError naming the
/// offending line on nonpositive times or unknown status values.
CensoredSample read_sample_csv(std::istream& in);

}  // namespace weibayes
