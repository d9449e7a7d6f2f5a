#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "weibayes/censored_data.hpp"

namespace weibayes {

struct MleResult {
  double alpha_hat;
  double beta_hat;
  double x_R_hat;
  int iterations;
  bool converged;
};

/// Monte Carlo estimate of B_{n,r} = 1 / E[beta^ / beta].
struct UnbiasingEntry {
  std::size_t n;
  std::size_t r;
  double B;
  std::size_t replications;
  double std_error;  ///< delta-method standard error of B
  std::uint64_t seed;
  std::size_t excluded = 0;  ///< replications without a finite MLE
};

/// |g(beta^)| bound that marks a fit as converged.
inline constexpr double kProfileTolerance = 1e-10;

/// Censored-data profile score for the shape:
///   g(beta) = mean_{D} ln x + 1/beta - sum x^beta ln x / sum x^beta.
/// Strictly decreasing with a single root when r >= 2 and the failures are
/// not all equal; otherwise throws NoFiniteMle.
double profile_equation(double beta, const CensoredSample& s);

/// Shape root of the profile score (geometric bracket, bisection to 1e-12,
/// at most five Newton polishing steps), then
/// alpha^ = (S(beta^)/r)^(1/beta^) and x_R^ = alpha^ K^(1/beta^).
MleResult fit(const CensoredSample& s, double R);

/// Simulate `replications` type-II censored samples from a Weibull with
/// alpha = 1 and the given shape, and return B = 1 / mean(beta^ / beta).
/// beta^/beta is pivotal, so the result does not depend on the generating
/// parameters beyond Monte Carlo error. Requires r >= 2 and at least 10^4
/// replications.
UnbiasingEntry calibrate_B(std::size_t n, std::size_t r, std::size_t replications,
                           std::uint64_t seed, double generating_beta = 1.0,
                           std::size_t threads = 0);

/// beta-bar = B beta^. Throws InputError when the entry was calibrated for a
/// different (n, r).
double unbiased_beta(double beta_hat, const UnbiasingEntry& entry, std::size_t n, std::size_t r);

/// On-disk cache of calibrations keyed by (n, r, replications, seed).
/// CSV columns: n,r,B,replications,std_error,seed.
class CalibrationCache {
 public:
  CalibrationCache() = default;
  explicit CalibrationCache(std::string path);

  std::optional<UnbiasingEntry> find(std::size_t n, std::size_t r, std::size_t replications,
                                     std::uint64_t seed) const;
  void insert(const UnbiasingEntry& entry);

  /// Cached entry, or a fresh calibration that is added (and saved when the
  /// cache has a path).
  UnbiasingEntry get_or_calibrate(std::size_t n, std::size_t r, std::size_t replications,
                                  std::uint64_t seed, std::size_t threads = 0);

  const std::vector<UnbiasingEntry>& entries() const noexcept { return entries_; }

  void load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::string path_;
  std::vector<UnbiasingEntry> entries_;
};

nlohmann::json to_json(const MleResult& m);

std::string calibration_csv_header();
std::string calibration_csv_row(const UnbiasingEntry& e);

}  // namespace weibayes
