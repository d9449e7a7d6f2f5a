#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "weibayes/censored_data.hpp"

namespace weibayes {

/// Support [beta1, beta2] of the uniform shape prior, beta2 > beta1 > 0.
class BetaInterval {
 public:
  BetaInterval(double beta1, double beta2);

  double beta1() const noexcept { return beta1_; }
  double beta2() const noexcept { return beta2_; }
  double width() const noexcept { return beta2_ - beta1_; }
  double midpoint() const noexcept { return 0.5 * (beta1_ + beta2_); }
  bool contains(double beta) const noexcept { return beta >= beta1_ && beta <= beta2_; }

 private:
  double beta1_;
  double beta2_;
};

/// Weight hyperparameter w as a function of the shape beta.
class WRule {
 public:
  enum class Kind {
    kConstantOverBeta,  ///< w = c / beta
    kFixedValue,        ///< w = v
    kUnit,              ///< w = 1
    kPiecewise96,       ///< w = 1 for beta >= 1, 1/beta^2 below
  };

  static WRule constant_over_beta(double c);
  static WRule fixed(double v);
  static WRule unit() { return WRule(Kind::kUnit, 1.0); }
  static WRule piecewise96() { return WRule(Kind::kPiecewise96, 0.0); }

  Kind kind() const noexcept { return kind_; }
  /// c for constant_over_beta, v for fixed; unused otherwise.
  double value() const noexcept { return value_; }

  double operator()(double beta) const noexcept;

  /// Smallest w(beta) - 1/beta over the interval and where it is attained.
  struct Margin {
    double value;
    double at_beta;
  };
  Margin min_margin(const BetaInterval& iv) const noexcept;

  /// Largest w(beta) over the interval.
  double max_over(const BetaInterval& iv) const noexcept;

  std::string describe() const;

 private:
  WRule(Kind kind, double value) : kind_(kind), value_(value) {}

  Kind kind_;
  double value_;
};

/// Everything the technologist supplies: shape interval, anticipated reliable
/// life, its reliability level and the weight rule. The scale hyperparameter
/// `a` is derived per beta, never stored.
class PriorSpec {
 public:
  /// Throws ConstraintViolation when w(beta) <= 1/beta somewhere on the interval.
  PriorSpec(BetaInterval interval, double xbar_R, double R, WRule w_rule);

  const BetaInterval& interval() const noexcept { return interval_; }
  double xbar_R() const noexcept { return xbar_R_; }
  double R() const noexcept { return R_; }
  double K() const noexcept;
  const WRule& w_rule() const noexcept { return w_rule_; }

  PriorSpec with_xbar_R(double xbar_R) const { return {interval_, xbar_R, R_, w_rule_}; }

 private:
  BetaInterval interval_;
  double xbar_R_;
  double R_;
  WRule w_rule_;
};

/// Fictitious lifetimes whose likelihood, combined with the Jeffreys prior
/// 1/x_R, reproduces an IGG prior.
struct VirtualSample {
  std::vector<double> times;
};

/// (w, a) of the inverted generalized gamma prior on x_R at a fixed beta.
struct IggParams {
  double w;
  double a;
};

/// (w + r, a^beta + K S(beta)) after the conjugate update at a fixed beta.
struct PosteriorConditional {
  double w_post;
  double A;
};

double beta_prior_pdf(double beta, const BetaInterval& iv) noexcept;

/// a = xbar_R Gamma(w) / Gamma(w - 1/beta), the scale that makes the
/// conditional prior mean equal xbar_R. Requires w > 1/beta.
double hyper_a(double xbar_R, double w, double beta);

/// Inverted generalized gamma density
/// beta a^(beta w) / Gamma(w) x^-(beta w + 1) exp[-(x/a)^-beta].
double igg_pdf(double x, double a, double w, double beta);
double igg_log_pdf(double x, double a, double w, double beta);

/// w = w_rule(beta), a = hyper_a(xbar_R, w, beta).
IggParams conditional_prior(const PriorSpec& spec, double beta);

/// Conjugate update of the conditional prior with a censored sample.
/// w = 0, a = 0 is accepted and corresponds to the Jeffreys start.
PosteriorConditional posterior_conditional_params(double w, double a, const CensoredSample& s,
                                                  double beta, double R);

/// w = n', a = (K S'(beta))^(1/beta).
IggParams prior_from_virtual_sample(const VirtualSample& v, double R, double beta);

/// Advisory message when the prior weight reaches the number of failures
/// (the prior then tends to dominate the data). Empty when w < r everywhere.
std::optional<std::string> prior_weight_warning(const PriorSpec& spec, std::size_t r);

/// JSON prior object:
/// {"beta1", "beta2", "xbar_R", "R", "w_rule": {"kind", "value"?}}
PriorSpec prior_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PriorSpec& spec);
WRule w_rule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WRule& rule);

}  // namespace weibayes
