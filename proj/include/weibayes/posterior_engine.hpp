#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "json.hpp"

#include "weibayes/censored_data.hpp"
#include "weibayes/prior_elicitation.hpp"

namespace weibayes {

struct QuadratureSettings {
  std::size_t panels = 16;
  std::size_t nodes_per_panel = 10;
  double rel_tol = 1e-8;
  std::size_t max_refinements = 8;

  void validate() const;
};

/// Log of a one-dimensional integral over the shape interval.
struct LogIntegral {
  double log_value;
  std::size_t node_count;
  bool converged;
};

/// Posterior means of x_R and beta with the log-integrals they came from.
struct PosteriorEstimate {
  double x_R_tilde;
  double beta_tilde;
  std::array<double, 3> log_I;  ///< log I_0, log I_1, log I_2
  std::size_t node_count;
  bool converged;
};

/// The three log-integrands (h = 0, 1, 2) evaluated at one beta.
using LogTermsFn = std::function<std::array<double, 3>(double beta)>;

/// Composite Gauss-Legendre over `iv` applied to exp(terms), all in log space:
/// each panel factors out its node maximum, panels are combined in index order.
/// The panel count doubles until every component changes by less than
/// rel_tol (relative), or max_refinements is exhausted.
struct LogIntegrals {
  std::array<double, 3> log_values;
  std::size_t node_count;
  bool converged;
};
LogIntegrals integrate_log_terms(const LogTermsFn& terms, const BetaInterval& iv,
                                 const QuadratureSettings& q);

/// Marginal-posterior integrand in log form, for h in {0, 1, 2}:
///   r_h ln beta + beta w ln a + beta ln P - (r + w - m_h) ln A
///   + lnGamma(r + w - m_h) - lnGamma(w)
/// with r_0 = r_1 = r, r_2 = r + 1, m_0 = m_2 = 0, m_1 = 1/beta,
/// A = a^beta + K S(beta) and (w, a) taken from the prior at this beta.
///
/// The A exponent is negative; this is the sign under which the denominator
/// normalizes the joint posterior and an empty sample returns the prior means.
double log_integrand(double beta, int h, const PriorSpec& spec, const CensoredSample& s);

/// All three log-integrands at one beta, sharing the common terms.
std::array<double, 3> log_integrands(double beta, const PriorSpec& spec, const CensoredSample& s);

LogIntegral integrate_Ih(int h, const PriorSpec& spec, const CensoredSample& s,
                         const QuadratureSettings& q = {});

/// x_R~ = I_1 / I_0, beta~ = I_2 / I_0.
PosteriorEstimate estimate(const PriorSpec& spec, const CensoredSample& s,
                           const QuadratureSettings& q = {});

/// Joint posterior density of (x_R, beta). The normalizer I_0 is computed
/// once at construction.
class JointPosterior {
 public:
  JointPosterior(const PriorSpec& spec, const CensoredSample& s, const QuadratureSettings& q = {});

  double log_pdf(double x_R, double beta) const;
  double pdf(double x_R, double beta) const;

  bool converged() const noexcept { return converged_; }

 private:
  const PriorSpec* spec_;
  const CensoredSample* sample_;
  double log_I0_;
  bool converged_;
};

double joint_posterior_pdf(double x_R, double beta, const PriorSpec& spec,
                           const CensoredSample& s, const QuadratureSettings& q = {});

/// {"x_R_tilde", "beta_tilde", "log_I": [..3], "node_count", "converged"}
nlohmann::json to_json(const PosteriorEstimate& e);

}  // namespace weibayes
