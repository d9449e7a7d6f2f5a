#include "weibayes/posterior_engine.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "weibayes/errors.hpp"
#include "weibayes/numerics.hpp"

namespace weibayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct NodeTerms {
  double w;
  double log_a;
  double log_A;
};

NodeTerms node_terms(double beta, const PriorSpec& spec, const CensoredSample& s) {
  const auto [w, a] = conditional_prior(spec, beta);
  const double log_a = std::log(a);
  double log_A = beta * log_a;
  if (!s.empty()) {
    log_A = numerics::log_add_exp(log_A, std::log(spec.K()) + log_s_of_beta(s, beta));
  }
  return {w, log_a, log_A};
}

double checked_log_gamma(double arg, double w, double beta) {
  if (!(arg > 0.0)) {
    throw ConstraintViolation("posterior integrand needs r + w - 1/beta > 0; hyperparameter "
                              "constraint w > 1/beta violated at beta = " +
                                  std::to_string(beta) + " (w = " + std::to_string(w) + ")",
                              beta);
  }
  return numerics::log_gamma(arg);
}

}  // namespace

void QuadratureSettings::validate() const {
  if (panels == 0 || nodes_per_panel == 0 || !(rel_tol > 0.0)) {
    throw InputError("quadrature settings need panels, nodes_per_panel and rel_tol > 0");
  }
}

std::array<double, 3> log_integrands(double beta, const PriorSpec& spec, const CensoredSample& s) {
  const auto [w, log_a, log_A] = node_terms(beta, spec, s);
  const auto r = static_cast<double>(s.r());
  const double log_beta = std::log(beta);
  const double common = beta * w * log_a + beta * s.log_P() - numerics::log_gamma(w);
  const double shape_mean_term = (r + w) * log_A;
  const double lg_rw = checked_log_gamma(r + w, w, beta);
  const double m1 = 1.0 / beta;
  const double lg_rw_m1 = checked_log_gamma(r + w - m1, w, beta);
  return {
      r * log_beta + common - shape_mean_term + lg_rw,
      r * log_beta + common - (r + w - m1) * log_A + lg_rw_m1,
      (r + 1.0) * log_beta + common - shape_mean_term + lg_rw,
  };
}

double log_integrand(double beta, int h, const PriorSpec& spec, const CensoredSample& s) {
  if (h < 0 || h > 2) {
    throw InputError("integral index h must be 0, 1 or 2");
  }
  return log_integrands(beta, spec, s)[static_cast<std::size_t>(h)];
}

LogIntegrals integrate_log_terms(const LogTermsFn& terms, const BetaInterval& iv,
                                 const QuadratureSettings& q) {
  q.validate();
  const auto rule = numerics::gauss_legendre(q.nodes_per_panel);
  const std::size_t m = rule.nodes.size();

  std::vector<double> node_values(m);
  std::array<std::vector<double>, 3> panel_logs;

  LogIntegrals result{{kNegInf, kNegInf, kNegInf}, 0, false};
  std::size_t panels = q.panels;
  for (std::size_t level = 0; level <= q.max_refinements; ++level, panels *= 2) {
    const double width = iv.width() / static_cast<double>(panels);
    const double log_half = std::log(0.5 * width);
    for (auto& v : panel_logs) v.assign(panels, kNegInf);

    std::vector<std::array<double, 3>> at_nodes(m);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = iv.beta1() + (static_cast<double>(p) + 0.5) * width;
      for (std::size_t k = 0; k < m; ++k) {
        at_nodes[k] = terms(mid + 0.5 * width * rule.nodes[k]);
      }
      for (std::size_t h = 0; h < 3; ++h) {
        for (std::size_t k = 0; k < m; ++k) {
          node_values[k] = std::log(rule.weights[k]) + at_nodes[k][h];
        }
        panel_logs[h][p] = log_half + numerics::log_sum_exp(node_values);
      }
    }
    result.node_count += panels * m;

    std::array<double, 3> current{};
    for (std::size_t h = 0; h < 3; ++h) {
      current[h] = numerics::log_sum_exp(panel_logs[h]);
    }
    if (level > 0) {
      bool settled = true;
      for (std::size_t h = 0; h < 3; ++h) {
        // difference of logs is the relative change of the integral
        if (!(std::abs(current[h] - result.log_values[h]) < q.rel_tol)) settled = false;
      }
      result.log_values = current;
      if (settled) {
        result.converged = true;
        return result;
      }
    } else {
      result.log_values = current;
    }
  }
  return result;
}

LogIntegral integrate_Ih(int h, const PriorSpec& spec, const CensoredSample& s,
                         const QuadratureSettings& q) {
  if (h < 0 || h > 2) {
    throw InputError("integral index h must be 0, 1 or 2");
  }
  const auto idx = static_cast<std::size_t>(h);
  const LogTermsFn single = [&](double beta) {
    std::array<double, 3> out{kNegInf, kNegInf, kNegInf};
    out[idx] = log_integrand(beta, h, spec, s);
    return out;
  };
  const auto all = integrate_log_terms(single, spec.interval(), q);
  return {all.log_values[idx], all.node_count, all.converged};
}

PosteriorEstimate estimate(const PriorSpec& spec, const CensoredSample& s,
                           const QuadratureSettings& q) {
  const LogTermsFn terms = [&](double beta) { return log_integrands(beta, spec, s); };
  const auto integrals = integrate_log_terms(terms, spec.interval(), q);
  const auto& li = integrals.log_values;
  return {std::exp(li[1] - li[0]), std::exp(li[2] - li[0]), li, integrals.node_count,
          integrals.converged};
}

JointPosterior::JointPosterior(const PriorSpec& spec, const CensoredSample& s,
                               const QuadratureSettings& q)
    : spec_(&spec), sample_(&s) {
  const auto i0 = integrate_Ih(0, spec, s, q);
  log_I0_ = i0.log_value;
  converged_ = i0.converged;
}

double JointPosterior::log_pdf(double x_R, double beta) const {
  if (!(x_R > 0.0)) {
    throw InputError("joint posterior: x_R must be positive");
  }
  if (!spec_->interval().contains(beta)) {
    return kNegInf;
  }
  const auto [w, log_a, log_A] = node_terms(beta, *spec_, *sample_);
  const auto r = static_cast<double>(sample_->r());
  const double log_x = std::log(x_R);
  return (r + 1.0) * std::log(beta) + beta * w * log_a - ((r + w) * beta + 1.0) * log_x +
         beta * sample_->log_P() - std::exp(log_A - beta * log_x) - numerics::log_gamma(w) -
         log_I0_;
}

double JointPosterior::pdf(double x_R, double beta) const { return std::exp(log_pdf(x_R, beta)); }

double joint_posterior_pdf(double x_R, double beta, const PriorSpec& spec,
                           const CensoredSample& s, const QuadratureSettings& q) {
  if (!spec.interval().contains(beta)) {
    return 0.0;
  }
  return JointPosterior(spec, s, q).pdf(x_R, beta);
}

nlohmann::json to_json(const PosteriorEstimate& e) {
  return {{"x_R_tilde", e.x_R_tilde},
          {"beta_tilde", e.beta_tilde},
          {"log_I", {e.log_I[0], e.log_I[1], e.log_I[2]}},
          {"node_count", e.node_count},
          {"converged", e.converged}};
}

}  // namespace weibayes
