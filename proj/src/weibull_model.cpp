#include "weibayes/weibull_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "weibayes/errors.hpp"

namespace weibayes {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

ShapeScaleWeibull::ShapeScaleWeibull(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!positive_finite(alpha) || !positive_finite(beta)) {
    throw InputError("Weibull alpha and beta must be positive and finite");
  }
}

ReliableLifeWeibull::ReliableLifeWeibull(double x_R, double beta, double R)
    : x_R_(x_R), beta_(beta), R_(R) {
  if (!positive_finite(x_R) || !positive_finite(beta)) {
    throw InputError("Weibull x_R and beta must be positive and finite");
  }
  if (!(R > 0.0 && R < 1.0)) {
    throw InputError("reliability level R must lie in (0, 1)");
  }
}

double ReliableLifeWeibull::K() const noexcept { return -std::log(R_); }

double log_inverse_reliability(double R) {
  if (!(R > 0.0 && R < 1.0)) {
    throw InputError("reliability level R must lie in (0, 1)");
  }
  return -std::log(R);
}

double log_reliability(double x, const ReliableLifeWeibull& p) {
  if (!(x >= 0.0)) {
    throw InputError("reliability: x must be nonnegative");
  }
  return -p.K() * std::pow(x / p.x_R(), p.beta());
}

double reliability(double x, const ReliableLifeWeibull& p) { return std::exp(log_reliability(x, p)); }

double log_density(double x, const ReliableLifeWeibull& p) {
  if (!(x >= 0.0)) {
    throw InputError("density: x must be nonnegative");
  }
  const double K = p.K();
  const double beta = p.beta();
  if (x == 0.0) {
    if (beta > 1.0) {
      return -INFINITY;
    }
    if (beta == 1.0) {
      return std::log(K / p.x_R());
    }
    throw std::domain_error("density: singular at x = 0 for beta < 1");
  }
  const double log_ratio = std::log(x / p.x_R());
  return std::log(K * beta / p.x_R()) + (beta - 1.0) * log_ratio - K * std::exp(beta * log_ratio);
}

double density(double x, const ReliableLifeWeibull& p) { return std::exp(log_density(x, p)); }

double quantile(double q, const ReliableLifeWeibull& p) {
  if (!(q > 0.0 && q < 1.0)) {
    throw InputError("quantile: survival probability must lie in (0, 1)");
  }
  return p.x_R() * std::pow(-std::log(q) / p.K(), 1.0 / p.beta());
}

ReliableLifeWeibull to_reliable_life(const ShapeScaleWeibull& p, double R) {
  const double K = log_inverse_reliability(R);
  return {p.alpha() * std::pow(K, 1.0 / p.beta()), p.beta(), R};
}

ShapeScaleWeibull to_shape_scale(const ReliableLifeWeibull& p) {
  return {p.x_R() * std::pow(p.K(), -1.0 / p.beta()), p.beta()};
}

std::vector<double> sample(const ReliableLifeWeibull& p, std::size_t n, CounterStream& stream) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(quantile(stream.uniform01(), p));
  }
  return out;
}

}  // namespace weibayes
