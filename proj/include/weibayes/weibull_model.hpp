#pragma once

#include <cstddef>
#include <vector>

#include "weibayes/random.hpp"

namespace weibayes {

/// Classical parameterization Sf(x) = exp[-(x/alpha)^beta].
class ShapeScaleWeibull {
 public:
  ShapeScaleWeibull(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

 private:
  double alpha_;
  double beta_;
};

/// Reliable-life parameterization Sf(x) = exp[-K (x/x_R)^beta], K = ln(1/R).
///
/// x_R is the quantile with survival probability R. K is always recomputed
/// from R, never stored on its own.
class ReliableLifeWeibull {
 public:
  ReliableLifeWeibull(double x_R, double beta, double R);

  double x_R() const noexcept { return x_R_; }
  double beta() const noexcept { return beta_; }
  double R() const noexcept { return R_; }
  double K() const noexcept;

 private:
  double x_R_;
  double beta_;
  double R_;
};

/// K = ln(1/R) for a reliability level in (0, 1).
double log_inverse_reliability(double R);

double reliability(double x, const ReliableLifeWeibull& p);
double log_reliability(double x, const ReliableLifeWeibull& p);

/// Density at x >= 0. At x = 0 it is 0 for beta > 1 and K/x_R for beta = 1;
/// beta < 1 is singular there and throws std::domain_error.
double density(double x, const ReliableLifeWeibull& p);
double log_density(double x, const ReliableLifeWeibull& p);

/// Lifetime whose survival probability is q, for q in (0, 1).
double quantile(double q, const ReliableLifeWeibull& p);

ReliableLifeWeibull to_reliable_life(const ShapeScaleWeibull& p, double R);
ShapeScaleWeibull to_shape_scale(const ReliableLifeWeibull& p);

/// n i.i.d. lifetimes by inverse transform: x = quantile(u), u ~ U(0,1).
std::vector<double> sample(const ReliableLifeWeibull& p, std::size_t n, CounterStream& stream);

}  // namespace weibayes
