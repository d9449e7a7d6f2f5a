#include "weibayes/prior_elicitation.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "reference_posterior.hpp"
#include "weibayes/errors.hpp"
#include "weibayes/simulation_harness.hpp"

namespace weibayes {
namespace {

constexpr double kK98 = 0.0202027073175194484;

double igg_mean(double a, double w, double beta) {
  return testing::integrate_half_line_log(
      [&](double x) { return std::log(x) + igg_log_pdf(x, a, w, beta); }, std::log(a));
}

double igg_second_moment(double a, double w, double beta) {
  return testing::integrate_half_line_log(
      [&](double x) { return 2.0 * std::log(x) + igg_log_pdf(x, a, w, beta); }, std::log(a));
}

std::vector<PriorSpec> table2_priors(double true_beta) {
  std::vector<PriorSpec> out;
  for (auto label : sim::kAllCases) {
    const auto c = sim::build_case(label, true_beta);
    for (const auto& setting : sim::paper_w_settings()) {
      out.emplace_back(c.interval, c.xbar_R, 0.98, setting.resolve(c.interval));
    }
  }
  return out;
}

TEST(BetaPrior, UniformDensity) {
  EXPECT_DOUBLE_EQ(beta_prior_pdf(2.0, BetaInterval(1.0, 3.0)), 0.5);
  EXPECT_EQ(beta_prior_pdf(2.0, BetaInterval(0.7, 1.3)), 0.0);
  const BetaInterval iv(0.7, 1.3);
  EXPECT_NEAR(testing::integrate_interval([&](double b) { return beta_prior_pdf(b, iv); }, 0.7, 1.3),
              1.0, 1e-12);
  EXPECT_THROW(BetaInterval(2.0, 1.0), InputError);
  EXPECT_THROW(BetaInterval(0.0, 1.0), InputError);
}

TEST(HyperA, GammaRatioValues) {
  EXPECT_NEAR(hyper_a(10.0, 2.0, 1.0), 10.0, 1e-13);
  EXPECT_NEAR(hyper_a(1.0, 1.0, 2.0), 0.564189583547756287, 1e-14);
}

TEST(HyperA, RejectsWAtOrBelowInverseBeta) {
  try {
    hyper_a(1.0, 0.9, 1.0);
    FAIL() << "expected ConstraintViolation";
  } catch (const ConstraintViolation& e) {
    EXPECT_EQ(e.violating_beta(), 1.0);
    EXPECT_NE(std::string(e.what()).find("w > 1/beta"), std::string::npos);
  }
  EXPECT_THROW(hyper_a(1.0, 1.0, 1.0), ConstraintViolation);
}

TEST(Igg, HandValue) { EXPECT_NEAR(igg_pdf(1.0, 1.0, 1.0, 1.0), std::exp(-1.0), 1e-15); }

TEST(Igg, NormalizedOnFigureGrid) {
  for (double w = 1.1; w <= 3.1 + 1e-9; w += 0.3) {
    const double total = testing::integrate_half_line_log(
        [&](double x) { return igg_log_pdf(x, 1.0, w, 1.0); }, 0.0);
    EXPECT_NEAR(total, 1.0, 1e-8) << "w = " << w;
  }
}

TEST(Igg, MeanMatchesGammaRatio) {
  for (auto [a, w, beta] : {std::tuple{1.0, 2.0, 1.0}, std::tuple{0.3, 1.5, 2.5},
                            std::tuple{4.0, 3.0, 0.6}, std::tuple{1.0, 1.4, 1.0}}) {
    const double expected = a * boost::math::tgamma(w - 1.0 / beta) / boost::math::tgamma(w);
    EXPECT_LT(testing::relative_error(igg_mean(a, w, beta), expected), 1e-8)
        << a << ' ' << w << ' ' << beta;
  }
}

TEST(Igg, TailDecaysAtOrderWBetaPlusOne) {
  for (auto [a, w, beta] : {std::tuple{1.0, 1.1, 1.0}, std::tuple{2.0, 0.55, 2.0},
                            std::tuple{0.5, 3.0, 0.6}}) {
    auto scaled = [&](double x) { return std::exp(igg_log_pdf(x, a, w, beta) + (w * beta + 1.0) * std::log(x)); };
    const double near = scaled(1e3 * a);
    const double far = scaled(1e4 * a);
    EXPECT_GT(near, 0.0);
    EXPECT_LT(std::abs(near / far - 1.0), 0.05);
  }
}

TEST(Igg, DispersionFallsAsWeightGrows) {
  const double a = 1.0;
  for (double beta : {1.0, 2.0}) {
    double prev = INFINITY;
    for (double w = 2.0 / beta + 0.2; w < 6.0; w += 0.3) {
      const double m1 = igg_mean(a, w, beta);
      const double var = igg_second_moment(a, w, beta) - m1 * m1;
      EXPECT_LT(var, prev) << "beta " << beta << " w " << w;
      prev = var;
    }
  }
}

TEST(WRule, Evaluation) {
  EXPECT_DOUBLE_EQ(WRule::constant_over_beta(1.1)(2.0), 0.55);
  EXPECT_DOUBLE_EQ(WRule::fixed(1.0 / 1.0 + 0.1)(1.7), 1.1);
  EXPECT_DOUBLE_EQ(WRule::fixed(1.1)(2.9), 1.1);
  EXPECT_EQ(WRule::unit()(0.3), 1.0);
  EXPECT_EQ(WRule::piecewise96()(2.0), 1.0);
  EXPECT_DOUBLE_EQ(WRule::piecewise96()(0.5), 4.0);
}

TEST(ConditionalPrior, ConstantOverBeta) {
  const PriorSpec spec(BetaInterval(1.0, 3.0), 1.0, 0.98, WRule::constant_over_beta(1.1));
  const auto [w, a] = conditional_prior(spec, 2.0);
  EXPECT_DOUBLE_EQ(w, 0.55);
  EXPECT_NEAR(a, 0.0830055052608991704, 1e-15);
}

TEST(ConditionalPrior, FixedRuleIsFlat) {
  const PriorSpec spec(BetaInterval(1.0, 3.0), 1.0, 0.98, WRule::fixed(1.0 / 1.0 + 0.1));
  for (double beta : {1.0, 1.5, 3.0}) EXPECT_DOUBLE_EQ(conditional_prior(spec, beta).w, 1.1);
}

TEST(PriorSpec, RejectsRulesBreakingTheConstraint) {
  try {
    PriorSpec(BetaInterval(0.5, 2.0), 1.0, 0.98, WRule::unit());
    FAIL();
  } catch (const ConstraintViolation& e) {
    EXPECT_DOUBLE_EQ(e.violating_beta(), 0.5);
  }
  EXPECT_THROW(hyper_a(1.0, WRule::unit()(0.5), 0.5), ConstraintViolation);
  try {
    PriorSpec(BetaInterval(0.7, 1.3), 1.0, 0.98, WRule::piecewise96());
    FAIL();
  } catch (const ConstraintViolation& e) {
    EXPECT_DOUBLE_EQ(e.violating_beta(), 1.0);
    EXPECT_NE(std::string(e.what()).find("w > 1/beta"), std::string::npos);
  }
  EXPECT_THROW(PriorSpec(BetaInterval(1.0, 2.0), 1.0, 0.98, WRule::constant_over_beta(1.0)),
               ConstraintViolation);
  EXPECT_THROW(PriorSpec(BetaInterval(0.5, 2.0), 1.0, 0.98, WRule::fixed(2.0)),
               ConstraintViolation);
  // admissible on both sides of beta = 1
  EXPECT_NO_THROW(PriorSpec(BetaInterval(0.3, 0.9), 1.0, 0.98, WRule::piecewise96()));
  EXPECT_NO_THROW(PriorSpec(BetaInterval(1.2, 3.0), 1.0, 0.98, WRule::piecewise96()));
  EXPECT_NO_THROW(PriorSpec(BetaInterval(1.2, 3.0), 1.0, 0.98, WRule::unit()));
  EXPECT_THROW(PriorSpec(BetaInterval(1.0, 2.0), -1.0, 0.98, WRule::unit()), InputError);
}

TEST(PosteriorConditional, EmptySampleLeavesPriorUnchanged) {
  const auto [w_post, A] = posterior_conditional_params(1.3, 0.7, CensoredSample(), 1.6, 0.98);
  EXPECT_EQ(w_post, 1.3);
  EXPECT_NEAR(A, std::pow(0.7, 1.6), 1e-15);
}

TEST(PosteriorConditional, HandArithmetic) {
  const auto [w_post, A] =
      posterior_conditional_params(1.0, 1.0, CensoredSample::complete({1.0, 2.0, 3.0}), 1.0, 0.98);
  EXPECT_EQ(w_post, 4.0);
  EXPECT_NEAR(A, 1.12121624390511669, 1e-14);
}

TEST(PosteriorConditional, ConjugacyPointwise) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int scenario = 0; scenario < 20; ++scenario) {
    const double beta = 0.5 + 2.5 * u01(gen);
    const double w = 1.0 / beta + 0.1 + 2.0 * u01(gen);
    const double a = 0.2 + 3.0 * u01(gen);
    const int n = 1 + static_cast<int>(6 * u01(gen));
    std::vector<double> times;
    for (int i = 0; i < n; ++i) times.push_back(0.1 + 3.0 * u01(gen));
    const std::size_t r = 1 + static_cast<std::size_t>(u01(gen) * n) % n;
    const auto s = type2_censor(times, r);
    std::vector<double> failed;
    std::vector<double> censored;
    for (auto i : s.failed_indices()) failed.push_back(s.times()[i]);
    for (auto i : s.censored_indices()) censored.push_back(s.times()[i]);

    const auto [w_post, A] = posterior_conditional_params(w, a, s, beta, 0.98);
    const double a_post = std::pow(A, 1.0 / beta);
    for (int k = 0; k < 100; ++k) {
      const double x = 0.05 * std::pow(200.0, k / 99.0);
      const double direct = testing::conjugate_posterior_direct(x, w, a, failed, censored, beta, kK98);
      const double updated = igg_pdf(x, a_post, w_post, beta);
      if (direct < 1e-280) continue;
      EXPECT_LT(testing::relative_error(updated, direct), 1e-10)
          << "scenario " << scenario << " x " << x;
    }
  }
}

TEST(PosteriorConditional, MatchesRenormalizedPriorTimesLikelihood) {
  const double beta = 1.7;
  const double w = 1.2;
  const double a = 0.8;
  const std::vector<double> xs = {0.4, 1.1, 2.6, 3.0};
  const auto s = type2_censor(xs, 3);
  auto log_product = [&](double x) {
    return igg_log_pdf(x, a, w, beta) + log_likelihood(s, ReliableLifeWeibull(x, beta, 0.98));
  };
  const double shift = log_product(1.0);
  const double norm = testing::integrate_half_line_log(
      [&](double x) { return log_product(x) - shift; }, 0.0);
  const auto [w_post, A] = posterior_conditional_params(w, a, s, beta, 0.98);
  for (double x : {0.3, 0.7, 1.0, 2.0, 5.0, 12.0}) {
    const double numeric = std::exp(log_product(x) - shift) / norm;
    EXPECT_LT(testing::relative_error(igg_pdf(x, std::pow(A, 1.0 / beta), w_post, beta), numeric),
              1e-8);
  }
}

TEST(VirtualSample, SinglePoint) {
  const auto [w, a] = prior_from_virtual_sample({{1.0}}, 0.98, 1.0);
  EXPECT_EQ(w, 1.0);
  EXPECT_NEAR(a, kK98, 1e-16);
  for (double beta : {0.5, 2.0, 4.0}) {
    const auto p = prior_from_virtual_sample({{7.5}}, 0.98, beta);
    EXPECT_NEAR(p.a, 7.5 * std::pow(kK98, 1.0 / beta), 1e-13);
  }
  EXPECT_THROW(prior_from_virtual_sample({}, 0.98, 1.0), InputError);
}

TEST(VirtualSample, EquivalentToUpdatingJeffreysStart) {
  const VirtualSample v{{0.5, 1.2, 3.3, 0.9}};
  for (double beta : {0.6, 1.0, 2.5}) {
    const auto from_virtual = prior_from_virtual_sample(v, 0.95, beta);
    const auto [w_post, A] =
        posterior_conditional_params(0.0, 0.0, CensoredSample::complete(v.times), beta, 0.95);
    EXPECT_EQ(from_virtual.w, w_post);
    EXPECT_LT(testing::relative_error(from_virtual.a, std::pow(A, 1.0 / beta)), 1e-14);
  }
}

TEST(PriorMean, ConditionalMeanEqualsAnticipatedLife) {
  for (double true_beta : {2.0, 1.0, 0.6}) {
    for (const auto& spec : table2_priors(true_beta)) {
      const auto& iv = spec.interval();
      for (int i = 0; i < 50; ++i) {
        const double beta = iv.beta1() + iv.width() * i / 49.0;
        const auto [w, a] = conditional_prior(spec, beta);
        EXPECT_LT(testing::relative_error(igg_mean(a, w, beta), spec.xbar_R()), 1e-6)
            << "beta " << beta << " rule " << spec.w_rule().describe();
      }
    }
  }
}

TEST(PriorMean, MarginalMeanEqualsAnticipatedLife) {
  for (auto label : sim::kAllCases) {
    const auto c = sim::build_case(label, 1.0);
    const PriorSpec spec(c.interval, c.xbar_R, 0.98, WRule::constant_over_beta(1.1));
    const auto& iv = spec.interval();
    const double mean = testing::integrate_interval(
        [&](double beta) {
          const auto [w, a] = conditional_prior(spec, beta);
          return igg_mean(a, w, beta) * beta_prior_pdf(beta, iv);
        },
        iv.beta1(), iv.beta2());
    EXPECT_LT(testing::relative_error(mean, spec.xbar_R()), 1e-6) << sim::to_string(label);
  }
}

TEST(PriorWeightWarning, FlagsWeightsAtOrAboveFailureCount) {
  const PriorSpec heavy(BetaInterval(0.3, 0.9), 1.0, 0.98, WRule::fixed(1.0 / 0.3 + 0.1));
  EXPECT_TRUE(prior_weight_warning(heavy, 3).has_value());
  const PriorSpec light(BetaInterval(1.0, 3.0), 1.0, 0.98, WRule::constant_over_beta(1.1));
  EXPECT_FALSE(prior_weight_warning(light, 3).has_value());
}

TEST(PriorJson, ParsesAndRoundTrips) {
  const auto j = nlohmann::json::parse(
      R"({"beta1": 1, "beta2": 3, "xbar_R": 1.5, "R": 0.98, "w_rule": {"kind": "const_over_beta", "value": 1.4}})");
  const auto spec = prior_from_json(j);
  EXPECT_EQ(spec.interval().beta1(), 1.0);
  EXPECT_EQ(spec.xbar_R(), 1.5);
  EXPECT_EQ(spec.w_rule().kind(), WRule::Kind::kConstantOverBeta);
  EXPECT_EQ(to_json(spec), j);
  for (const char* kind : {"unit", "piecewise96"}) {
    nlohmann::json k = {{"beta1", 1.5}, {"beta2", 3.0}, {"xbar_R", 1.0}, {"R", 0.9},
                        {"w_rule", {{"kind", kind}}}};
    EXPECT_EQ(to_json(prior_from_json(k)), k);
  }
}

TEST(PriorJson, Errors) {
  EXPECT_THROW(prior_from_json(nlohmann::json::parse(R"({"beta1": 1})")), InputError);
  EXPECT_THROW(prior_from_json(nlohmann::json::parse(
                   R"({"beta1": 1, "beta2": 3, "xbar_R": 1, "R": 0.98, "w_rule": {"kind": "magic"}})")),
               InputError);
  EXPECT_THROW(prior_from_json(nlohmann::json::parse(
                   R"({"beta1": 1, "beta2": 3, "xbar_R": 1, "R": 0.98, "w_rule": {"kind": "fixed"}})")),
               InputError);
  EXPECT_THROW(prior_from_json(nlohmann::json::parse(
                   R"({"beta1": 0.7, "beta2": 1.3, "xbar_R": 1, "R": 0.98, "w_rule": {"kind": "piecewise96"}})")),
               ConstraintViolation);
}

}  // namespace
}  // namespace weibayes
