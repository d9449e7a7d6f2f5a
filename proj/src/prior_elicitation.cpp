#include "weibayes/prior_elicitation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "weibayes/errors.hpp"
#include "weibayes/numerics.hpp"

namespace weibayes {

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

[[noreturn]] void throw_constraint(double w, double beta) {
  throw ConstraintViolation("hyperparameter constraint w > 1/beta violated at beta = " +
                                format_number(beta) + " (w = " + format_number(w) +
                                ", 1/beta = " + format_number(1.0 / beta) + ")",
                            beta);
}

}  // namespace

BetaInterval::BetaInterval(double beta1, double beta2) : beta1_(beta1), beta2_(beta2) {
  if (!(beta1 > 0.0) || !(beta2 > beta1) || !std::isfinite(beta2)) {
    throw InputError("shape interval must satisfy beta2 > beta1 > 0");
  }
}

WRule WRule::constant_over_beta(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InputError("w rule c/beta needs c > 0");
  }
  return {Kind::kConstantOverBeta, c};
}

WRule WRule::fixed(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InputError("fixed w must be positive");
  }
  return {Kind::kFixedValue, v};
}

double WRule::operator()(double beta) const noexcept {
  switch (kind_) {
    case Kind::kConstantOverBeta:
      return value_ / beta;
    case Kind::kFixedValue:
      return value_;
    case Kind::kUnit:
      return 1.0;
    case Kind::kPiecewise96:
      return beta >= 1.0 ? 1.0 : 1.0 / (beta * beta);
  }
  return value_;
}

WRule::Margin WRule::min_margin(const BetaInterval& iv) const noexcept {
  const double b1 = iv.beta1();
  const double b2 = iv.beta2();
  switch (kind_) {
    case Kind::kConstantOverBeta: {
      // (c - 1) / beta: smallest magnitude at beta2 when positive, else worst at beta1
      const double at = value_ > 1.0 ? b2 : b1;
      return {(value_ - 1.0) / at, at};
    }
    case Kind::kFixedValue:
    case Kind::kUnit:
      return {(*this)(b1) - 1.0 / b1, b1};
    case Kind::kPiecewise96: {
      if (b2 < 1.0) {
        // (1 - beta) / beta^2 is decreasing on (0, 1)
        return {(1.0 - b2) / (b2 * b2), b2};
      }
      const double at = std::max(b1, 1.0);
      return {1.0 - 1.0 / at, at};
    }
  }
  return {0.0, b1};
}

double WRule::max_over(const BetaInterval& iv) const noexcept {
  switch (kind_) {
    case Kind::kConstantOverBeta:
    case Kind::kPiecewise96:
      return (*this)(iv.beta1());
    case Kind::kFixedValue:
    case Kind::kUnit:
      return value_;
  }
  return value_;
}

std::string WRule::describe() const {
  switch (kind_) {
    case Kind::kConstantOverBeta:
      return format_number(value_) + "/beta";
    case Kind::kFixedValue:
      return format_number(value_);
    case Kind::kUnit:
      return "1";
    case Kind::kPiecewise96:
      return "piecewise(1 | 1/beta^2)";
  }
  return {};
}

PriorSpec::PriorSpec(BetaInterval interval, double xbar_R, double R, WRule w_rule)
    : interval_(interval), xbar_R_(xbar_R), R_(R), w_rule_(w_rule) {
  if (!(xbar_R > 0.0) || !std::isfinite(xbar_R)) {
    throw InputError("anticipated reliable life xbar_R must be positive");
  }
  log_inverse_reliability(R);
  const auto margin = w_rule_.min_margin(interval_);
  if (!(margin.value > 0.0)) {
    throw_constraint(w_rule_(margin.at_beta), margin.at_beta);
  }
}

double PriorSpec::K() const noexcept { return -std::log(R_); }

double beta_prior_pdf(double beta, const BetaInterval& iv) noexcept {
  return iv.contains(beta) ? 1.0 / iv.width() : 0.0;
}

double hyper_a(double xbar_R, double w, double beta) {
  if (!(xbar_R > 0.0) || !(beta > 0.0) || !(w > 0.0)) {
    throw InputError("hyper_a: xbar_R, w and beta must be positive");
  }
  if (!(w > 1.0 / beta)) {
    throw_constraint(w, beta);
  }
  return xbar_R * std::exp(numerics::log_gamma(w) - numerics::log_gamma(w - 1.0 / beta));
}

double igg_log_pdf(double x, double a, double w, double beta) {
  if (!(x > 0.0) || !(a > 0.0) || !(w > 0.0) || !(beta > 0.0)) {
    throw InputError("igg_pdf: x, a, w and beta must be positive");
  }
  const double log_ratio = std::log(x / a);
  // beta a^(beta w) x^-(beta w + 1) = (beta / x) (x / a)^-(beta w)
  return std::log(beta) - std::log(x) - beta * w * log_ratio - numerics::log_gamma(w) -
         std::exp(-beta * log_ratio);
}

double igg_pdf(double x, double a, double w, double beta) {
  return std::exp(igg_log_pdf(x, a, w, beta));
}

IggParams conditional_prior(const PriorSpec& spec, double beta) {
  const double w = spec.w_rule()(beta);
  return {w, hyper_a(spec.xbar_R(), w, beta)};
}

PosteriorConditional posterior_conditional_params(double w, double a, const CensoredSample& s,
                                                  double beta, double R) {
  if (!(w >= 0.0) || !(a >= 0.0) || !(beta > 0.0)) {
    throw InputError("posterior update: w, a must be nonnegative and beta positive");
  }
  const double K = log_inverse_reliability(R);
  return {w + static_cast<double>(s.r()), std::pow(a, beta) + K * s_of_beta(s, beta)};
}

IggParams prior_from_virtual_sample(const VirtualSample& v, double R, double beta) {
  if (v.times.empty()) {
    throw InputError("virtual sample must contain at least one lifetime");
  }
  if (!(beta > 0.0)) {
    throw InputError("beta must be positive");
  }
  const auto virtual_data = CensoredSample::complete(v.times);
  const double K = log_inverse_reliability(R);
  const double log_a = (std::log(K) + log_s_of_beta(virtual_data, beta)) / beta;
  return {static_cast<double>(v.times.size()), std::exp(log_a)};
}

std::optional<std::string> prior_weight_warning(const PriorSpec& spec, std::size_t r) {
  const double w_max = spec.w_rule().max_over(spec.interval());
  if (w_max < static_cast<double>(r)) {
    return std::nullopt;
  }
  return "prior weight w reaches " + format_number(w_max) + ", not below the " +
         std::to_string(r) + " observed failures; the prior may dominate the data";
}

WRule w_rule_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("w_rule must be an object with a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  auto value = [&]() {
    if (!j.contains("value") || !j["value"].is_number()) {
      throw InputError("w_rule '" + kind + "' needs a numeric 'value'");
    }
    return j["value"].get<double>();
  };
  if (kind == "const_over_beta") return WRule::constant_over_beta(value());
  if (kind == "fixed") return WRule::fixed(value());
  if (kind == "unit") return WRule::unit();
  if (kind == "piecewise96") return WRule::piecewise96();
  throw InputError("unknown w_rule kind '" + kind + "'");
}

nlohmann::json to_json(const WRule& rule) {
  switch (rule.kind()) {
    case WRule::Kind::kConstantOverBeta:
      return {{"kind", "const_over_beta"}, {"value", rule.value()}};
    case WRule::Kind::kFixedValue:
      return {{"kind", "fixed"}, {"value", rule.value()}};
    case WRule::Kind::kUnit:
      return {{"kind", "unit"}};
    case WRule::Kind::kPiecewise96:
      return {{"kind", "piecewise96"}};
  }
  return {};
}

PriorSpec prior_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw InputError("prior specification must be a JSON object");
  }
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw InputError(std::string("prior specification needs numeric '") + key + "'");
    }
    return j[key].get<double>();
  };
  if (!j.contains("w_rule")) {
    throw InputError("prior specification needs 'w_rule'");
  }
  return {BetaInterval(number("beta1"), number("beta2")), number("xbar_R"), number("R"),
          w_rule_from_json(j["w_rule"])};
}

nlohmann::json to_json(const PriorSpec& spec) {
  return {{"beta1", spec.interval().beta1()},
          {"beta2", spec.interval().beta2()},
          {"xbar_R", spec.xbar_R()},
          {"R", spec.R()},
          {"w_rule", to_json(spec.w_rule())}};
}

}  // namespace weibayes
