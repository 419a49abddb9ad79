#include "wsetlab/young.hpp"

#include <cmath>
#include <limits>

#include "wsetlab/errors.hpp"
#include "wsetlab/numeric.hpp"

namespace wsetlab {

namespace {
constexpr double saturation_cap = 1e300;
}

YoungFunction YoungFunction::power_over_p(double p) {
  if (!(p >= 1.0)) fail(ErrorCode::DomainError, "power_over_p needs p >= 1");
  YoungFunction y;
  y.form_ = Form::PowerOverP;
  y.delta2_ = Delta2::Holds;
  y.p_ = p;
  y.label_ = "x^" + std::to_string(p) + "/p";
  return y;
}

YoungFunction YoungFunction::exponential(double beta) {
  if (!(beta > 0.0 && beta <= 1.0))
    fail(ErrorCode::DomainError, "exponential Young needs beta in (0,1]");
  YoungFunction y;
  y.form_ = Form::Exponential;
  y.delta2_ = Delta2::Fails;
  y.beta_ = beta;
  y.label_ = "exp(x^" + std::to_string(beta) + ")-1";
  return y;
}

YoungFunction YoungFunction::linear() {
  YoungFunction y;
  y.form_ = Form::Linear;
  y.delta2_ = Delta2::Holds;
  y.label_ = "x";
  return y;
}

YoungFunction YoungFunction::custom(std::function<double(double)> eval,
                                    bool declared_convex, std::string label) {
  if (!declared_convex)
    fail(ErrorCode::DomainError, "custom Young must be declared convex");
  YoungFunction y;
  y.form_ = Form::Custom;
  y.delta2_ = Delta2::Unknown;
  y.label_ = std::move(label);
  y.custom_ = std::make_shared<const std::function<double(double)>>(
      std::move(eval));
  return y;
}

double YoungFunction::operator()(double x) const {
  x = std::abs(x);
  double v;
  switch (form_) {
    case Form::PowerOverP:
      v = std::pow(x, p_) / p_;
      break;
    case Form::Exponential:
      v = std::expm1(std::pow(x, beta_));
      break;
    case Form::Linear:
      v = x;
      break;
    case Form::Custom:
      v = (*custom_)(x);
      break;
    default:
      v = x;
  }
  if (!(v < saturation_cap)) return saturation_cap;
  return v < 0.0 ? 0.0 : v;
}

double YoungFunction::inverse(double target) const {
  if (target <= 0.0) return 0.0;
  switch (form_) {
    case Form::PowerOverP:
      return std::pow(target * p_, 1.0 / p_);
    case Form::Linear:
      return target;
    case Form::Exponential:
      return std::pow(std::log1p(target), 1.0 / beta_);
    case Form::Custom:
      break;
  }
  double hi = 1.0;
  while ((*this)(hi) < target && hi < 1e300) hi *= 2.0;
  return num::bisect_threshold(
      [this, target](double x) { return (*this)(x) >= target; }, 0.0, hi,
      1e-12 * (1.0 + hi));
}

}  // namespace wsetlab
