#include "wsetlab/gauge.hpp"

#include <cmath>
#include <mutex>
#include <limits>

#include "wsetlab/errors.hpp"

namespace wsetlab {

namespace {
constexpr double saturation_cap = 1e300;
constexpr double log_cap = 690.0;  // exp(690) < 1e300
}  // namespace

double log_density(LogDensityModel model, double theta, double x) {
  switch (model) {
    case LogDensityModel::Exponential:
      return -std::log(theta) - x / theta;
    case LogDensityModel::Gumbel:
      return std::log(theta) - theta * x - std::exp(-theta * x);
  }
  return 0.0;
}

double dtheta_log_density(LogDensityModel model, double theta, double x) {
  switch (model) {
    case LogDensityModel::Exponential:
      return -1.0 / theta + x / (theta * theta);
    case LogDensityModel::Gumbel:
      return 1.0 / theta - x + x * std::exp(-theta * x);
  }
  return 0.0;
}

GaugeFunction GaugeFunction::power(double p) {
  if (!(p > 0.0)) fail(ErrorCode::DomainError, "power gauge needs p > 0");
  return GaugeFunction(Power{p});
}

GaugeFunction GaugeFunction::exp_power(double lambda, double alpha) {
  if (!(lambda > 0.0) || !(alpha > 0.0 && alpha <= 2.0))
    fail(ErrorCode::DomainError,
         "exp_power gauge needs lambda > 0, alpha in (0,2]");
  return GaugeFunction(ExpPower{lambda, alpha});
}

GaugeFunction GaugeFunction::abs_log_density(LogDensityModel model,
                                             double theta) {
  if (!(theta > 0.0))
    fail(ErrorCode::DomainError, "abs_log_density gauge needs theta > 0");
  return GaugeFunction(AbsLogDensity{model, theta});
}

GaugeFunction GaugeFunction::constant1() { return GaugeFunction(Constant1{}); }

GaugeFunction GaugeFunction::scaled(YoungFunction young, double factor) {
  if (!(factor > 0.0))
    fail(ErrorCode::DomainError, "scaled gauge needs factor > 0");
  return GaugeFunction(Scaled{std::move(young), factor});
}

GaugeValue GaugeFunction::eval(double x) const {
  struct Visitor {
    double x;
    GaugeValue operator()(const Power& f) const {
      const double v = std::pow(std::abs(x), f.p);
      if (!(v < saturation_cap)) return {saturation_cap, true};
      return {v, false};
    }
    GaugeValue operator()(const ExpPower& f) const {
      const double e = f.lambda * std::pow(std::abs(x), f.alpha);
      if (e > log_cap) return {saturation_cap, true};
      return {std::exp(e), false};
    }
    GaugeValue operator()(const AbsLogDensity& f) const {
      const double v = std::abs(log_density(f.model, f.theta, x));
      if (!(v < saturation_cap)) return {saturation_cap, true};
      return {v, false};
    }
    GaugeValue operator()(const Constant1&) const { return {1.0, false}; }
    GaugeValue operator()(const Scaled& f) const {
      const double v = f.young(f.factor * std::abs(x));
      if (!(v < saturation_cap)) return {saturation_cap, true};
      return {v, false};
    }
  };
  return std::visit(Visitor{x}, form_);
}

bool GaugeFunction::convex_even() const {
  struct Visitor {
    bool operator()(const GaugeFunction::Power& f) const { return f.p >= 1.0; }
    bool operator()(const GaugeFunction::ExpPower& f) const {
      return f.alpha >= 1.0;
    }
    bool operator()(const GaugeFunction::AbsLogDensity&) const {
      return false;
    }
    bool operator()(const GaugeFunction::Constant1&) const { return true; }
    bool operator()(const GaugeFunction::Scaled& f) const {
      // Convex nondecreasing composed with |.| is convex and even; the
      // exponential Young form with beta < 1 loses convexity near 0.
      if (f.young.form() == YoungFunction::Form::Exponential)
        return f.young.beta() >= 1.0;
      return f.young.form() != YoungFunction::Form::Custom;
    }
  };
  return std::visit(Visitor{}, form_);
}

std::string GaugeFunction::describe() const {
  struct Visitor {
    std::string operator()(const GaugeFunction::Power& f) const {
      return "|x|^" + std::to_string(f.p);
    }
    std::string operator()(const GaugeFunction::ExpPower& f) const {
      return "exp(" + std::to_string(f.lambda) + "|x|^" +
             std::to_string(f.alpha) + ")";
    }
    std::string operator()(const GaugeFunction::AbsLogDensity& f) const {
      const char* m =
          f.model == LogDensityModel::Exponential ? "exponential" : "gumbel";
      return std::string("|log f_theta|, ") + m +
             ", theta=" + std::to_string(f.theta);
    }
    std::string operator()(const GaugeFunction::Constant1&) const {
      return "1";
    }
    std::string operator()(const GaugeFunction::Scaled& f) const {
      return f.young.label() + " at " + std::to_string(f.factor) + "|x|";
    }
  };
  return std::visit(Visitor{}, form_);
}

// ---------------------------------------------------------------------------
// Rational enumeration

namespace {

struct Fraction {
  std::uint64_t num;
  std::uint64_t den;
};

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Stern-Brocot tree walked diagonally: all reduced fractions ordered by
// num+den, then by value. Level order would need index ~2^q to reach
// denominator q; this order reaches it at ~q^2, so density is cheap.
// First element is 1/1.
Fraction stern_brocot(std::uint64_t k) {
  static std::vector<Fraction> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::uint64_t s = cache.empty() ? 2 : cache.back().num + cache.back().den;
  if (!cache.empty()) ++s;
  while (cache.size() < k) {
    for (std::uint64_t p = 1; p < s; ++p) {
      if (gcd_u64(p, s - p) == 1) cache.push_back({p, s - p});
    }
    ++s;
  }
  return cache[k - 1];
}

}  // namespace

RationalEnumerator::RationalEnumerator(Interval domain)
    : RationalEnumerator(std::vector<Interval>{domain}) {}

RationalEnumerator::RationalEnumerator(std::vector<Interval> box)
    : box_(std::move(box)) {
  if (box_.empty()) fail(ErrorCode::EmptyDomain, "empty box");
  for (const Interval& iv : box_) {
    const bool lo_inf = std::isinf(iv.lo);
    const bool hi_inf = std::isinf(iv.hi);
    if (!lo_inf && !hi_inf && !(iv.lo < iv.hi))
      fail(ErrorCode::EmptyDomain, "interval has no interior");
  }
}

double RationalEnumerator::map_scalar(std::uint64_t k,
                                      const Interval& dom) const {
  const Fraction q = stern_brocot(k);
  const double r = static_cast<double>(q.num) / static_cast<double>(q.den);
  const bool lo_inf = std::isinf(dom.lo);
  const bool hi_inf = std::isinf(dom.hi);
  if (lo_inf && hi_inf) return std::log(r);
  if (hi_inf) return dom.lo + r;
  if (lo_inf) return dom.hi - r;
  // (0,inf) -> (lo,hi) via r/(1+r); exact at r = p/q: p/(p+q).
  const double frac = static_cast<double>(q.num) /
                      static_cast<double>(q.num + q.den);
  return dom.lo + (dom.hi - dom.lo) * frac;
}

double RationalEnumerator::operator()(std::uint64_t k) const {
  if (k == 0) fail(ErrorCode::DomainError, "enumeration index starts at 1");
  if (box_.size() != 1)
    fail(ErrorCode::DomainError, "scalar access on a box domain");
  const Interval& dom = box_[0];
  if (dom.lo == 0.0 && std::isinf(dom.hi)) {
    const Fraction q = stern_brocot(k);
    return static_cast<double>(q.num) / static_cast<double>(q.den);
  }
  return map_scalar(k, dom);
}

std::vector<double> RationalEnumerator::at(std::uint64_t k) const {
  if (k == 0) fail(ErrorCode::DomainError, "enumeration index starts at 1");
  const std::size_t d = box_.size();
  if (d == 1) return {(*this)(k)};
  // De-interleave the bits of k-1 into d per-coordinate indices.
  std::vector<std::uint64_t> idx(d, 0);
  std::uint64_t bits = k - 1;
  for (int b = 0; b < 64; ++b) {
    if ((bits >> b) & 1u) idx[b % d] |= (1ULL << (b / d));
  }
  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = map_scalar(idx[j] + 1, box_[j]);
  return out;
}

// ---------------------------------------------------------------------------
// Gauge sequences

GaugeSequence GaugeSequence::constant(GaugeFunction g) {
  GaugeSequence s;
  s.kind_ = GaugeSeqKind::Constant;
  s.base_ = std::make_shared<const GaugeFunction>(std::move(g));
  return s;
}

GaugeSequence GaugeSequence::power_ladder(double p_star) {
  if (!(p_star > 0.0))
    fail(ErrorCode::DomainError, "power ladder needs p_star > 0");
  GaugeSequence s;
  s.kind_ = GaugeSeqKind::PowerLadder;
  s.p_star_ = p_star;
  return s;
}

GaugeSequence GaugeSequence::exp_ladder(double beta_star) {
  if (!(beta_star > 0.0 && beta_star <= 2.0))
    fail(ErrorCode::DomainError, "exp ladder needs beta_star in (0,2]");
  GaugeSequence s;
  s.kind_ = GaugeSeqKind::ExpLadder;
  s.beta_star_ = beta_star;
  return s;
}

GaugeSequence GaugeSequence::log_density_enumeration(LogDensityModel model) {
  GaugeSequence s;
  s.kind_ = GaugeSeqKind::LogDensityEnumeration;
  s.model_ = model;
  return s;
}

GaugeSequence GaugeSequence::young_scaled(YoungFunction young) {
  GaugeSequence s;
  s.kind_ = GaugeSeqKind::YoungScaled;
  s.young_ = std::make_shared<const YoungFunction>(std::move(young));
  return s;
}

GaugeFunction GaugeSequence::at(int k) const {
  if (k < 1) fail(ErrorCode::DomainError, "gauge index starts at 1");
  const double kd = static_cast<double>(k);
  switch (kind_) {
    case GaugeSeqKind::Constant:
      return *base_;
    case GaugeSeqKind::PowerLadder:
      return GaugeFunction::power(p_star_ * kd / (kd + 1.0));
    case GaugeSeqKind::ExpLadder:
      return GaugeFunction::exp_power(std::pow(kd, 0.25),
                                      beta_star_ * kd / (kd + 1.0));
    case GaugeSeqKind::LogDensityEnumeration: {
      static const RationalEnumerator positives(
          Interval{0.0, std::numeric_limits<double>::infinity()});
      return GaugeFunction::abs_log_density(
          model_, positives(static_cast<std::uint64_t>(k)));
    }
    case GaugeSeqKind::YoungScaled:
      return GaugeFunction::scaled(*young_, kd);
  }
  fail(ErrorCode::DomainError, "unreachable gauge kind");
}

bool GaugeSequence::convex_even() const {
  switch (kind_) {
    case GaugeSeqKind::Constant:
      return base_->convex_even();
    case GaugeSeqKind::PowerLadder:
      return p_star_ >= 2.0;  // p_1 = p_star/2 must already be >= 1
    case GaugeSeqKind::ExpLadder:
      return false;  // beta_k < beta_star <= 2 passes through (0,1)
    case GaugeSeqKind::LogDensityEnumeration:
      return false;
    case GaugeSeqKind::YoungScaled:
      return at(1).convex_even();
  }
  return false;
}

std::string GaugeSequence::describe() const {
  switch (kind_) {
    case GaugeSeqKind::Constant:
      return "constant " + base_->describe();
    case GaugeSeqKind::PowerLadder:
      return "|x|^{p_k}, p_k -> " + std::to_string(p_star_);
    case GaugeSeqKind::ExpLadder:
      return "exp(k^{1/4}|x|^{b_k}), b_k -> " + std::to_string(beta_star_);
    case GaugeSeqKind::LogDensityEnumeration:
      return model_ == LogDensityModel::Exponential
                 ? "|log f_{theta_k}| exponential model"
                 : "|log f_{a_k}| gumbel model";
    case GaugeSeqKind::YoungScaled:
      return young_->label() + " at k|x|";
  }
  return "?";
}

}  // namespace wsetlab
