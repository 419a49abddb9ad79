#ifndef WSETLAB_GAUGE_HPP
#define WSETLAB_GAUGE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "wsetlab/young.hpp"

namespace wsetlab {

/// 1-D parametric log-density models used both by the maximum-likelihood
/// machinery and by the |log f_theta| gauge form. Parameter domain is
/// (0, inf) for both shipped models.
enum class LogDensityModel { Exponential, Gumbel };

double log_density(LogDensityModel model, double theta, double x);
double dtheta_log_density(LogDensityModel model, double theta, double x);

struct GaugeValue {
  double value;
  bool overflow;
};

/// Continuous nonnegative function on the line. The tagged form keeps
/// enough structure for closed-form integrals and tail-set geometry
/// downstream.
class GaugeFunction {
 public:
  struct Power {
    double p;  // |x|^p, p > 0
  };
  struct ExpPower {
    double lambda;  // exp(lambda * |x|^alpha)
    double alpha;   // alpha in (0, 2]
  };
  struct AbsLogDensity {
    LogDensityModel model;
    double theta;
  };
  struct Constant1 {};
  struct Scaled {
    YoungFunction young;  // young(factor * |x|)
    double factor;
  };
  using Form = std::variant<Power, ExpPower, AbsLogDensity, Constant1, Scaled>;

  static GaugeFunction power(double p);
  static GaugeFunction exp_power(double lambda, double alpha);
  static GaugeFunction abs_log_density(LogDensityModel model, double theta);
  static GaugeFunction constant1();
  static GaugeFunction scaled(YoungFunction young, double factor);

  const Form& form() const { return form_; }

  /// Checked evaluation; saturates at 1e300 with the overflow flag set.
  GaugeValue eval(double x) const;
  /// Saturating shorthand.
  double operator()(double x) const { return eval(x).value; }

  /// True when the form is convex and even as a function on the line
  /// (needed by the aggregation bound).
  bool convex_even() const;

  std::string describe() const;

 private:
  explicit GaugeFunction(Form f) : form_(std::move(f)) {}
  Form form_;
};

enum class GaugeSeqKind {
  Constant,
  PowerLadder,
  ExpLadder,
  LogDensityEnumeration,
  YoungScaled,
};

struct Interval {
  double lo;
  double hi;  // may be +inf; the interval is open
};

/// Deterministic enumeration of a countable dense subset of an open
/// interval (or box), built on a breadth-first Stern-Brocot traversal of
/// the positive rationals mapped into the domain.
class RationalEnumerator {
 public:
  explicit RationalEnumerator(Interval domain);
  explicit RationalEnumerator(std::vector<Interval> box);

  /// k-th element, k >= 1. 1-D domains only.
  double operator()(std::uint64_t k) const;
  /// k-th element of a box domain.
  std::vector<double> at(std::uint64_t k) const;

  std::size_t dimension() const { return box_.size(); }

 private:
  double map_scalar(std::uint64_t k, const Interval& dom) const;
  std::vector<Interval> box_;
};

/// Lazily generated sequence psi_1, psi_2, ... of gauge functions.
/// Truncation depth is always the consumer's argument; nothing finite is
/// stored here.
class GaugeSequence {
 public:
  static GaugeSequence constant(GaugeFunction g);
  /// p_k = p_star * k / (k+1), increasing to p_star.
  static GaugeSequence power_ladder(double p_star);
  /// exp(lambda_k |x|^{beta_k}) with lambda_k = k^{1/4} up and
  /// beta_k = beta_star * k / (k+1) up.
  static GaugeSequence exp_ladder(double beta_star);
  /// |log f_{theta_k}| along the rational enumeration of (0, inf).
  static GaugeSequence log_density_enumeration(LogDensityModel model);
  /// psi_k(x) = young(k |x|).
  static GaugeSequence young_scaled(YoungFunction young);

  GaugeFunction at(int k) const;  // k >= 1
  GaugeSeqKind kind() const { return kind_; }
  bool convex_even() const;
  std::string describe() const;

 private:
  GaugeSequence() = default;
  GaugeSeqKind kind_ = GaugeSeqKind::Constant;
  double p_star_ = 1.0;
  double beta_star_ = 1.0;
  LogDensityModel model_ = LogDensityModel::Exponential;
  std::shared_ptr<const GaugeFunction> base_;
  std::shared_ptr<const YoungFunction> young_;
};

}  // namespace wsetlab

#endif
