#ifndef WSETLAB_YOUNG_HPP
#define WSETLAB_YOUNG_HPP

#include <functional>
#include <memory>
#include <string>

namespace wsetlab {

enum class Delta2 { Holds, Fails, Unknown };

/// Finite Young function: convex nondecreasing, vanishing at 0 and
/// unbounded. Powers the Orlicz-heart membership test, the Luxemburg
/// norm, and the scaled gauge family psi_k(x) = young(k|x|).
class YoungFunction {
 public:
  enum class Form { PowerOverP, Exponential, Linear, Custom };

  static YoungFunction power_over_p(double p);     // x^p / p, p >= 1
  static YoungFunction exponential(double beta);   // exp(x^beta) - 1
  static YoungFunction linear();                   // x
  static YoungFunction custom(std::function<double(double)> eval,
                              bool declared_convex, std::string label);

  Form form() const { return form_; }
  Delta2 delta2() const { return delta2_; }
  double power() const { return p_; }
  double beta() const { return beta_; }
  const std::string& label() const { return label_; }

  /// Evaluate at x >= 0 (negative x is reflected; Young functions are
  /// consumed through |.| everywhere). Saturates instead of overflowing.
  double operator()(double x) const;

  /// Smallest y >= 0 with eval(y) >= target; bisection on the grid of the
  /// declared monotone form.
  double inverse(double target) const;

 private:
  YoungFunction() = default;
  Form form_ = Form::Linear;
  Delta2 delta2_ = Delta2::Holds;
  double p_ = 1.0;
  double beta_ = 1.0;
  std::string label_;
  std::shared_ptr<const std::function<double(double)>> custom_;
};

}  // namespace wsetlab

#endif
