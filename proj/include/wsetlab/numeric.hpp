#ifndef WSETLAB_NUMERIC_HPP
#define WSETLAB_NUMERIC_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace wsetlab {
namespace num {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
  // Set when panel totals blow past the divergence guard; the value is
  // then a lower bound, not an estimate.
  bool diverged = false;
  std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod 15(7) on a finite interval. `breakpoints` seeds
/// extra initial panel boundaries (useful for kinks and indicator edges).
QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol = 1e-10, double rel_tol = 1e-8,
                     std::size_t max_panels = 4000,
                     const std::vector<double>& breakpoints = {});

/// Integral over (-inf, inf), (a, inf) or (-inf, b) via the x = tan(u)
/// substitution. Pass infinities for the open ends.
QuadResult integrate_line(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-10,
                          double rel_tol = 1e-8,
                          std::size_t max_panels = 4000,
                          const std::vector<double>& breakpoints = {});

/// Bisection for f(x) = 0 on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol = 1e-10, int max_iter = 200);

/// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
/// (false .. false true .. true). Returns hi-side estimate within tol.
double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double tol = 1e-9, int max_iter = 200);

double normal_cdf(double z);
/// Inverse standard normal cdf (Acklam's approximation plus one Halley
/// polish step; relative error below 1e-14 away from the extreme tails).
double normal_quantile(double u);

/// Regularized lower incomplete gamma P(kappa, x).
double gamma_p(double kappa, double x);

/// Symmetric eigendecomposition by cyclic Jacobi; A is n*n row-major.
/// Returns eigenvalues; V (row-major) gets the orthonormal eigenvectors
/// as columns.
std::vector<double> jacobi_eigen(std::vector<double> a, int n,
                                 std::vector<double>& v);

}  // namespace num
}  // namespace wsetlab

#endif
