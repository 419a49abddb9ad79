#include "wsetlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "wsetlab/errors.hpp"

namespace wsetlab {
namespace num {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] (7-point Gauss embedded).
constexpr double kron_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kron_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b,
                 std::size_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kron_x[i];
    double fv;
    if (i == 7) {
      fv = f(c);
      kron += kron_w[i] * fv;
      gauss += gauss_w[3] * fv;
      ++evals;
    } else {
      const double f1 = f(c - dx);
      const double f2 = f(c + dx);
      evals += 2;
      kron += kron_w[i] * (f1 + f2);
      if (i % 2 == 1) gauss += gauss_w[i / 2] * (f1 + f2);
    }
  }
  kron *= h;
  gauss *= h;
  double err = std::abs(kron - gauss);
  // Sharpen the raw difference the usual way: err ~ (200*d)^{1.5}.
  if (err > 0.0) err = std::min(err, std::pow(200.0 * err, 1.5));
  if (!std::isfinite(kron)) {
    kron = 0.0;
    err = std::numeric_limits<double>::infinity();
  }
  return Panel{a, b, kron, err};
}

constexpr double divergence_guard = 1e12;

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol, double rel_tol,
                     std::size_t max_panels,
                     const std::vector<double>& breakpoints) {
  QuadResult res;
  if (!(a < b)) {
    res.converged = true;
    return res;
  }
  std::vector<double> edges{a, b};
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Panel p = eval_panel(f, edges[i], edges[i + 1], res.evaluations);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         heap.size() < max_panels) {
    Panel worst = heap.top();
    if (!(worst.error > 0.0)) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted in doubles
      total_err -= worst.error;
      continue;
    }
    Panel left = eval_panel(f, worst.a, mid, res.evaluations);
    Panel right = eval_panel(f, mid, worst.b, res.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (std::abs(total) > divergence_guard) {
      res.value = total;
      res.abs_error = total_err;
      res.diverged = true;
      return res;
    }
  }
  res.value = total;
  res.abs_error = total_err;
  res.converged =
      total_err <= std::max(abs_tol, rel_tol * std::abs(total)) * 1.000001 ||
      total_err <= std::max(abs_tol, rel_tol * std::abs(total)) + 1e-300;
  if (!std::isfinite(total)) {
    res.diverged = true;
    res.converged = false;
  }
  return res;
}

QuadResult integrate_line(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, double rel_tol,
                          std::size_t max_panels,
                          const std::vector<double>& breakpoints) {
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf)
    return integrate(f, a, b, abs_tol, rel_tol, max_panels, breakpoints);

  // x = tan(u) maps (-pi/2, pi/2) onto the line.
  auto g = [&f](double u) {
    const double t = std::tan(u);
    const double c = std::cos(u);
    const double jac = 1.0 / (c * c);
    const double fv = f(t);
    return fv == 0.0 ? 0.0 : fv * jac;
  };
  const double half_pi = std::atan2(0.0, -1.0) / 2.0;
  double ua = lo_inf ? -half_pi * (1.0 - 1e-14) : std::atan(a);
  double ub = hi_inf ? half_pi * (1.0 - 1e-14) : std::atan(b);
  std::vector<double> ubp;
  for (double x : breakpoints)
    if (std::isfinite(x)) ubp.push_back(std::atan(x));
  // Seed panels so the transition to the tails is always resolved.
  for (double x : {-1e8, -1e4, -100.0, -1.0, 0.0, 1.0, 100.0, 1e4, 1e8})
    ubp.push_back(std::atan(x));
  return integrate(g, ua, ub, abs_tol, rel_tol, max_panels, ubp);
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    fail(ErrorCode::BracketFailure, "bisect_root endpoints have equal sign");
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_threshold(const std::function<bool(double)>& pred, double lo,
                        double hi, double tol, int max_iter) {
  if (pred(lo)) return lo;
  if (!pred(hi))
    fail(ErrorCode::BracketFailure, "bisect_threshold: pred(hi) is false");
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    fail(ErrorCode::DomainError, "normal_quantile needs u in (0,1)");
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (u < plow) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - plow) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact cdf.
  const double e = normal_cdf(x) - u;
  const double pdf =
      std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::atan2(0.0, -1.0));
  if (pdf > 0.0) {
    const double w = e / pdf;
    x -= w / (1.0 + 0.5 * x * w);
  }
  return x;
}

double gamma_p(double kappa, double x) {
  if (x < 0.0 || kappa <= 0.0)
    fail(ErrorCode::DomainError, "gamma_p needs x >= 0, kappa > 0");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(kappa);
  if (x < kappa + 1.0) {
    // Series expansion.
    double ap = kappa;
    double sum = 1.0 / kappa;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + kappa * std::log(x) - lg);
  }
  // Continued fraction for Q, then P = 1 - Q.
  const double tiny = 1e-300;
  double b = x + 1.0 - kappa;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - kappa);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + kappa * std::log(x) - lg) * h;
  return 1.0 - q;
}

std::vector<double> jacobi_eigen(std::vector<double> a, int n,
                                 std::vector<double>& v) {
  v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto A = [&a, n](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * n + j];
  };
  auto V = [&v, n](int i, int j) -> double& {
    return v[static_cast<std::size_t>(i) * n + j];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = cs * akp - sn * akq;
          A(k, q) = sn * akp + cs * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = cs * apk - sn * aqk;
          A(q, k) = sn * apk + cs * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = cs * vkp - sn * vkq;
          V(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = A(i, i);
  return eig;
}

}  // namespace num
}  // namespace wsetlab
