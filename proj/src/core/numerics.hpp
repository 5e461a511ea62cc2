#ifndef NLCAP_CORE_NUMERICS_HPP
#define NLCAP_CORE_NUMERICS_HPP

#include <functional>

namespace nlcap::num {

// Shared accuracy/budget knobs for the routines below. A routine stops as soon
// as its internal error estimate drops below max(abs_tol, rel_tol*|result|)
// and reports non_convergence if the evaluation budget runs out first.
struct Tolerances {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  long max_evaluations = 1000000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

struct Rect2D {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

struct MinimumResult {
  double argmin = 0.0;
  double min_value = 0.0;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// Integral of f over [a, b]. Adaptive Gauss-Kronrod 7/15 with worst-panel
// bisection; deterministic for identical inputs.
QuadratureResult integrate_interval(const Fn1& f, double a, double b, const Tolerances& tol = {});

// Integral of f over [0, inf). decay_scale > 0 should match the length scale
// on which f decays; it enters through the variable change t = c*s/(1-s).
QuadratureResult integrate_semi_infinite(const Fn1& f, double decay_scale,
                                         const Tolerances& tol = {});

// Integral of f over an axis-aligned rectangle. Adaptive tensor-product
// Gauss-Kronrod 7/15 with worst-rectangle quadrisection.
QuadratureResult integrate_rect_2d(const Fn2& f, const Rect2D& bounds, const Tolerances& tol = {});

// Root of g inside [lo, hi]; g(lo) and g(hi) must have opposite signs.
// Brent's method; the result is bracketed to abs_tol + rel_tol*|root|.
double find_root_bracketed(const Fn1& g, double lo, double hi, const Tolerances& tol = {});

// Local minimum of h inside [lo, hi] by Brent's parabolic/golden-section
// search. A non-unimodal h yields some local minimum of it, not a global scan.
MinimumResult minimize_scalar(const Fn1& h, double lo, double hi, const Tolerances& tol = {});

}  // namespace nlcap::num

#endif  // NLCAP_CORE_NUMERICS_HPP
