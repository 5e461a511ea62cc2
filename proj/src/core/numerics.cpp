#include "core/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "core/error.hpp"

namespace nlcap::num {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK dqk15 table).
// kXgk holds the positive abscissae in decreasing order; entries 1, 3, 5, 7
// are the embedded 7-point Gauss nodes with weights kWg.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void validate(const Tolerances& tol) {
  if (!(tol.abs_tol >= 0.0) || !(tol.rel_tol >= 0.0) || (tol.abs_tol == 0.0 && tol.rel_tol == 0.0))
    raise(errc::invalid_argument, "tolerances must be nonnegative and not both zero");
  if (tol.max_evaluations < 100)
    raise(errc::invalid_argument, "max_evaluations must be at least 100");
}

double eval_checked(const Fn1& f, double x) {
  double y = f(x);
  if (!std::isfinite(y)) raise(errc::non_finite_integrand, "f(" + std::to_string(x) + ")");
  return y;
}

struct Panel {
  double a, b, value, err;
};

struct PanelLess {
  bool operator()(const Panel& p, const Panel& q) const { return p.err < q.err; }
};

// One Gauss-Kronrod 7/15 pass over [a, b] with the QUADPACK error heuristic:
// the raw |K15 - G7| difference is tempered by the scaled variation of the
// integrand so that smooth panels are not over-refined.
Panel gk15(const Fn1& f, double a, double b, long& evals) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);

  double fv1[7], fv2[7];
  const double fc = eval_checked(f, centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double absc = hlgth * kXgk[j];
    fv1[j] = eval_checked(f, centr - absc);
    fv2[j] = eval_checked(f, centr + absc);
    const double fsum = fv1[j] + fv2[j];
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
  }
  evals += 15;

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double ah = std::abs(hlgth);
  resabs *= ah;
  resasc *= ah;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0)
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEps)) abserr = std::max(50.0 * kEps * resabs, abserr);
  return Panel{a, b, resk * hlgth, abserr};
}

}  // namespace

QuadratureResult integrate_interval(const Fn1& f, double a, double b, const Tolerances& tol) {
  validate(tol);
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    raise(errc::invalid_argument, "integration bounds must be finite with a < b");

  long evals = 0;
  std::priority_queue<Panel, std::vector<Panel>, PanelLess> heap;
  Panel first = gk15(f, a, b, evals);
  double total = first.value;
  double toterr = first.err;
  heap.push(first);

  while (toterr > std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) {
    if (evals + 30 > tol.max_evaluations)
      raise(errc::non_convergence, "quadrature budget exhausted at error " +
                                       std::to_string(toterr));
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b))
      raise(errc::non_convergence, "panel width reached rounding limit");
    heap.pop();
    const Panel left = gk15(f, worst.a, mid, evals);
    const Panel right = gk15(f, mid, worst.b, evals);
    total += left.value + right.value - worst.value;
    toterr += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
  }
  return QuadratureResult{total, toterr, evals};
}

QuadratureResult integrate_semi_infinite(const Fn1& f, double decay_scale, const Tolerances& tol) {
  if (!std::isfinite(decay_scale) || !(decay_scale > 0.0))
    raise(errc::invalid_argument, "decay_scale must be positive and finite");
  const double c = decay_scale;
  // t = c*s/(1-s) maps s in [0,1) onto [0,inf); the Jacobian concentrates
  // panels where an integrand decaying on scale c actually varies.
  Fn1 g = [&f, c](double s) {
    const double om = 1.0 - s;
    return f(c * s / om) * c / (om * om);
  };
  return integrate_interval(g, 0.0, 1.0, tol);
}

QuadratureResult integrate_rect_2d(const Fn2& f, const Rect2D& bounds, const Tolerances& tol) {
  validate(tol);
  if (!std::isfinite(bounds.x_lo) || !std::isfinite(bounds.x_hi) || !std::isfinite(bounds.y_lo) ||
      !std::isfinite(bounds.y_hi) || !(bounds.x_lo < bounds.x_hi) || !(bounds.y_lo < bounds.y_hi))
    raise(errc::invalid_argument, "rectangle bounds must be finite and ordered");

  // Per-axis node offsets and weights, index 0..14 spanning the panel.
  static double off[15], wk[15], wg2[15];
  static const bool init = [] {
    for (int i = 0; i < 7; ++i) {
      off[i] = -kXgk[i];
      off[14 - i] = kXgk[i];
      wk[i] = wk[14 - i] = kWgk[i];
      wg2[i] = wg2[14 - i] = (i % 2 == 1) ? kWg[i / 2] : 0.0;
    }
    off[7] = 0.0;
    wk[7] = kWgk[7];
    wg2[7] = kWg[3];
    return true;
  }();
  (void)init;

  struct Panel2 {
    Rect2D r;
    double value, err;
  };
  struct Panel2Less {
    bool operator()(const Panel2& p, const Panel2& q) const { return p.err < q.err; }
  };

  auto rule = [&f](const Rect2D& r, long& evals) {
    const double cx = 0.5 * (r.x_lo + r.x_hi), hx = 0.5 * (r.x_hi - r.x_lo);
    const double cy = 0.5 * (r.y_lo + r.y_hi), hy = 0.5 * (r.y_hi - r.y_lo);
    double fv[15][15];
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) {
        const double v = f(cx + hx * off[i], cy + hy * off[j]);
        if (!std::isfinite(v)) raise(errc::non_finite_integrand, "f at 2-D quadrature node");
        fv[i][j] = v;
      }
    evals += 225;

    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) {
        resk += wk[i] * wk[j] * fv[i][j];
        resg += wg2[i] * wg2[j] * fv[i][j];
        resabs += wk[i] * wk[j] * std::abs(fv[i][j]);
      }
    const double reskh = resk * 0.25;
    double resasc = 0.0;
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) resasc += wk[i] * wk[j] * std::abs(fv[i][j] - reskh);

    const double area = hx * hy;
    resabs *= area;
    resasc *= area;
    double abserr = std::abs((resk - resg) * area);
    if (resasc != 0.0 && abserr != 0.0)
      abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    if (resabs > kTiny / (50.0 * kEps)) abserr = std::max(50.0 * kEps * resabs, abserr);
    return Panel2{r, resk * area, abserr};
  };

  long evals = 0;
  std::priority_queue<Panel2, std::vector<Panel2>, Panel2Less> heap;
  Panel2 first = rule(bounds, evals);
  double total = first.value;
  double toterr = first.err;
  heap.push(first);

  while (toterr > std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) {
    if (evals + 4 * 225 > tol.max_evaluations)
      raise(errc::non_convergence, "2-D quadrature budget exhausted at error " +
                                       std::to_string(toterr));
    const Panel2 worst = heap.top();
    const double mx = 0.5 * (worst.r.x_lo + worst.r.x_hi);
    const double my = 0.5 * (worst.r.y_lo + worst.r.y_hi);
    if (!(worst.r.x_lo < mx && mx < worst.r.x_hi && worst.r.y_lo < my && my < worst.r.y_hi))
      raise(errc::non_convergence, "rectangle reached rounding limit");
    heap.pop();
    total -= worst.value;
    toterr -= worst.err;
    const Rect2D quads[4] = {{worst.r.x_lo, mx, worst.r.y_lo, my},
                             {mx, worst.r.x_hi, worst.r.y_lo, my},
                             {worst.r.x_lo, mx, my, worst.r.y_hi},
                             {mx, worst.r.x_hi, my, worst.r.y_hi}};
    for (const Rect2D& q : quads) {
      Panel2 child = rule(q, evals);
      total += child.value;
      toterr += child.err;
      heap.push(child);
    }
  }
  return QuadratureResult{total, toterr, evals};
}

double find_root_bracketed(const Fn1& g, double lo, double hi, const Tolerances& tol) {
  validate(tol);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    raise(errc::invalid_argument, "bracket must be finite with lo < hi");

  double a = lo, b = hi;
  double fa = eval_checked(g, a), fb = eval_checked(g, b);
  long evals = 2;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    raise(errc::invalid_bracket, "g(lo) and g(hi) have the same sign");

  // Brent root bracketing: b is the current best, [b, c] always brackets.
  double c = a, fc = fa;
  double d = b - a, e = d;
  while (true) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * (tol.abs_tol + tol.rel_tol * std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (evals >= tol.max_evaluations)
      raise(errc::non_convergence, "root search budget exhausted");

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic (or secant) candidate step.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = eval_checked(g, b);
    ++evals;
  }
}

MinimumResult minimize_scalar(const Fn1& h, double lo, double hi, const Tolerances& tol) {
  validate(tol);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    raise(errc::invalid_argument, "search interval must be finite with lo < hi");

  // Brent minimization: parabolic interpolation through (x, w, v) with a
  // golden-section fallback that guarantees bracket contraction.
  const double gold = 0.3819660112501051;
  double a = lo, b = hi;
  double x = a + gold * (b - a), w = x, v = x;
  double fx = eval_checked(h, x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  long evals = 1;

  while (true) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol.rel_tol * std::abs(x) + tol.abs_tol;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) return MinimumResult{x, fx};
    if (evals >= tol.max_evaluations)
      raise(errc::non_convergence, "minimization budget exhausted");

    bool parabolic = false;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        parabolic = true;
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm > x) ? tol1 : -tol1;
      }
    }
    if (!parabolic) {
      e = (x >= xm) ? a - x : b - x;
      d = gold * e;
    }

    const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = eval_checked(h, u);
    ++evals;
    if (fu <= fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
}

}  // namespace nlcap::num
