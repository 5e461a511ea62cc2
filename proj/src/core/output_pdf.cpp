#include "core/output_pdf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "core/error.hpp"

namespace nlcap {
namespace {

double fd_step(double scale) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
}

void require_nonzero_output(ComplexSample Y) {
  if (Y == ComplexSample{0.0, 0.0}) {
    raise(errc::zero_output_signal,
          "output-density correction is evaluated away from Y = 0");
  }
}

}  // namespace

Gradient2 SmoothDensity::grad(ComplexSample X) const {
  const double h = fd_step(scale());
  Gradient2 g;
  g.d1 = (value(X + ComplexSample{h, 0.0}) - value(X - ComplexSample{h, 0.0})) /
         (2.0 * h);
  g.d2 = (value(X + ComplexSample{0.0, h}) - value(X - ComplexSample{0.0, h})) /
         (2.0 * h);
  return g;
}

Hessian2 SmoothDensity::hessian(ComplexSample X) const {
  const double h = fd_step(scale());
  const double f0 = value(X);
  Hessian2 out;
  out.d11 = (value(X + ComplexSample{h, 0.0}) - 2.0 * f0 +
             value(X - ComplexSample{h, 0.0})) /
            (h * h);
  out.d22 = (value(X + ComplexSample{0.0, h}) - 2.0 * f0 +
             value(X - ComplexSample{0.0, h})) /
            (h * h);
  out.d12 = (value(X + ComplexSample{h, h}) - value(X + ComplexSample{h, -h}) -
             value(X + ComplexSample{-h, h}) +
             value(X + ComplexSample{-h, -h})) /
            (4.0 * h * h);
  return out;
}

double SmoothDensity::radial_value(double rho) const {
  return value(ComplexSample{rho, 0.0});
}

double SmoothDensity::radial_d1(double rho) const {
  const double h = fd_step(scale());
  return (radial_value(rho + h) - radial_value(rho - h)) / (2.0 * h);
}

double SmoothDensity::radial_d2(double rho) const {
  const double h = fd_step(scale());
  return (radial_value(rho + h) - 2.0 * radial_value(rho) +
          radial_value(rho - h)) /
         (h * h);
}

PolarDerivs SmoothDensity::polar_derivatives(double rho, double /*phi*/) const {
  if (!is_radial()) {
    raise(errc::missing_polar_derivatives,
          "density does not provide polar derivatives");
  }
  PolarDerivs pd;
  pd.drho = radial_d1(rho);
  pd.drho2 = radial_d2(rho);
  return pd;
}

PolarDerivs SmoothDensity::polar_from_cartesian(double rho, double phi) const {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const ComplexSample X{rho * c, rho * s};
  const Gradient2 g = grad(X);
  const Hessian2 h = hessian(X);
  PolarDerivs pd;
  pd.drho = c * g.d1 + s * g.d2;
  pd.dphi = rho * (c * g.d2 - s * g.d1);
  pd.drho2 = c * c * h.d11 + 2.0 * s * c * h.d12 + s * s * h.d22;
  pd.dphi2 = -rho * (c * g.d1 + s * g.d2) +
             rho * rho *
                 (s * s * h.d11 - 2.0 * s * c * h.d12 + c * c * h.d22);
  pd.dphidrho = c * g.d2 - s * g.d1 +
                rho * (-s * c * h.d11 + (c * c - s * s) * h.d12 +
                       s * c * h.d22);
  return pd;
}

IsotropicGaussian::IsotropicGaussian(double sigma2) : sigma2_(sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    raise(errc::invalid_argument,
          "IsotropicGaussian requires sigma2 > 0, got " +
              std::to_string(sigma2));
  }
}

double IsotropicGaussian::value(ComplexSample X) const {
  return std::exp(-std::norm(X) / sigma2_) / (std::numbers::pi * sigma2_);
}

double IsotropicGaussian::scale() const { return std::sqrt(sigma2_); }

Gradient2 IsotropicGaussian::grad(ComplexSample X) const {
  const double f = value(X);
  return {-2.0 * X.real() / sigma2_ * f, -2.0 * X.imag() / sigma2_ * f};
}

Hessian2 IsotropicGaussian::hessian(ComplexSample X) const {
  const double f = value(X);
  const double x = X.real();
  const double y = X.imag();
  Hessian2 out;
  out.d11 = (4.0 * x * x / (sigma2_ * sigma2_) - 2.0 / sigma2_) * f;
  out.d22 = (4.0 * y * y / (sigma2_ * sigma2_) - 2.0 / sigma2_) * f;
  out.d12 = 4.0 * x * y / (sigma2_ * sigma2_) * f;
  return out;
}

double IsotropicGaussian::radial_value(double rho) const {
  return std::exp(-rho * rho / sigma2_) / (std::numbers::pi * sigma2_);
}

double IsotropicGaussian::radial_d1(double rho) const {
  return -2.0 * rho / sigma2_ * radial_value(rho);
}

double IsotropicGaussian::radial_d2(double rho) const {
  return (4.0 * rho * rho / (sigma2_ * sigma2_) - 2.0 / sigma2_) *
         radial_value(rho);
}

AnisotropicGaussian::AnisotropicGaussian(double a11, double a12, double a22)
    : a11_(a11), a12_(a12), a22_(a22) {
  const double det = a11 * a22 - a12 * a12;
  if (!(a11 > 0.0) || !(det > 0.0)) {
    raise(errc::invalid_argument,
          "AnisotropicGaussian requires a positive definite form");
  }
  norm_ = std::sqrt(det) / std::numbers::pi;
  const double half_tr = 0.5 * (a11 + a22);
  const double disc =
      std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
  scale_ = 1.0 / std::sqrt(half_tr - disc);
}

double AnisotropicGaussian::value(ComplexSample X) const {
  const double x = X.real();
  const double y = X.imag();
  const double q = a11_ * x * x + 2.0 * a12_ * x * y + a22_ * y * y;
  return norm_ * std::exp(-q);
}

double AnisotropicGaussian::scale() const { return scale_; }

Gradient2 AnisotropicGaussian::grad(ComplexSample X) const {
  const double f = value(X);
  const double qx = 2.0 * (a11_ * X.real() + a12_ * X.imag());
  const double qy = 2.0 * (a12_ * X.real() + a22_ * X.imag());
  return {-qx * f, -qy * f};
}

Hessian2 AnisotropicGaussian::hessian(ComplexSample X) const {
  const double f = value(X);
  const double qx = 2.0 * (a11_ * X.real() + a12_ * X.imag());
  const double qy = 2.0 * (a12_ * X.real() + a22_ * X.imag());
  Hessian2 out;
  out.d11 = (qx * qx - 2.0 * a11_) * f;
  out.d22 = (qy * qy - 2.0 * a22_) * f;
  out.d12 = (qx * qy - 2.0 * a12_) * f;
  return out;
}

PolarDerivs AnisotropicGaussian::polar_derivatives(double rho,
                                                   double phi) const {
  return polar_from_cartesian(rho, phi);
}

OptimalLeadingDensity::OptimalLeadingDensity(double P,
                                             const ChannelParams& params,
                                             const OptimalInputSolution& sol)
    : power_P_(P) {
  validate(params);
  if (!(P > 0.0) || !std::isfinite(P)) {
    raise(errc::invalid_argument,
          "OptimalLeadingDensity requires P > 0, got " + std::to_string(P));
  }
  const PowerPoint point = make_power_point(P, params);
  if (std::abs(point.gamma_tilde - sol.gamma_tilde) >
      1e-12 * (1.0 + std::abs(point.gamma_tilde))) {
    raise(errc::invalid_argument,
          "solution nonlinearity does not match (P, params)");
  }
  lambda0_ = sol.u / P;
  n0_ = sol.v / (std::numbers::pi * P);
  gamma_l_ = params.gamma * params.length_L;
}

void OptimalLeadingDensity::log_derivs(double rho, double* g1,
                                       double* g2) const {
  const double gl2 = gamma_l_ * gamma_l_;
  const double dd = 1.0 + gl2 * rho * rho * rho * rho / 3.0;
  const double d1 = 4.0 / 3.0 * gl2 * rho * rho * rho;
  const double d2 = 4.0 * gl2 * rho * rho;
  *g1 = -2.0 * lambda0_ * rho - 0.5 * d1 / dd;
  *g2 = -2.0 * lambda0_ - 0.5 * (d2 * dd - d1 * d1) / (dd * dd);
}

double OptimalLeadingDensity::value(ComplexSample X) const {
  return radial_value(std::abs(X));
}

double OptimalLeadingDensity::scale() const {
  return 1.0 / std::sqrt(lambda0_);
}

double OptimalLeadingDensity::radial_value(double rho) const {
  const double mu = gamma_l_ * rho * rho;
  return n0_ * std::exp(-lambda0_ * rho * rho) /
         std::sqrt(1.0 + mu * mu / 3.0);
}

double OptimalLeadingDensity::radial_d1(double rho) const {
  double g1, g2;
  log_derivs(rho, &g1, &g2);
  return radial_value(rho) * g1;
}

double OptimalLeadingDensity::radial_d2(double rho) const {
  double g1, g2;
  log_derivs(rho, &g1, &g2);
  return radial_value(rho) * (g1 * g1 + g2);
}

Gradient2 OptimalLeadingDensity::grad(ComplexSample X) const {
  const double rho = std::abs(X);
  if (rho == 0.0) return {0.0, 0.0};
  const double d1 = radial_d1(rho);
  return {X.real() / rho * d1, X.imag() / rho * d1};
}

Hessian2 OptimalLeadingDensity::hessian(ComplexSample X) const {
  const double rho = std::abs(X);
  if (rho == 0.0) {
    const double f2 = radial_d2(0.0);
    return {f2, f2, 0.0};
  }
  const double c = X.real() / rho;
  const double s = X.imag() / rho;
  const double f1 = radial_d1(rho);
  const double f2 = radial_d2(rho);
  // f'(rho)/rho stays finite at the origin because f'(0) = 0.
  const double ratio = f1 / rho;
  Hessian2 out;
  out.d11 = c * c * f2 + s * s * ratio;
  out.d22 = s * s * f2 + c * c * ratio;
  out.d12 = s * c * (f2 - ratio);
  return out;
}

CallbackDensity::CallbackDensity(std::function<double(ComplexSample)> fn,
                                 double scale, bool radial)
    : fn_(std::move(fn)), scale_(scale), radial_(radial) {
  if (!fn_) {
    raise(errc::invalid_argument, "CallbackDensity requires a callable");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    raise(errc::invalid_argument,
          "CallbackDensity requires scale > 0, got " + std::to_string(scale));
  }
}

double CallbackDensity::value(ComplexSample X) const { return fn_(X); }

double CallbackDensity::scale() const { return scale_; }

void validate_density(const SmoothDensity& d, const num::Tolerances& tol) {
  num::Tolerances qtol = tol;
  qtol.abs_tol = std::max(tol.abs_tol, 1e-10);
  qtol.rel_tol = std::max(tol.rel_tol, 1e-9);
  qtol.max_evaluations = std::max(tol.max_evaluations, 4000000L);

  const double w = d.scale();
  double mass;
  if (d.is_radial()) {
    mass = 2.0 * std::numbers::pi *
           num::integrate_semi_infinite(
               [&](double rho) { return rho * d.radial_value(rho); }, w, qtol)
               .value;
  } else {
    // Quadrant split keeps quadrature nodes away from possible odd-looking
    // behavior at the origin and the axes.
    const double half = 10.0 * w;
    mass = 0.0;
    auto f = [&](double x, double y) { return d.value({x, y}); };
    for (const auto& r :
         {num::Rect2D{0.0, half, 0.0, half}, num::Rect2D{-half, 0.0, 0.0, half},
          num::Rect2D{-half, 0.0, -half, 0.0},
          num::Rect2D{0.0, half, -half, 0.0}}) {
      mass += num::integrate_rect_2d(f, r, qtol).value;
    }
  }
  if (!(std::abs(mass - 1.0) <= 1e-6)) {
    raise(errc::invalid_argument,
          "density mass " + std::to_string(mass) + " deviates from 1");
  }

  const double radii[] = {0.0, 0.5 * w, w, 2.0 * w, 4.0 * w};
  const double phases[] = {0.0, 1.7, 3.9, 5.1};
  for (double rho : radii) {
    const double on_axis = d.value({rho, 0.0});
    for (double phi : phases) {
      const double v = d.value(std::polar(rho, phi));
      if (!std::isfinite(v) || v < 0.0) {
        raise(errc::invalid_argument, "density is negative or non-finite");
      }
      if (d.is_radial() &&
          std::abs(v - on_axis) > 1e-10 * (on_axis + 1.0 / (w * w))) {
        raise(errc::invalid_argument,
              "density claims radial symmetry but varies with phase");
      }
    }
  }
}

double delta_pout_cartesian(const SmoothDensity& d, ComplexSample Y,
                            const ChannelParams& params) {
  validate(params);
  require_nonzero_output(Y);
  const double ql = params.noise_density_Q * params.length_L;
  const double y_norm = std::norm(Y);
  const double mu = params.gamma * params.length_L * y_norm;
  const ComplexSample yt = tilde_coords(Y, params);
  const double y1 = yt.real();
  const double y2 = yt.imag();

  const Gradient2 g = d.grad(yt);
  const Hessian2 h = d.hessian(yt);

  const double first =
      params.gamma * params.noise_density_Q * params.length_L *
      params.length_L / 3.0 *
      ((3.0 * y2 - mu * y1) * g.d1 - (3.0 * y1 + mu * y2) * g.d2 -
       0.5 * (3.0 * (y1 * y1 - y2 * y2) + 4.0 * mu * y1 * y2) * h.d12);
  const double second =
      ql / (12.0 * y_norm) *
      ((3.0 * y_norm + 6.0 * mu * y1 * y2 + 4.0 * mu * mu * y2 * y2) * h.d11 +
       (3.0 * y_norm - 6.0 * mu * y1 * y2 + 4.0 * mu * mu * y1 * y1) * h.d22);
  return first + second;
}

double delta_pout_polar(const SmoothDensity& d, ComplexSample Y,
                        const ChannelParams& params) {
  validate(params);
  require_nonzero_output(Y);
  if (!d.has_polar_derivatives()) {
    raise(errc::missing_polar_derivatives,
          "polar-form evaluation needs polar derivatives of the density");
  }
  const double ql = params.noise_density_Q * params.length_L;
  const double rho = std::abs(Y);
  const double mu = params.gamma * params.length_L * rho * rho;
  const double phi = std::arg(Y) - mu;
  const PolarDerivs pd = d.polar_derivatives(rho, phi);

  const double skew = -0.5 * params.gamma * params.noise_density_Q *
                      params.length_L * params.length_L *
                      (pd.dphi + rho * pd.dphidrho - 2.0 / 3.0 * mu * pd.dphi2);
  const double laplace =
      0.25 * ql * (pd.drho2 + pd.drho / rho + pd.dphi2 / (rho * rho));
  return skew + laplace;
}

OutputPdfValue pout(const SmoothDensity& d, ComplexSample Y,
                    const ChannelParams& params) {
  validate(params);
  const double ql = params.noise_density_Q * params.length_L;
  OutputPdfValue out;
  out.leading = d.value(tilde_coords(Y, params));

  const double a = std::abs(Y);
  if (a < 1e-6 * d.scale()) {
    if (d.is_radial()) {
      // Small-radius limit of (QL/4)(f'' + f'/rho); at rho = 0 the two
      // terms coincide.
      out.correction =
          (a == 0.0)
              ? 0.5 * ql * d.radial_d2(0.0)
              : 0.25 * ql * (d.radial_d2(a) + d.radial_d1(a) / a);
    } else {
      out.correction = delta_pout_polar(d, Y, params);
    }
  } else {
    out.correction = delta_pout_cartesian(d, Y, params);
  }
  out.total = out.leading + out.correction;
  return out;
}

}  // namespace nlcap
