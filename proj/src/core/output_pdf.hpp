#ifndef NLCAP_CORE_OUTPUT_PDF_HPP
#define NLCAP_CORE_OUTPUT_PDF_HPP

#include <functional>

#include "core/channel.hpp"
#include "core/input_opt.hpp"
#include "core/numerics.hpp"

namespace nlcap {

struct Gradient2 {
  double d1 = 0.0;  // d/dy1
  double d2 = 0.0;  // d/dy2
};

struct Hessian2 {
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
};

// First and second derivatives in polar coordinates (rho, phi) at a point.
struct PolarDerivs {
  double drho = 0.0;
  double dphi = 0.0;
  double drho2 = 0.0;
  double dphi2 = 0.0;
  double dphidrho = 0.0;
};

// Smooth probability density on the complex plane, in 1/mW. Implementations
// must be immutable after construction; all methods are const and thread
// safe. Derivative defaults fall back to central finite differences with
// step cbrt(eps)*scale(); override them when closed forms exist.
class SmoothDensity {
 public:
  virtual ~SmoothDensity() = default;

  virtual double value(ComplexSample X) const = 0;
  // Characteristic radial width of the density (sets finite-difference
  // steps and the small-argument guard).
  virtual double scale() const = 0;

  virtual Gradient2 grad(ComplexSample X) const;
  virtual Hessian2 hessian(ComplexSample X) const;

  // True when the density depends on |X| only.
  virtual bool is_radial() const { return false; }
  // Radial profile f(rho) and its derivatives; defaults evaluate on the
  // positive real axis (finite differences for f' and f'').
  virtual double radial_value(double rho) const;
  virtual double radial_d1(double rho) const;
  virtual double radial_d2(double rho) const;

  // Polar derivatives are opt-in: densities constructed from plain value
  // callbacks do not provide them and the polar-form evaluation reports
  // missing_polar_derivatives instead of silently differencing.
  virtual bool has_polar_derivatives() const { return is_radial(); }
  virtual PolarDerivs polar_derivatives(double rho, double phi) const;

 protected:
  // Chain rule from Cartesian grad/hessian at rho*exp(i*phi), for
  // subclasses that opt in to the polar interface.
  PolarDerivs polar_from_cartesian(double rho, double phi) const;
};

// exp(-|X|^2/sigma2)/(pi*sigma2).
class IsotropicGaussian : public SmoothDensity {
 public:
  explicit IsotropicGaussian(double sigma2);
  double value(ComplexSample X) const override;
  double scale() const override;
  Gradient2 grad(ComplexSample X) const override;
  Hessian2 hessian(ComplexSample X) const override;
  bool is_radial() const override { return true; }
  double radial_value(double rho) const override;
  double radial_d1(double rho) const override;
  double radial_d2(double rho) const override;

 private:
  double sigma2_;
};

// Normalized anisotropic Gaussian sqrt(det A)/pi * exp(-X^T A X) for a
// symmetric positive definite quadratic form A = [[a11, a12], [a12, a22]].
class AnisotropicGaussian : public SmoothDensity {
 public:
  AnisotropicGaussian(double a11, double a12, double a22);
  double value(ComplexSample X) const override;
  double scale() const override;
  Gradient2 grad(ComplexSample X) const override;
  Hessian2 hessian(ComplexSample X) const override;
  bool has_polar_derivatives() const override { return true; }
  PolarDerivs polar_derivatives(double rho, double phi) const override;

 private:
  double a11_, a12_, a22_;
  double norm_;
  double scale_;
};

// Leading-order optimal input density for average power P (radial, with
// closed-form profile derivatives).
class OptimalLeadingDensity : public SmoothDensity {
 public:
  OptimalLeadingDensity(double P, const ChannelParams& params,
                        const OptimalInputSolution& sol);
  double value(ComplexSample X) const override;
  double scale() const override;
  Gradient2 grad(ComplexSample X) const override;
  Hessian2 hessian(ComplexSample X) const override;
  bool is_radial() const override { return true; }
  double radial_value(double rho) const override;
  double radial_d1(double rho) const override;
  double radial_d2(double rho) const override;

  double power() const { return power_P_; }

 private:
  // log f and its first two radial derivatives.
  void log_derivs(double rho, double* g1, double* g2) const;

  double power_P_;
  double lambda0_;
  double n0_;
  double gamma_l_;
};

// Adapter for densities given as a plain value callback; derivatives come
// from the base-class finite differences and polar derivatives are absent.
class CallbackDensity : public SmoothDensity {
 public:
  CallbackDensity(std::function<double(ComplexSample)> fn, double scale,
                  bool radial);
  double value(ComplexSample X) const override;
  double scale() const override;
  bool is_radial() const override { return radial_; }
  bool has_polar_derivatives() const override { return radial_; }

 private:
  std::function<double(ComplexSample)> fn_;
  double scale_;
  bool radial_;
};

// Checks unit mass (within 1e-6) and, for radial densities, phase
// independence at sampled radii; throws invalid_argument on violation.
void validate_density(const SmoothDensity& d,
                      const num::Tolerances& tol = {});

struct OutputPdfValue {
  double leading = 0.0;     // input density at the back-rotated point
  double correction = 0.0;  // noise-induced O(QL) shift
  double total = 0.0;
};

// O(QL) correction to the output density at Y, evaluated from Cartesian
// derivatives of the input density at the back-rotated point
// Y*exp(-i*gamma*L*|Y|^2).
double delta_pout_cartesian(const SmoothDensity& d, ComplexSample Y,
                            const ChannelParams& params);

// Same correction assembled from polar derivatives.
double delta_pout_polar(const SmoothDensity& d, ComplexSample Y,
                        const ChannelParams& params);

// Output density P_out(Y) = d(Y_tilde) + correction. Near the origin
// (|Y| < 1e-6*scale) radial densities use the finite small-radius limit of
// the correction; other densities fall back to the polar form.
OutputPdfValue pout(const SmoothDensity& d, ComplexSample Y,
                    const ChannelParams& params);

}  // namespace nlcap

#endif  // NLCAP_CORE_OUTPUT_PDF_HPP
