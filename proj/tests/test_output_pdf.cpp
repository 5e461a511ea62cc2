#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/cond_pdf.hpp"
#include "core/error.hpp"
#include "core/output_pdf.hpp"

using namespace nlcap;

namespace {

ChannelParams params_for(double gamma_tilde, double Q = 1e-3) {
  return ChannelParams{std::sqrt(3.0) * gamma_tilde, Q, 1.0};
}

// Density with all derivatives identically zero.
struct ConstantDensity : SmoothDensity {
  double value(ComplexSample) const override { return 0.25; }
  double scale() const override { return 1.0; }
  bool has_polar_derivatives() const override { return true; }
  PolarDerivs polar_derivatives(double, double) const override { return {}; }
};

double diffusion_term(const SmoothDensity& d, double rho, double ql) {
  return 0.25 * ql * (d.radial_d2(rho) + d.radial_d1(rho) / rho);
}

}  // namespace

TEST_CASE("linear channel reduces to the Gaussian diffusion term") {
  const ChannelParams params{0.0, 2e-3, 1.0};
  const double ql = params.noise_density_Q * params.length_L;
  const double sigma2 = 1.7;
  const IsotropicGaussian d(sigma2);

  for (double rho : {0.2, 0.8, 1.5, 3.0}) {
    for (double phi : {0.0, 1.1, 2.9, 4.6}) {
      const ComplexSample Y = std::polar(rho, phi);
      const double laplacian = d.value(Y) * 4.0 / sigma2 *
                               (std::norm(Y) / sigma2 - 1.0);
      const double expected = 0.25 * ql * laplacian;
      CHECK(delta_pout_cartesian(d, Y, params) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("radial density reduces to the diffusion term at any nonlinearity") {
  const double P = 1.0;
  for (double gt : {0.3, 1.0, 4.0}) {
    const ChannelParams params = params_for(gt);
    const double ql = params.noise_density_Q * params.length_L;
    const OptimalLeadingDensity d(P, params, solve_leading(gt));
    for (double rho : {0.05, 0.4, 1.0, 1.6, 2.2}) {
      for (double phi : {0.5, 2.3, 5.7}) {
        CAPTURE(gt);
        CAPTURE(rho);
        const ComplexSample Y = std::polar(rho, phi);
        const double cart = delta_pout_cartesian(d, Y, params);
        const double radial = diffusion_term(d, rho, ql);
        const double size = ql * (std::abs(d.radial_d2(rho)) +
                                  std::abs(d.radial_d1(rho) / rho) +
                                  d.radial_value(rho) / P);
        CHECK(std::abs(cart - radial) <= 1e-12 * size);
      }
    }
  }
}

TEST_CASE("cartesian and polar forms agree on an anisotropic density") {
  const ChannelParams params = params_for(1.0);
  const double ql = params.noise_density_Q * params.length_L;
  const AnisotropicGaussian d(1.3, 0.35, 0.8);

  for (double rho : {0.2, 0.7, 1.3, 2.0}) {
    for (double phi : {0.3, 2.1, 4.4}) {
      const ComplexSample Y = std::polar(rho, phi);
      const double cart = delta_pout_cartesian(d, Y, params);
      const double polar = delta_pout_polar(d, Y, params);
      CHECK(std::abs(cart - polar) <= 1e-10 * std::max(ql, std::abs(cart)));
    }
  }
}

TEST_CASE("constant density has zero correction") {
  const ChannelParams params = params_for(1.0);
  const ConstantDensity d;
  const ComplexSample Y{0.8, -0.3};
  CHECK(delta_pout_cartesian(d, Y, params) == 0.0);
  CHECK(delta_pout_polar(d, Y, params) == 0.0);
}

TEST_CASE("agreement with the brute-force convolution of the channel pdf") {
  // P_out(Y) = integral of d(X) * p(Y|X) over X equals d(Y_tilde) plus the
  // O(Q) correction; extract the linear-in-Q part by Richardson and compare.
  const AnisotropicGaussian d(1.1, 0.25, 0.9);
  const ComplexSample Y{0.9, -0.4};
  const double q0 = 2e-3;

  auto residual = [&](double Q) {
    const ChannelParams params = params_for(0.5, Q);
    const ComplexSample yt = tilde_coords(Y, params);
    const double mu = params.gamma * params.length_L * std::norm(Y);
    const double spread = std::sqrt(Q * params.length_L *
                                    (1.0 + 4.0 * mu * mu / 3.0));
    const double half = 14.0 * spread;
    const num::Rect2D box{yt.real() - half, yt.real() + half,
                          yt.imag() - half, yt.imag() + half};
    const num::Tolerances tol{1e-11, 1e-11, 6000000};
    const double conv =
        num::integrate_rect_2d(
            [&](double x1, double x2) {
              const ComplexSample X{x1, x2};
              return d.value(X) * cond_pdf(X, Y, params).total;
            },
            box, tol)
            .value;
    return conv - d.value(yt);
  };

  const double f1 = residual(q0);
  const double f2 = residual(q0 / 2.0);

  // First-order scaling in Q.
  const double slope = std::log2(f1 / f2);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.1));

  // Richardson extrapolation removes the O(Q^2) contamination.
  const double extrapolated = 2.0 * f2 - f1;
  const double analytic = delta_pout_cartesian(d, Y, params_for(0.5, q0));
  CHECK(extrapolated == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("correction carries no probability mass") {
  SUBCASE("radial density") {
    const double P = 1.0;
    const ChannelParams params = params_for(1.0);
    const OptimalLeadingDensity d(P, params, solve_leading(1.0));
    const num::Tolerances tol{1e-10, 1e-10, 2000000};
    const double mass =
        2.0 * std::numbers::pi *
        num::integrate_semi_infinite(
            [&](double rho) {
              return rho * delta_pout_cartesian(d, {rho, 0.0}, params);
            },
            d.scale(), tol)
            .value;
    CHECK(std::abs(mass) < 1e-6);
  }

  SUBCASE("anisotropic density") {
    const ChannelParams params = params_for(0.5);
    const AnisotropicGaussian d(1.1, 0.25, 0.9);
    const num::Tolerances tol{1e-9, 1e-9, 6000000};
    const double half = 10.0;
    double mass = 0.0;
    auto f = [&](double x, double y) {
      return delta_pout_cartesian(d, {x, y}, params);
    };
    for (const auto& r :
         {num::Rect2D{0.0, half, 0.0, half}, num::Rect2D{-half, 0.0, 0.0, half},
          num::Rect2D{-half, 0.0, -half, 0.0},
          num::Rect2D{0.0, half, -half, 0.0}}) {
      mass += num::integrate_rect_2d(f, r, tol).value;
    }
    CHECK(std::abs(mass) < 1e-6);
  }
}

TEST_CASE("finite-difference adapter") {
  const double sigma2 = 1.3;
  const IsotropicGaussian exact(sigma2);
  const CallbackDensity wrapped(
      [&](ComplexSample X) { return exact.value(X); }, std::sqrt(sigma2),
      false);

  const ComplexSample X{0.6, -0.9};
  const auto ga = exact.grad(X);
  const auto gn = wrapped.grad(X);
  const auto ha = exact.hessian(X);
  const auto hn = wrapped.hessian(X);
  const double ref = exact.value(X) / sigma2;
  CHECK(std::abs(gn.d1 - ga.d1) < 1e-8 * ref);
  CHECK(std::abs(gn.d2 - ga.d2) < 1e-8 * ref);
  CHECK(std::abs(hn.d11 - ha.d11) < 1e-4 * ref / sigma2);
  CHECK(std::abs(hn.d22 - ha.d22) < 1e-4 * ref / sigma2);
  CHECK(std::abs(hn.d12 - ha.d12) < 1e-4 * ref / sigma2);

  const ChannelParams params = params_for(1.0);
  const ComplexSample Y{1.1, 0.4};
  CHECK(delta_pout_cartesian(wrapped, Y, params) ==
        doctest::Approx(delta_pout_cartesian(exact, Y, params))
            .epsilon(1e-4));

  // Plain value callbacks cannot serve the polar form.
  try {
    delta_pout_polar(wrapped, Y, params);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::missing_polar_derivatives);
  }

  // A radial callback gains polar support through its profile.
  const CallbackDensity radial(
      [&](ComplexSample X2) { return exact.value(X2); }, std::sqrt(sigma2),
      true);
  CHECK(delta_pout_polar(radial, Y, params) ==
        doctest::Approx(delta_pout_polar(exact, Y, params)).epsilon(1e-4));
}

TEST_CASE("output density near the origin") {
  const double P = 1.0;
  const ChannelParams params = params_for(1.0);
  const double ql = params.noise_density_Q * params.length_L;
  const OptimalLeadingDensity d(P, params, solve_leading(1.0));

  const auto at_zero = pout(d, {0.0, 0.0}, params);
  CHECK(at_zero.leading == doctest::Approx(d.radial_value(0.0)).epsilon(1e-14));
  CHECK(at_zero.correction ==
        doctest::Approx(0.5 * ql * d.radial_d2(0.0)).epsilon(1e-14));
  CHECK(at_zero.total == at_zero.leading + at_zero.correction);

  // Continuity across the small-radius guard at 1e-6 * scale.
  const double guard = 1e-6 * d.scale();
  const auto inside = pout(d, {0.99 * guard, 0.0}, params);
  const auto outside = pout(d, {1.01 * guard, 0.0}, params);
  CHECK(inside.correction ==
        doctest::Approx(outside.correction).epsilon(1e-9));

  // Non-radial densities cannot be evaluated at Y = 0 exactly.
  const AnisotropicGaussian skewed(1.1, 0.25, 0.9);
  try {
    pout(skewed, {0.0, 0.0}, params);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::zero_output_signal);
  }
}

TEST_CASE("output density in the weak-noise linear limit") {
  const IsotropicGaussian d(1.0);
  const ComplexSample Y{0.7, 0.2};
  double prev = 1.0;
  for (double Q : {1e-3, 1e-4, 1e-5}) {
    const ChannelParams params{0.0, Q, 1.0};
    const auto v = pout(d, Y, params);
    CHECK(v.leading == doctest::Approx(d.value(Y)).epsilon(1e-14));
    const double gap = std::abs(v.total - d.value(Y));
    CHECK(gap < 0.2 * prev);
    prev = gap;
  }

  // The correction is exactly linear in Q at fixed geometry.
  const ChannelParams pa{0.0, 1e-3, 1.0};
  ChannelParams pb = pa;
  pb.noise_density_Q *= 0.5;
  CHECK(delta_pout_cartesian(d, Y, pa) ==
        doctest::Approx(2.0 * delta_pout_cartesian(d, Y, pb))
            .epsilon(1e-13));
}

TEST_CASE("density registration checks") {
  CHECK_NOTHROW(validate_density(IsotropicGaussian(2.0)));
  CHECK_NOTHROW(validate_density(AnisotropicGaussian(1.3, 0.35, 0.8)));
  const ChannelParams params = params_for(1.0);
  CHECK_NOTHROW(
      validate_density(OptimalLeadingDensity(1.0, params, solve_leading(1.0))));

  const IsotropicGaussian g(1.0);
  CHECK_THROWS_AS(
      validate_density(CallbackDensity(
          [&](ComplexSample X) { return 0.9 * g.value(X); }, 1.0, false)),
      Error);

  const AnisotropicGaussian aniso(1.5, 0.4, 0.7);
  CHECK_THROWS_AS(
      validate_density(CallbackDensity(
          [&](ComplexSample X) { return aniso.value(X); }, 1.0, true)),
      Error);

  CHECK_THROWS_AS(IsotropicGaussian(-1.0), Error);
  CHECK_THROWS_AS(AnisotropicGaussian(1.0, 1.1, 1.0), Error);
  CHECK_THROWS_AS(CallbackDensity(nullptr, 1.0, false), Error);
}
