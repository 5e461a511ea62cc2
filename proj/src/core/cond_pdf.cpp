#include "core/cond_pdf.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace nlcap {

namespace {

// Coefficient table of the expansion polynomials. Every row lists exact
// integer coefficients in descending powers of mu^2; scalar multipliers such
// as mu or -3 that sit outside a bracket are applied at the evaluation site.
// Keeping the integers in one place lets test_cond_pdf pin each entry against
// rational-point evaluations done in exact arithmetic.
constexpr double kS2X3[] = {4, 15, 225};      // * mu * x0^3
constexpr double kS2X2Y[] = {23, 255, -90};   // * x0^2 * y0
constexpr double kS2XY2[] = {20, 117, -45};   // * mu * x0 * y0^2
constexpr double kS2Y3[] = {5, 33, 30};       // * (-3) * y0^3

constexpr double kS3X4[] = {148, -12345, -24570, -806085, 396900};   // * x0^4
constexpr double kS3X3Y[] = {901, 9990, 84105, -139860};             // * (-12) * mu * x0^3 * y0
constexpr double kS3XY3[] = {385, 6198, 30165, 8820};                // * 36 * mu * x0 * y0^3
constexpr double kS3X2Y2[] = {980, 11857, 24210, -350595, -49140};   // * (-6) * x0^2 * y0^2
constexpr double kS3Y4[] = {700, 8365, 23826, -32535, -34020};       // * 3 * y0^4

constexpr double kLt2Const[] = {11, 201, -504};           // * mu^2 * QL / (140 (mu^2+3)^3 rho^2)
constexpr double kLt2X2[] = {32, 453, 8064, -6237};       // * x0^2
constexpr double kLt2XY[] = {4, 75, -1323};               // * 12 * mu * x0 * y0
constexpr double kLt2Y2[] = {7, 141, 1179, -567};         // * (-3) * y0^2

template <int N>
constexpr double poly_mu2(const double (&c)[N], double m) {
  double r = c[0];
  for (int i = 1; i < N; ++i) r = r * m + c[i];
  return r;
}

void require_positive_rho(const FluctuationCoords& c) {
  if (!(c.rho > 0.0))
    raise(errc::zero_input_signal, "expansion coefficients carry 1/rho");
}

}  // namespace

ActionExpansion action_terms(const FluctuationCoords& c, const ChannelParams& params) {
  validate(params);
  require_positive_rho(c);
  const double L = params.length_L;
  const double x = c.x0, y = c.y0, mu = c.mu, rho = c.rho;
  const double m = mu * mu;
  const double d = 1.0 + m / 3.0;

  ActionExpansion a;
  a.s1 = ((1.0 + 4.0 * m / 3.0) * x * x - 2.0 * mu * x * y + y * y) / (L * d);

  a.s2 = mu / rho / (135.0 * L * d * d * d) *
         (mu * poly_mu2(kS2X3, m) * x * x * x + poly_mu2(kS2X2Y, m) * x * x * y +
          mu * poly_mu2(kS2XY2, m) * x * y * y - 3.0 * poly_mu2(kS2Y3, m) * y * y * y);

  const double m3 = m + 3.0;
  const double m3_5 = m3 * m3 * m3 * m3 * m3;
  a.s3 = m / (2100.0 * L * m3_5 * rho * rho) *
         (poly_mu2(kS3X4, m) * x * x * x * x - 12.0 * mu * poly_mu2(kS3X3Y, m) * x * x * x * y +
          36.0 * mu * poly_mu2(kS3XY3, m) * x * y * y * y -
          6.0 * poly_mu2(kS3X2Y2, m) * x * x * y * y + 3.0 * poly_mu2(kS3Y4, m) * y * y * y * y);
  return a;
}

NormalizationExpansion normalization_terms(const FluctuationCoords& c,
                                           const ChannelParams& params) {
  validate(params);
  require_positive_rho(c);
  const double QL = params.noise_density_Q * params.length_L;
  const double x = c.x0, y = c.y0, mu = c.mu, rho = c.rho;
  const double m = mu * mu;
  const double m3 = m + 3.0;

  NormalizationExpansion n;
  n.prefactor = 1.0 / (std::numbers::pi * QL * std::sqrt(1.0 + m / 3.0));

  n.lt1 = -3.0 * mu / (5.0 * rho * m3 * m3) *
          (mu * (15.0 + m) * x - 2.0 * (5.0 - m / 3.0) * y);

  const double m3_3 = m3 * m3 * m3;
  n.lt2 = m * poly_mu2(kLt2Const, m) * QL / (140.0 * m3_3 * rho * rho) +
          m / (70.0 * m3_3 * m3 * rho * rho) *
              (poly_mu2(kLt2X2, m) * x * x + 12.0 * mu * poly_mu2(kLt2XY, m) * x * y -
               3.0 * poly_mu2(kLt2Y2, m) * y * y);
  return n;
}

CondPdfValue cond_pdf(const FluctuationCoords& c, const ChannelParams& params) {
  const ActionExpansion a = action_terms(c, params);
  const NormalizationExpansion n = normalization_terms(c, params);
  const double Q = params.noise_density_Q;
  const double QL = Q * params.length_L;

  CondPdfValue v;
  v.p0 = n.prefactor * std::exp(-a.s1 / Q);
  v.dp1 = v.p0 * (n.lt1 - a.s2 / Q);
  v.dp2 = v.p0 * (a.s2 * a.s2 / (2.0 * Q * Q) - (a.s3 + a.s2 * n.lt1) / Q + n.lt2);
  v.total = v.p0 + v.dp1 + v.dp2;
  const double kappa2 = c.x0 * c.x0 + c.y0 * c.y0;
  v.outside_perturbative_regime =
      kappa2 > 25.0 * QL || std::abs(v.dp1) + std::abs(v.dp2) > 0.5 * v.p0;
  return v;
}

CondPdfValue cond_pdf(ComplexSample X, ComplexSample Y, const ChannelParams& params) {
  return cond_pdf(to_fluctuation_coords(X, Y, params), params);
}

Covariance2 cond_pdf_moments_leading(double mu, const ChannelParams& params) {
  validate(params);
  const double half_QL = 0.5 * params.noise_density_Q * params.length_L;
  return Covariance2{half_QL, half_QL * mu, half_QL * (1.0 + 4.0 * mu * mu / 3.0)};
}

}  // namespace nlcap
