#ifndef NLCAP_CORE_COND_PDF_HPP
#define NLCAP_CORE_COND_PDF_HPP

#include "core/channel.hpp"

namespace nlcap {

// Orders of the action governing the conditional density: s1 is the Gaussian
// quadratic form, s2 the cubic correction (odd in the coordinates, carries
// 1/rho), s3 the quartic correction (carries 1/rho^2). Units mW/km.
struct ActionExpansion {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

// Expansion of the normalization factor: prefactor is the Gaussian norm
// 1/(pi*Q*L*sqrt(1+mu^2/3)); lt1 and lt2 are the dimensionless linear and
// quadratic corrections.
struct NormalizationExpansion {
  double prefactor = 0.0;
  double lt1 = 0.0;
  double lt2 = 0.0;
};

// Conditional density split by perturbative order; total = p0 + dp1 + dp2.
// outside_perturbative_regime is a diagnostic, not an error: it flags points
// with |x0 + i*y0| > 5*sqrt(QL) or |dp1| + |dp2| > 0.5*p0.
struct CondPdfValue {
  double p0 = 0.0;
  double dp1 = 0.0;
  double dp2 = 0.0;
  double total = 0.0;
  bool outside_perturbative_regime = false;
};

// 2x2 covariance of (x0, y0) under the leading Gaussian density:
// (Q*L/2) * [[1, mu], [mu, 1 + 4*mu^2/3]].
struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

ActionExpansion action_terms(const FluctuationCoords& c, const ChannelParams& params);

NormalizationExpansion normalization_terms(const FluctuationCoords& c,
                                           const ChannelParams& params);

CondPdfValue cond_pdf(const FluctuationCoords& c, const ChannelParams& params);
CondPdfValue cond_pdf(ComplexSample X, ComplexSample Y, const ChannelParams& params);

Covariance2 cond_pdf_moments_leading(double mu, const ChannelParams& params);

}  // namespace nlcap

#endif  // NLCAP_CORE_COND_PDF_HPP
