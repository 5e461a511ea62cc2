#ifndef NLCAP_CORE_CHANNEL_HPP
#define NLCAP_CORE_CHANNEL_HPP

#include <complex>

namespace nlcap {

// Complex field amplitude of one signal sample, in sqrt(mW).
using ComplexSample = std::complex<double>;

// Fixed constants of the per-sample channel. Units: gamma in 1/(mW*km),
// noise_density_Q in mW/km, length_L in km.
struct ChannelParams {
  double gamma = 0.0;
  double noise_density_Q = 0.0;
  double length_L = 0.0;
};

// Throws invalid_argument unless gamma >= 0, Q > 0, L > 0, all finite.
void validate(const ChannelParams& params);

// Derived per-power quantities: snr = P/(Q*L) and the dimensionless
// nonlinearity gamma_tilde = gamma*L*P/sqrt(3).
struct PowerPoint {
  double power_P = 0.0;
  double snr = 0.0;
  double gamma_tilde = 0.0;
};

PowerPoint make_power_point(double power_P, const ChannelParams& params);

// Output deviation frame anchored to the noiseless trajectory of input X:
// x0 + i*y0 = Y*exp(-i*arg(X) - i*mu) - rho with rho = |X|, mu = gamma*L*rho^2.
struct FluctuationCoords {
  double x0 = 0.0;
  double y0 = 0.0;
  double mu = 0.0;
  double rho = 0.0;
};

// Channel output with the noise switched off: the pure Kerr phase rotation
// X*exp(i*mu), which preserves |X|.
ComplexSample noiseless_output(ComplexSample X, const ChannelParams& params);

// Throws zero_input_signal when |X| = 0 (the frame needs a reference phase).
FluctuationCoords to_fluctuation_coords(ComplexSample X, ComplexSample Y,
                                        const ChannelParams& params);

// Reconstructs Y from fluctuation coordinates and the input phase arg(X).
ComplexSample from_fluctuation_coords(const FluctuationCoords& coords, double input_phase);

// Y rotated back by its own accumulated Kerr phase: Y*exp(-i*mu_out) with
// mu_out = gamma*L*|Y|^2; preserves |Y|.
ComplexSample tilde_coords(ComplexSample Y, const ChannelParams& params);

}  // namespace nlcap

#endif  // NLCAP_CORE_CHANNEL_HPP
