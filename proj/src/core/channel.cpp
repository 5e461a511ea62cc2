#include "core/channel.hpp"

#include <cmath>

#include "core/error.hpp"

namespace nlcap {

void validate(const ChannelParams& params) {
  if (!std::isfinite(params.gamma) || params.gamma < 0.0)
    raise(errc::invalid_argument, "gamma must be finite and >= 0");
  if (!std::isfinite(params.noise_density_Q) || params.noise_density_Q <= 0.0)
    raise(errc::invalid_argument, "noise_density_Q must be finite and > 0");
  if (!std::isfinite(params.length_L) || params.length_L <= 0.0)
    raise(errc::invalid_argument, "length_L must be finite and > 0");
}

PowerPoint make_power_point(double power_P, const ChannelParams& params) {
  validate(params);
  if (!std::isfinite(power_P) || power_P <= 0.0)
    raise(errc::invalid_argument, "power_P must be finite and > 0");
  PowerPoint pp;
  pp.power_P = power_P;
  pp.snr = power_P / (params.noise_density_Q * params.length_L);
  pp.gamma_tilde = params.gamma * params.length_L * power_P / std::sqrt(3.0);
  return pp;
}

ComplexSample noiseless_output(ComplexSample X, const ChannelParams& params) {
  validate(params);
  const double mu = params.gamma * params.length_L * std::norm(X);
  return X * std::polar(1.0, mu);
}

FluctuationCoords to_fluctuation_coords(ComplexSample X, ComplexSample Y,
                                        const ChannelParams& params) {
  validate(params);
  const double rho = std::abs(X);
  if (rho == 0.0) raise(errc::zero_input_signal, "fluctuation frame undefined at |X| = 0");
  FluctuationCoords c;
  c.rho = rho;
  c.mu = params.gamma * params.length_L * rho * rho;
  const ComplexSample z = Y * std::polar(1.0, -std::arg(X) - c.mu) - rho;
  c.x0 = z.real();
  c.y0 = z.imag();
  return c;
}

ComplexSample from_fluctuation_coords(const FluctuationCoords& coords, double input_phase) {
  return (ComplexSample(coords.rho + coords.x0, coords.y0)) *
         std::polar(1.0, input_phase + coords.mu);
}

ComplexSample tilde_coords(ComplexSample Y, const ChannelParams& params) {
  validate(params);
  const double mu_out = params.gamma * params.length_L * std::norm(Y);
  return Y * std::polar(1.0, -mu_out);
}

}  // namespace nlcap
