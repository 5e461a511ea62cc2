#ifndef NLCAP_CORE_ERROR_HPP
#define NLCAP_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nlcap {

// Stable failure identities shared by the C++ core and the C API layer.
// Values are part of the shared-library ABI; append only.
enum class errc {
  ok = 0,
  invalid_argument = 1,
  zero_input_signal = 2,
  zero_output_signal = 3,
  missing_polar_derivatives = 4,
  non_convergence = 5,
  non_finite_integrand = 6,
  invalid_bracket = 7,
  negative_gamma_tilde = 8,
  domain_too_small = 9,
  degenerate_denominator = 10,
};

inline const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::ok: return "ok";
    case errc::invalid_argument: return "invalid_argument";
    case errc::zero_input_signal: return "zero_input_signal";
    case errc::zero_output_signal: return "zero_output_signal";
    case errc::missing_polar_derivatives: return "missing_polar_derivatives";
    case errc::non_convergence: return "non_convergence";
    case errc::non_finite_integrand: return "non_finite_integrand";
    case errc::invalid_bracket: return "invalid_bracket";
    case errc::negative_gamma_tilde: return "negative_gamma_tilde";
    case errc::domain_too_small: return "domain_too_small";
    case errc::degenerate_denominator: return "degenerate_denominator";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace nlcap

#endif  // NLCAP_CORE_ERROR_HPP
