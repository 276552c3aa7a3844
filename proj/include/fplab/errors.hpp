#ifndef FPLAB_ERRORS_HPP
#define FPLAB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fplab {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation outside the mathematical domain (t <= 0, negative base for a
/// non-integer exponent, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A type invariant was violated at construction.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Power-law drift with q != -p/2.
class ScaleInvarianceError : public Error {
 public:
  using Error::Error;
};

/// Machine-readable reason attached to a normalizability verdict.
enum class Reason {
  accepted,
  non_integer_exponent,
  negative_exponent,
  odd_exponent,
  tail_divergence,
  nonpositive_gaussian_coefficient,
  half_line_profile,
  quadrature_divergence,
};

inline const char* reason_code(Reason r) {
  switch (r) {
    case Reason::accepted: return "accepted";
    case Reason::non_integer_exponent: return "non_integer_exponent";
    case Reason::negative_exponent: return "negative_exponent";
    case Reason::odd_exponent: return "odd_exponent";
    case Reason::tail_divergence: return "tail_divergence";
    case Reason::nonpositive_gaussian_coefficient: return "nonpositive_gaussian_coefficient";
    case Reason::half_line_profile: return "half_line_profile";
    case Reason::quadrature_divergence: return "quadrature_divergence";
  }
  return "unknown";
}

class NormalizabilityError : public Error {
 public:
  NormalizabilityError(Reason reason, const std::string& what)
      : Error(what + " [" + reason_code(reason) + "]"), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during time stepping.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fplab

#endif  // FPLAB_ERRORS_HPP
