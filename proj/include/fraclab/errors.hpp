#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Argument outside the mathematical domain of an operation (t outside [0,T], s outside (0,1), ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sampled input that cannot be processed (non-finite values, mismatched sizes).
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weight profile whose exponent is too small for the requested derivative or integral.
class invalid_profile_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integrand detected as non-integrable (divergent partial sums, heavy tails).
class integrability_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal consistency, e.g. a memory history that does not match its weights.
class internal_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw domain_error(what);
}

}  // namespace detail
}  // namespace fraclab
