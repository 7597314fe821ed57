#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <string>

namespace dlab {

// Arbitrary-precision real with runtime-selectable decimal precision.
// Precision is taken from Real::default_precision() at construction time,
// so numeric routines set it via PrecisionGuard before computing.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

// RAII guard: sets the default precision (decimal digits) for Reals created
// inside the scope and restores the previous value on exit.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits10) : saved_(Real::default_precision()) {
    Real::default_precision(digits10);
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

inline Real real_pi() { return boost::math::constants::pi<Real>(); }

// Scientific-notation rendering with a fixed digit count (stable across
// precision settings; used by all CSV/JSON writers for reproducible bytes).
std::string to_sci(const Real& x, int digits = 17);

}  // namespace dlab
