#pragma once

#include <cmath>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace qsl {

namespace mp = boost::multiprecision;

/// Runtime-precision binary floating point (MPFR), expression templates off so
/// it drops into generic code like a builtin type.
using HighReal = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

/// Exact rational (GMP), always in reduced form with positive denominator.
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
using BigInt = mp::number<mp::gmp_int, mp::et_off>;

inline unsigned bits_to_digits10(int bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

/// Sets the default HighReal precision for the lifetime of the guard.
/// Every HighReal created inside the scope carries at least that precision.
class PrecisionGuard {
public:
  explicit PrecisionGuard(int bits) : saved_(HighReal::default_precision()) {
    HighReal::default_precision(bits_to_digits10(bits));
  }
  ~PrecisionGuard() { HighReal::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
  unsigned saved_;
};

/// Exact rational value of a binary64 number.
inline Rational exact(double x) { return Rational(x); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const HighReal& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

}  // namespace qsl
