#pragma once

// Arbitrary precision real and complex scalars on top of MPFR.
//
// Every arithmetic result is rounded to the calling thread's working
// precision, which is set with ScopedPrecision. Values keep the precision
// they were created with until reassigned.

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mb {

/// Binary mantissa length used by an operation. Never below double.
struct Precision {
  int bits = 256;

  static Precision of(int b) {
    if (b < 53) throw std::domain_error("precision below 53 bits");
    return Precision{b};
  }
  /// 2^(8 - bits): the relative error budget every elliptic routine honors.
  double epsilon_exponent() const { return 8.0 - bits; }
};

int working_bits();

/// Sets the thread-local working precision for the lifetime of the guard.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(int bits);
  explicit ScopedPrecision(Precision p) : ScopedPrecision(p.bits) {}
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  int saved_;
};

class Real {
 public:
  Real();
  Real(double v);
  Real(int v);
  Real(long v);
  Real(long long v);
  Real(unsigned v);
  Real(unsigned long v);
  explicit Real(std::string_view decimal);
  Real(const Real& o);
  Real(Real&& o) noexcept;
  ~Real();

  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);

  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);

  double to_double() const;
  long to_long() const;  // rounds to nearest
  bool is_zero() const;
  bool is_finite() const;
  bool is_inf() const;
  bool is_nan() const;
  int sign() const;  // -1, 0, +1
  long exponent2() const;  // binary exponent; value in [2^(e-1), 2^e)
  mpfr_prec_t bits() const;

  /// Decimal scientific notation with `digits` significant digits. ±inf as "inf"/"-inf".
  std::string str(int digits) const;
  /// Digit count matching the working precision.
  std::string str() const;

  mpfr_srcptr raw() const { return v_; }
  mpfr_ptr raw() { return v_; }

  static Real pi();
  static Real infinity(int sign = 1);
  static Real nan();

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real tan(const Real& x);
Real asin(const Real& x);
Real atan(const Real& x);
Real atan2(const Real& y, const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real hypot(const Real& x, const Real& y);
Real floor(const Real& x);
Real round(const Real& x);
Real ldexp(const Real& x, long e);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
/// 2^(-e) at working precision.
Real pow2(long e);
/// Unit roundoff 2^(1-bits) of the working precision.
Real working_epsilon();

std::ostream& operator<<(std::ostream& os, const Real& x);

/// Number of decimal digits that represent `bits` binary digits.
int decimal_digits(int bits);

}  // namespace mb
