#include "multiband/real.hpp"

#include <cmath>
#include <ostream>
#include <vector>

namespace mb {
namespace {

thread_local int g_bits = 256;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

}  // namespace

int working_bits() { return g_bits; }

ScopedPrecision::ScopedPrecision(int bits) : saved_(g_bits) {
  if (bits < 53) throw std::domain_error("precision below 53 bits");
  g_bits = bits;
}

ScopedPrecision::~ScopedPrecision() { g_bits = saved_; }

int decimal_digits(int bits) {
  return static_cast<int>(std::ceil(bits * 0.30102999566398120)) + 1;
}

Real::Real() {
  mpfr_init2(v_, g_bits);
  mpfr_set_zero(v_, 1);
}

Real::Real(double v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_d(v_, v, kRnd);
}

Real::Real(int v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_si(v_, v, kRnd);
}

Real::Real(long v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_si(v_, v, kRnd);
}

Real::Real(long long v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_si(v_, static_cast<long>(v), kRnd);
}

Real::Real(unsigned v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_ui(v_, v, kRnd);
}

Real::Real(unsigned long v) {
  mpfr_init2(v_, g_bits);
  mpfr_set_ui(v_, v, kRnd);
}

Real::Real(std::string_view decimal) {
  mpfr_init2(v_, g_bits);
  std::string s(decimal);
  if (s == "inf" || s == "+inf") {
    mpfr_set_inf(v_, 1);
  } else if (s == "-inf") {
    mpfr_set_inf(v_, -1);
  } else if (mpfr_set_str(v_, s.c_str(), 10, kRnd) != 0) {
    mpfr_clear(v_);
    throw std::invalid_argument("not a decimal number: " + s);
  }
}

Real::Real(const Real& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, kRnd);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

Real::~Real() { mpfr_clear(v_); }

Real& Real::operator=(const Real& o) {
  if (this != &o) {
    if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Real& Real::operator+=(const Real& o) { return *this = *this + o; }
Real& Real::operator-=(const Real& o) { return *this = *this - o; }
Real& Real::operator*=(const Real& o) { return *this = *this * o; }
Real& Real::operator/=(const Real& o) { return *this = *this / o; }

Real operator+(const Real& a, const Real& b) {
  Real r;
  mpfr_add(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r;
  mpfr_sub(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r;
  mpfr_mul(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r;
  mpfr_div(r.v_, a.v_, b.v_, kRnd);
  return r;
}

Real operator-(const Real& a) {
  Real r;
  mpfr_neg(r.v_, a.v_, kRnd);
  return r;
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

double Real::to_double() const { return mpfr_get_d(v_, kRnd); }
long Real::to_long() const { return mpfr_get_si(v_, kRnd); }
bool Real::is_zero() const { return mpfr_zero_p(v_) != 0; }
bool Real::is_finite() const { return mpfr_number_p(v_) != 0; }
bool Real::is_inf() const { return mpfr_inf_p(v_) != 0; }
bool Real::is_nan() const { return mpfr_nan_p(v_) != 0; }
int Real::sign() const { return mpfr_zero_p(v_) ? 0 : mpfr_sgn(v_) > 0 ? 1 : -1; }
long Real::exponent2() const { return mpfr_regular_p(v_) ? mpfr_get_exp(v_) : 0; }
mpfr_prec_t Real::bits() const { return mpfr_get_prec(v_); }

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits < 1) digits = 1;
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  int n = mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
  if (n < 0) return "nan";
  if (static_cast<size_t>(n) >= buf.size()) {
    buf.resize(static_cast<size_t>(n) + 1);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, v_);
  }
  return std::string(buf.data());
}

std::string Real::str() const { return str(decimal_digits(static_cast<int>(bits()))); }

Real Real::pi() {
  Real r;
  mpfr_const_pi(r.v_, kRnd);
  return r;
}

Real Real::infinity(int sign) {
  Real r;
  mpfr_set_inf(r.v_, sign);
  return r;
}

Real Real::nan() {
  Real r;
  mpfr_set_nan(r.v_);
  return r;
}

#define MB_UNARY(name, fn)           \
  Real name(const Real& x) {         \
    Real r;                          \
    fn(r.raw(), x.raw(), kRnd);      \
    return r;                        \
  }

MB_UNARY(abs, mpfr_abs)
MB_UNARY(sqrt, mpfr_sqrt)
MB_UNARY(exp, mpfr_exp)
MB_UNARY(log, mpfr_log)
MB_UNARY(sin, mpfr_sin)
MB_UNARY(cos, mpfr_cos)
MB_UNARY(tan, mpfr_tan)
MB_UNARY(asin, mpfr_asin)
MB_UNARY(atan, mpfr_atan)
MB_UNARY(sinh, mpfr_sinh)
MB_UNARY(cosh, mpfr_cosh)

#undef MB_UNARY

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}

Real round(const Real& x) {
  Real r;
  mpfr_round(r.raw(), x.raw());
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.raw(), y.raw(), x.raw(), kRnd);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), kRnd);
  return r;
}

Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.raw(), x.raw(), n, kRnd);
  return r;
}

Real hypot(const Real& x, const Real& y) {
  Real r;
  mpfr_hypot(r.raw(), x.raw(), y.raw(), kRnd);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, kRnd);
  return r;
}

Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real pow2(long e) { return ldexp(Real(1), -e); }

Real working_epsilon() { return pow2(g_bits - 1); }

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.str(); }

}  // namespace mb
