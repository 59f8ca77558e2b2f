#include "multiband/elliptic.hpp"

namespace mb {
namespace {

constexpr int kGuardBits = 32;

int internal_bits(Precision prec) { return prec.bits + kGuardBits; }

void require_modulus(const Real& k) {
  if (!(k > 0) || !(k < 1)) throw DomainError("elliptic modulus must lie in (0,1)");
}

Real nome(const Real& tau_im) { return exp(-Real::pi() * tau_im); }

}  // namespace

EllipticModulus EllipticModulus::from_k(const Real& k, Precision prec) {
  require_modulus(k);
  ScopedPrecision guard(internal_bits(prec));
  return from_k_pair(k, sqrt((1 - k) * (1 + k)), prec);
}

EllipticModulus EllipticModulus::from_k_pair(const Real& k, const Real& kp, Precision prec) {
  require_modulus(k);
  require_modulus(kp);
  ScopedPrecision guard(internal_bits(prec));
  EllipticModulus m{k, kp, Real(0)};
  auto q = complete_elliptic(m, prec);
  m.tau_im = q.K_prime / q.K;
  return m;
}

EllipticModulus EllipticModulus::from_tau(const Real& tau_im, Precision prec) {
  if (!(tau_im > 0)) throw DomainError("tau must have positive imaginary part");
  ScopedPrecision guard(internal_bits(prec));
  EllipticModulus m;
  m.tau_im = tau_im;
  if (tau_im >= 1) {
    Real t3 = theta3(tau_im, prec);
    Real t2 = theta2(tau_im, prec);
    Real t4 = theta4(tau_im, prec);
    m.k = (t2 * t2) / (t3 * t3);
    m.k_complement = (t4 * t4) / (t3 * t3);
  } else {
    // Imaginary transformation tau -> -1/tau keeps the nome small.
    Real dual = 1 / tau_im;
    Real t3 = theta3(dual, prec);
    Real t2 = theta2(dual, prec);
    Real t4 = theta4(dual, prec);
    m.k_complement = (t2 * t2) / (t3 * t3);
    m.k = (t4 * t4) / (t3 * t3);
  }
  return m;
}

EllipticModulus EllipticModulus::complement() const { return {k_complement, k, 1 / tau_im}; }

std::vector<std::pair<Real, Real>> agm_iterates(const Real& a0, const Real& b0, Precision prec) {
  if (!(a0 > 0) || !(b0 > 0)) throw DomainError("agm requires positive arguments");
  ScopedPrecision guard(internal_bits(prec));
  Real a = a0, b = b0;
  std::vector<std::pair<Real, Real>> out;
  out.emplace_back(a, b);
  const Real tol = ldexp(Real(1), -internal_bits(prec) + 2);
  for (int it = 0; it < 10000; ++it) {
    if (abs(a - b) <= tol * a) break;
    Real an = (a + b) / 2;
    Real bn = sqrt(a * b);
    a = std::move(an);
    b = std::move(bn);
    out.emplace_back(a, b);
  }
  return out;
}

Real agm(const Real& a, const Real& b, Precision prec) {
  auto it = agm_iterates(a, b, prec);
  ScopedPrecision guard(internal_bits(prec));
  return (it.back().first + it.back().second) / 2;
}

QuarterPeriods complete_elliptic(const Real& k, Precision prec) {
  require_modulus(k);
  ScopedPrecision guard(internal_bits(prec));
  return complete_elliptic(EllipticModulus{k, sqrt((1 - k) * (1 + k)), Real(0)}, prec);
}

QuarterPeriods complete_elliptic(const EllipticModulus& m, Precision prec) {
  require_modulus(m.k);
  require_modulus(m.k_complement);
  ScopedPrecision guard(internal_bits(prec));
  Real half_pi = Real::pi() / 2;
  return {half_pi / agm(Real(1), m.k_complement, prec), half_pi / agm(Real(1), m.k, prec)};
}

Real theta3(const Real& tau_im, Precision prec) {
  if (!(tau_im > 0)) throw DomainError("theta3 requires Im tau > 0");
  ScopedPrecision guard(internal_bits(prec));
  Real q = nome(tau_im);
  Real sum(1);
  const Real tol = ldexp(Real(1), -internal_bits(prec));
  for (long n = 1;; ++n) {
    Real term = pow(q, n * n);
    sum += 2 * term;
    if (term < tol) break;
  }
  return sum;
}

Real theta4(const Real& tau_im, Precision prec) {
  if (!(tau_im > 0)) throw DomainError("theta4 requires Im tau > 0");
  ScopedPrecision guard(internal_bits(prec));
  Real q = nome(tau_im);
  Real sum(1);
  const Real tol = ldexp(Real(1), -internal_bits(prec));
  for (long n = 1;; ++n) {
    Real term = pow(q, n * n);
    sum += (n % 2 ? -2 : 2) * term;
    if (term < tol) break;
  }
  return sum;
}

Real theta2(const Real& tau_im, Precision prec) {
  if (!(tau_im > 0)) throw DomainError("theta2 requires Im tau > 0");
  ScopedPrecision guard(internal_bits(prec));
  Real q = nome(tau_im);
  Real sum(0);
  const Real tol = ldexp(Real(1), -internal_bits(prec));
  for (long n = 0;; ++n) {
    Real term = pow(q, n * (n + 1));
    sum += term;
    if (term < tol) break;
  }
  return 2 * sqrt(sqrt(q)) * sum;
}

JacobiReal jacobi_sn_cn_dn(const Real& u, const EllipticModulus& m, Precision prec) {
  require_modulus(m.k);
  ScopedPrecision guard(internal_bits(prec));
  const Real tol = ldexp(Real(1), -internal_bits(prec));

  // Descending AGM sequence a_n, c_n.
  std::vector<Real> a{Real(1)}, c{m.k};
  Real b = m.k_complement;
  while (abs(c.back()) > tol && a.size() < 200) {
    Real an = (a.back() + b) / 2;
    Real cn = (a.back() - b) / 2;
    b = sqrt(a.back() * b);
    a.push_back(std::move(an));
    c.push_back(std::move(cn));
  }
  const size_t n = a.size() - 1;
  Real phi = ldexp(a[n] * u, static_cast<long>(n));
  Real phi_next = phi;
  for (size_t j = n; j >= 1; --j) {
    phi_next = phi;
    phi = (phi + asin(c[j] / a[j] * sin(phi))) / 2;
  }
  JacobiReal r;
  r.sn = sin(phi);
  r.cn = cos(phi);
  if (n == 0 || abs(r.cn) < Real(1e-3)) {
    r.dn = sqrt(1 - m.k * m.k * r.sn * r.sn);
  } else {
    r.dn = r.cn / cos(phi_next - phi);
  }
  return r;
}

JacobiReal jacobi_sn_cn_dn(const Real& u, const Real& k, Precision prec) {
  return jacobi_sn_cn_dn(u, EllipticModulus::from_k(k, prec), prec);
}

JacobiComplex jacobi_sn_cn_dn(const Complex& u, const EllipticModulus& m, Precision prec) {
  require_modulus(m.k);
  ScopedPrecision guard(internal_bits(prec));
  auto q = complete_elliptic(m, prec);

  // Poles sit at 2jK + i(2l+1)K'.
  Real two_k = 2 * q.K, two_kp = 2 * q.K_prime;
  Real dx = u.re - two_k * round(u.re / two_k);
  Real dy = u.im - q.K_prime - two_kp * round((u.im - q.K_prime) / two_kp);
  Real threshold = ldexp(Real(1), -prec.bits / 2) * max(Real(1), q.K);
  if (hypot(dx, dy) < threshold) throw PoleError("sn/cn/dn evaluated at a lattice pole");

  auto re = jacobi_sn_cn_dn(u.re, m, prec);
  if (u.im.is_zero()) return {Complex(re.sn), Complex(re.cn), Complex(re.dn)};
  auto im = jacobi_sn_cn_dn(u.im, m.complement(), prec);
  const Real& s = re.sn;
  const Real& c = re.cn;
  const Real& d = re.dn;
  const Real& s1 = im.sn;
  const Real& c1 = im.cn;
  const Real& d1 = im.dn;
  Real k2 = m.k * m.k;
  Real delta = c1 * c1 + k2 * s * s * s1 * s1;
  JacobiComplex r;
  r.sn = Complex(s * d1 / delta, c * d * s1 * c1 / delta);
  r.cn = Complex(c * c1 / delta, -s * d * s1 * d1 / delta);
  r.dn = Complex(d * c1 * d1 / delta, -k2 * s * c * s1 / delta);
  return r;
}

JacobiComplex jacobi_sn_cn_dn(const Complex& u, const Real& k, Precision prec) {
  return jacobi_sn_cn_dn(u, EllipticModulus::from_k(k, prec), prec);
}

Complex rectangle_map(const Complex& u, const Real& tau_im, Precision prec) {
  ScopedPrecision guard(internal_bits(prec));
  const Real slack = ldexp(Real(1), -prec.bits / 2);
  if (abs(u.re) > 1 + slack || u.im < -slack || u.im > tau_im * (1 + slack))
    throw DomainError("argument outside the rectangle");
  auto m = EllipticModulus::from_tau(tau_im, prec);
  Real t3 = theta3(tau_im, prec);
  Real K = Real::pi() / 2 * t3 * t3;
  return jacobi_sn_cn_dn(Complex(K * u.re, K * u.im), m, prec).sn;
}

}  // namespace mb
