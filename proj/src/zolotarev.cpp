#include "multiband/zolotarev.hpp"

namespace mb {
namespace {

constexpr int kGuardBits = 32;

Poly even_factor(const Real& h) { return {h * h, Real(0), Real(1)}; }

bool close_rel(const ExtendedPoint& a, const ExtendedPoint& b, const Real& tol) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return abs(a.value() - b.value()) <= tol * max(Real(1), abs(b.value()));
}

}  // namespace

std::vector<Complex> ZolotarevFraction::finite_zeros() const {
  std::vector<Complex> out;
  for (const auto& h : zero_heights) {
    if (h.is_zero()) {
      out.emplace_back(Real(0), Real(0));
      continue;
    }
    out.emplace_back(Real(0), h);
    out.emplace_back(Real(0), -h);
  }
  return out;
}

std::vector<Complex> ZolotarevFraction::finite_poles() const {
  std::vector<Complex> out;
  for (const auto& h : pole_heights) {
    out.emplace_back(Real(0), h);
    out.emplace_back(Real(0), -h);
  }
  return out;
}

std::vector<Real> ZolotarevFraction::critical_points(Precision prec) const {
  ScopedPrecision guard(prec.bits + kGuardBits);
  auto q = complete_elliptic(band_modulus, prec);
  auto comp = band_modulus.complement();
  std::vector<Real> pos;
  // Edge intersections u = 1 + l tau: x = sn(K + i l K'/n) = 1 / dn(l K'/n, k').
  for (int l = 1; l < n; ++l) pos.push_back(1 / jacobi_sn_cn_dn(q.K_prime * Real(l) / Real(n), comp, prec).dn);
  std::vector<Real> out = pos;
  for (const auto& x : pos) out.push_back(-x);
  return out;
}

ZolotarevFraction build_zolotarev(int n, const Real& k, Precision prec) {
  if (n < 1) throw DomainError("Zolotarev degree must be positive");
  if (!(k > 0) || !(k < 1)) throw DomainError("Zolotarev modulus must lie in (0,1)");
  ScopedPrecision guard(prec.bits + kGuardBits);
  ZolotarevFraction Z;
  Z.n = n;
  Z.band_modulus = EllipticModulus::from_k(k, prec);
  Z.modulus = EllipticModulus::from_tau(Z.band_modulus.tau_im / Real(n), prec);

  auto q = complete_elliptic(Z.band_modulus, prec);
  auto comp = Z.band_modulus.complement();
  Z.zero_heights.push_back(Real(0));
  Poly num{Real(0), Real(1)};
  Poly den{Real(1)};
  // u = l tau maps to x = sn(i l K'/n | k) = i sc(l K'/n | k').
  for (int l = 1; l < n; ++l) {
    auto j = jacobi_sn_cn_dn(q.K_prime * Real(l) / Real(n), comp, prec);
    Real h = j.sn / j.cn;
    if (l % 2 == 0) {
      num = poly_mul(num, even_factor(h));
      Z.zero_heights.push_back(h);
    } else {
      den = poly_mul(den, even_factor(h));
      Z.pole_heights.push_back(h);
    }
  }
  Z.scale = poly_eval(den, Real(1)) / poly_eval(num, Real(1));
  Z.rational = RationalFunction(poly_scale(num, Z.scale), den);
  return Z;
}

Complex eval_parametric(const ZolotarevFraction& Z, const Complex& u, Precision prec) {
  ScopedPrecision guard(prec.bits + kGuardBits);
  const Real slack = ldexp(Real(1), -prec.bits / 2);
  const Real& height = Z.band_modulus.tau_im;
  if (abs(u.re) > 1 + slack || u.im < -slack || u.im > height * (1 + slack))
    throw DomainError("argument outside the large rectangle");
  Real small = height / Real(Z.n);
  Real t3 = theta3(small, prec);
  Real K1 = Real::pi() / 2 * t3 * t3;
  return jacobi_sn_cn_dn(Complex(K1 * u.re, K1 * u.im), Z.modulus, prec).sn;
}

TwoBandDeviation deviation(const ZolotarevFraction& Z) {
  const Real& k1 = Z.modulus.k;
  Real s = sqrt(k1);
  return {(1 - s) / (1 + s), (1 - k1) / (1 + k1)};
}

TwoBandDeviation deviation(int n, const Real& k, Precision prec) {
  if (n < 1) throw DomainError("Zolotarev degree must be positive");
  if (!(k > 0) || !(k < 1)) throw DomainError("Zolotarev modulus must lie in (0,1)");
  ScopedPrecision guard(prec.bits + kGuardBits);
  ZolotarevFraction Z;
  Z.n = n;
  Z.band_modulus = EllipticModulus::from_k(k, prec);
  Z.modulus = EllipticModulus::from_tau(Z.band_modulus.tau_im / Real(n), prec);
  return deviation(Z);
}

RationalFunction sign_approximation(const ZolotarevFraction& Z) {
  const Real& k1 = Z.modulus.k;
  Real c = 2 * k1 / (1 + k1);
  return RationalFunction(poly_scale(Z.rational.numerator(), c), Z.rational.denominator());
}

Real modulus_for_segments(const Arc& eplus, const Arc& eminus) {
  // Validates disjointness.
  BandSystem E({Band(eplus.lo, eplus.hi, BandKind::pass), Band(eminus.lo, eminus.hi, BandKind::stop)});
  Real kappa = cross_ratio(RangeSystem(eminus, eplus));
  Real r = sqrt(kappa);
  return (r - 1) / (r + 1);
}

namespace {

struct Adaptation {
  Mobius keep, flip;
};

Adaptation candidate_maps(const ZolotarevFraction& Z, const Arc& eplus, const Arc& eminus, const Real& tol) {
  Real k = modulus_for_segments(eplus, eminus);
  if (abs(k - Z.band_modulus.k) > tol * Z.band_modulus.k)
    throw DomainError("segments have modulus " + k.str(12) + " but the fraction was built for " +
                      Z.band_modulus.k.str(12));
  const Real& kb = Z.band_modulus.k;
  ExtendedPoint one(Real(1)), inv_k(1 / kb), m_one(Real(-1)), m_inv_k(-1 / kb);
  Adaptation a{Mobius::from_three_points(eplus.lo, eplus.hi, eminus.lo, one, inv_k, m_inv_k),
               Mobius::from_three_points(eplus.lo, eplus.hi, eminus.lo, inv_k, one, m_one)};
  // The fourth endpoint lands correctly up to rounding when the moduli agree.
  if (!close_rel(a.keep(eminus.hi), m_one, sqrt(tol)) || !close_rel(a.flip(eminus.hi), m_inv_k, sqrt(tol)))
    throw DomainError("segments are not projectively equivalent to the normalized frame");
  return a;
}

bool is_affine(const Mobius& T, const Real& tol) { return abs(T.c) <= tol * max(abs(T.a), abs(T.d)); }

RationalFunction compose_normalized(const ZolotarevFraction& Z, const Mobius& T, const Real& tol) {
  Mobius alpha;
  if (is_affine(T, tol)) {
    alpha = Mobius(T.a / T.d, T.b / T.d, Real(0), Real(1));
  } else {
    Real s = sqrt(abs(T.determinant()));
    alpha = Mobius(T.a / s, T.b / s, T.c / s, T.d / s);
  }
  return Z.rational.compose_right(alpha);
}

}  // namespace

RationalFunction adapt_to_segments(const ZolotarevFraction& Z, const Arc& eplus, const Arc& eminus) {
  const Real tol = ldexp(Real(1), -working_bits() / 2);
  auto a = candidate_maps(Z, eplus, eminus, tol);
  const Mobius& chosen = (is_affine(a.flip, tol) && !is_affine(a.keep, tol)) ? a.flip : a.keep;
  return compose_normalized(Z, chosen, tol);
}

RationalFunction adapt_to_segments(const ZolotarevFraction& Z, const Arc& eplus, const Arc& eminus,
                                   bool preserve_orientation) {
  const Real tol = ldexp(Real(1), -working_bits() / 2);
  auto a = candidate_maps(Z, eplus, eminus, tol);
  return compose_normalized(Z, preserve_orientation ? a.keep : a.flip, tol);
}

RationalFunction zolotarev_for_segments(int n, const Arc& eplus, const Arc& eminus, Precision prec) {
  ScopedPrecision guard(prec.bits + kGuardBits);
  Real k = modulus_for_segments(eplus, eminus);
  return adapt_to_segments(build_zolotarev(n, k, prec), eplus, eminus);
}

}  // namespace mb
