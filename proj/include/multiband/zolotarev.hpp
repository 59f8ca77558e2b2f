#pragma once

// Zolotarev fractions Z_n: Z_n(x_{n tau}(u)) = x_tau(u), normalized on the
// two-band frame E+ = [1, 1/k], E- = [-1/k, -1].

#include <vector>

#include "multiband/band_model.hpp"
#include "multiband/elliptic.hpp"
#include "multiband/rational.hpp"

namespace mb {

struct TwoBandDeviation {
  Real theta;
  Real mu;
};

struct ZolotarevFraction {
  int n = 1;
  /// Band modulus k (large rectangle, tau_n = i K'/K).
  EllipticModulus band_modulus;
  /// Range modulus k1 (small rectangle, tau = tau_n / n).
  EllipticModulus modulus;
  /// Zeros sit at +-i h for h in zero_heights (h = 0 is the simple zero at
  /// the origin); poles at +-i h for h in pole_heights. The remaining zero
  /// or pole is at infinity: a pole for odd n, a zero for even n.
  std::vector<Real> zero_heights;
  std::vector<Real> pole_heights;
  /// Normalization constant: Z(1) = 1.
  Real scale;
  RationalFunction rational;

  /// Zeros and poles on the projective line, infinity reported by the flag.
  std::vector<Complex> finite_zeros() const;
  std::vector<Complex> finite_poles() const;
  bool pole_at_infinity() const { return n % 2 == 1; }

  /// The 2n-2 finite critical points, positive ones ascending then their negatives.
  std::vector<Real> critical_points(Precision prec) const;
  Real operator()(const Real& x) const { return rational(x); }
  Complex operator()(const Complex& x) const { return rational(x); }
};

ZolotarevFraction build_zolotarev(int n, const Real& k, Precision prec = {});

/// x_tau(u) for u in the large rectangle Pi_{n tau}.
Complex eval_parametric(const ZolotarevFraction& Z, const Complex& u, Precision prec = {});

TwoBandDeviation deviation(int n, const Real& k, Precision prec = {});
TwoBandDeviation deviation(const ZolotarevFraction& Z);

/// Best sign approximation on +-[1, 1/k]: (2 k1 / (1 + k1)) Z_n, error mu.
RationalFunction sign_approximation(const ZolotarevFraction& Z);

/// Band modulus k of two disjoint arcs: the k with cross-ratio matching +-[1, 1/k].
Real modulus_for_segments(const Arc& eplus, const Arc& eminus);

/// Z o alpha, alpha sending eplus onto [1, 1/k] and eminus onto [-1/k, -1].
/// An affine alpha is preferred when exactly one orientation admits one.
/// Throws DomainError for overlapping arcs or a modulus mismatch.
RationalFunction adapt_to_segments(const ZolotarevFraction& Z, const Arc& eplus, const Arc& eminus);
/// Same with the orientation of alpha fixed. For odd n the pole at
/// infinity lands in the gap after eplus when alpha preserves orientation
/// and in the gap after eminus otherwise.
RationalFunction adapt_to_segments(const ZolotarevFraction& Z, const Arc& eplus, const Arc& eminus,
                                   bool preserve_orientation);

/// Degree-n Zolotarev fraction built for, and adapted to, the given arcs.
RationalFunction zolotarev_for_segments(int n, const Arc& eplus, const Arc& eminus, Precision prec = {});

}  // namespace mb
