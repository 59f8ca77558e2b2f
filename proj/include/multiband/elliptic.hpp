#pragma once

// Elliptic special functions at configurable precision.
//
// Conventions: modulus k in (0,1), complementary k' = sqrt(1 - k^2),
// quarter periods K = K(k), K' = K(k'), lattice parameter tau = i K'/K.
// sn/cn/dn for real arguments use the AGM (descending Landen) scheme;
// complex arguments go through the Jacobi imaginary transformation.

#include <vector>

#include "multiband/complex.hpp"
#include "multiband/errors.hpp"

namespace mb {

struct EllipticModulus {
  Real k;
  Real k_complement;
  Real tau_im;  // tau = i * tau_im, tau_im = K'/K > 0

  /// From k alone; k' is computed as sqrt(1 - k^2).
  static EllipticModulus from_k(const Real& k, Precision prec);
  /// From both k and k', used when k is close to 1 and 1 - k must stay exact.
  static EllipticModulus from_k_pair(const Real& k, const Real& k_complement, Precision prec);
  /// From tau = i * tau_im via theta-constant quotients.
  static EllipticModulus from_tau(const Real& tau_im, Precision prec);

  EllipticModulus complement() const;
};

struct QuarterPeriods {
  Real K;
  Real K_prime;
};

/// Arithmetic-geometric mean. Throws DomainError unless a, b > 0.
Real agm(const Real& a, const Real& b, Precision prec);

/// The (a_n, b_n) iterates of the AGM, ending at convergence.
std::vector<std::pair<Real, Real>> agm_iterates(const Real& a, const Real& b, Precision prec);

/// K(k) and K(k'). Throws DomainError unless 0 < k < 1.
QuarterPeriods complete_elliptic(const Real& k, Precision prec);
QuarterPeriods complete_elliptic(const EllipticModulus& m, Precision prec);

/// Theta constants at tau = i * tau_im (nome q = exp(-pi tau_im)).
Real theta2(const Real& tau_im, Precision prec);
Real theta3(const Real& tau_im, Precision prec);
Real theta4(const Real& tau_im, Precision prec);

struct JacobiReal {
  Real sn, cn, dn;
};

struct JacobiComplex {
  Complex sn, cn, dn;
};

JacobiReal jacobi_sn_cn_dn(const Real& u, const EllipticModulus& m, Precision prec);
JacobiReal jacobi_sn_cn_dn(const Real& u, const Real& k, Precision prec);

/// Complex argument. Throws PoleError within 2^(-bits/2) of a lattice pole
/// 2jK + i(2l+1)K'.
JacobiComplex jacobi_sn_cn_dn(const Complex& u, const EllipticModulus& m, Precision prec);
JacobiComplex jacobi_sn_cn_dn(const Complex& u, const Real& k, Precision prec);

/// Conformal map of the rectangle |Re u| <= 1, 0 <= Im u <= tau_im onto the
/// upper half-plane fixing -1, 0, 1: x(u) = sn(K u | k(tau)).
/// Throws DomainError outside the closed rectangle, PoleError at u = tau.
Complex rectangle_map(const Complex& u, const Real& tau_im, Precision prec);

}  // namespace mb
