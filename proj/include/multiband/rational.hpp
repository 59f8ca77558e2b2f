#pragma once

// Real rational functions R = N / D of a formal degree n, stored as two
// coefficient vectors of length n + 1 (ascending powers, zero padded).

#include <string>

#include "multiband/polynomial.hpp"
#include "multiband/projective.hpp"

namespace mb {

class RationalFunction {
 public:
  RationalFunction() : num_{Real(0)}, den_{Real(1)} {}
  /// Pads both vectors to a common length; the formal degree is that length minus one.
  RationalFunction(Poly num, Poly den);

  static RationalFunction constant(const Real& c) { return RationalFunction({c}, {Real(1)}); }
  static RationalFunction from_mobius(const Mobius& T);

  int degree() const { return static_cast<int>(num_.size()) - 1; }
  /// Degree after dropping leading coefficients below rel_tol of the largest.
  int exact_degree(const Real& rel_tol) const;

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }

  /// Real evaluation; a vanishing denominator yields +inf.
  Real operator()(const Real& x) const;
  Complex operator()(const Complex& x) const;
  ExtendedPoint operator()(const ExtendedPoint& x) const;
  ExtendedPoint at_infinity() const;

  /// R'(x) at a finite point.
  Real derivative(const Real& x) const;
  /// N' D - N D', the numerator of R'.
  Poly wronskian() const;

  /// R o T (substitution); the formal degree is preserved.
  RationalFunction compose_right(const Mobius& T) const;
  /// B o R (post-composition with values).
  RationalFunction compose_left(const Mobius& B) const;
  /// Scales numerator and denominator jointly so that the largest coefficient has modulus one.
  RationalFunction normalized() const;

 private:
  Poly num_;
  Poly den_;
};

}  // namespace mb
