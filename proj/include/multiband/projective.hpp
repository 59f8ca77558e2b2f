#pragma once

// The real projective line: points including infinity, linear-fractional
// maps, and charts that move infinity away from a finite point set.

#include <span>
#include <string>
#include <vector>

#include "multiband/complex.hpp"
#include "multiband/errors.hpp"

namespace mb {

class ExtendedPoint {
 public:
  ExtendedPoint() = default;
  ExtendedPoint(Real v) : value_(std::move(v)), infinite_(value_.is_inf()) {}
  ExtendedPoint(double v) : ExtendedPoint(Real(v)) {}
  ExtendedPoint(int v) : ExtendedPoint(Real(v)) {}

  static ExtendedPoint infinity() {
    ExtendedPoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const { return infinite_; }
  /// Finite coordinate; throws DomainError at infinity.
  const Real& value() const;

  /// Position on the circle in [0, pi): infinity at 0, then increasing x.
  Real circle_position() const;
  static ExtendedPoint from_circle_position(const Real& p);

  std::string str() const;
  std::string str(int digits) const;

  friend bool operator==(const ExtendedPoint& a, const ExtendedPoint& b);

 private:
  Real value_;
  bool infinite_ = false;
};

/// Cyclic order starting at infinity: infinity precedes every finite value.
bool cyclic_less(const ExtendedPoint& a, const ExtendedPoint& b);

/// True if a, b, c, d are distinct and occur in this cyclic order.
bool cyclically_ordered(std::span<const ExtendedPoint> pts);

/// x -> (a x + b) / (c x + d), a d - b c != 0.
struct Mobius {
  Real a{1}, b{0}, c{0}, d{1};

  Mobius() = default;
  Mobius(Real a_, Real b_, Real c_, Real d_);

  static Mobius identity() { return Mobius(); }
  /// Unique map sending x1, x2, x3 to y1, y2, y3.
  static Mobius from_three_points(const ExtendedPoint& x1, const ExtendedPoint& x2, const ExtendedPoint& x3,
                                  const ExtendedPoint& y1, const ExtendedPoint& y2, const ExtendedPoint& y3);

  Real determinant() const { return a * d - b * c; }
  bool preserves_orientation() const { return determinant() > 0; }
  bool is_affine() const { return c.is_zero(); }

  ExtendedPoint operator()(const ExtendedPoint& x) const;
  Real operator()(const Real& x) const;  // inf at the pole
  Complex operator()(const Complex& x) const;

  Mobius inverse() const;
  /// (this o other)(x) = this(other(x)).
  Mobius compose(const Mobius& other) const;
};

/// Orientation-preserving rotation of the projective line that sends the
/// midpoint (in circle position) of the largest gap between the given
/// points to infinity. Deterministic for a given point set.
Mobius infinity_avoiding_chart(std::span<const ExtendedPoint> pts);

}  // namespace mb
