#include "multiband/projective.hpp"

#include <algorithm>

namespace mb {

const Real& ExtendedPoint::value() const {
  if (infinite_) throw DomainError("point at infinity has no finite coordinate");
  return value_;
}

Real ExtendedPoint::circle_position() const {
  if (infinite_) return Real(0);
  return atan(value_) + Real::pi() / 2;
}

ExtendedPoint ExtendedPoint::from_circle_position(const Real& p) {
  Real pi = Real::pi();
  Real q = p - pi * floor(p / pi);
  if (q.is_zero()) return infinity();
  return ExtendedPoint(-1 / tan(q));
}

std::string ExtendedPoint::str() const { return infinite_ ? "inf" : value_.str(); }
std::string ExtendedPoint::str(int digits) const { return infinite_ ? "inf" : value_.str(digits); }

bool operator==(const ExtendedPoint& a, const ExtendedPoint& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

bool cyclic_less(const ExtendedPoint& a, const ExtendedPoint& b) {
  if (b.is_infinite()) return false;
  if (a.is_infinite()) return true;
  return a.value() < b.value();
}

bool cyclically_ordered(std::span<const ExtendedPoint> pts) {
  // Rotate so the minimum comes first, then the sequence must increase.
  const size_t n = pts.size();
  if (n < 2) return true;
  size_t start = 0;
  for (size_t i = 1; i < n; ++i)
    if (cyclic_less(pts[i], pts[start])) start = i;
  for (size_t i = 0; i + 1 < n; ++i) {
    const auto& p = pts[(start + i) % n];
    const auto& q = pts[(start + i + 1) % n];
    if (!cyclic_less(p, q)) return false;
  }
  return true;
}

Mobius::Mobius(Real a_, Real b_, Real c_, Real d_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
  if (determinant().is_zero()) throw DomainError("singular linear-fractional map");
}

namespace {

// Map sending z1 -> 0, z2 -> inf, z3 -> 1.
Mobius to_standard(const ExtendedPoint& z1, const ExtendedPoint& z2, const ExtendedPoint& z3) {
  if (z1 == z2 || z2 == z3 || z1 == z3) throw DomainError("coincident points in a three-point map");
  if (z1.is_infinite()) {
    // (z3 - z2) / (z - z2)
    return Mobius(Real(0), z3.value() - z2.value(), Real(1), -z2.value());
  }
  if (z2.is_infinite()) {
    // (z - z1) / (z3 - z1)
    return Mobius(Real(1), -z1.value(), Real(0), z3.value() - z1.value());
  }
  if (z3.is_infinite()) {
    // (z - z1) / (z - z2)
    return Mobius(Real(1), -z1.value(), Real(1), -z2.value());
  }
  Real s = z3.value() - z2.value();
  Real t = z3.value() - z1.value();
  return Mobius(s, -z1.value() * s, t, -z2.value() * t);
}

}  // namespace

Mobius Mobius::from_three_points(const ExtendedPoint& x1, const ExtendedPoint& x2, const ExtendedPoint& x3,
                                 const ExtendedPoint& y1, const ExtendedPoint& y2, const ExtendedPoint& y3) {
  return to_standard(y1, y2, y3).inverse().compose(to_standard(x1, x2, x3));
}

ExtendedPoint Mobius::operator()(const ExtendedPoint& x) const {
  if (x.is_infinite()) {
    if (c.is_zero()) return ExtendedPoint::infinity();
    return ExtendedPoint(a / c);
  }
  Real den = c * x.value() + d;
  if (den.is_zero()) return ExtendedPoint::infinity();
  return ExtendedPoint((a * x.value() + b) / den);
}

Real Mobius::operator()(const Real& x) const {
  if (x.is_inf()) return c.is_zero() ? Real::infinity() : a / c;
  Real den = c * x + d;
  if (den.is_zero()) return Real::infinity();
  return (a * x + b) / den;
}

Complex Mobius::operator()(const Complex& x) const { return (Complex(a) * x + Complex(b)) / (Complex(c) * x + Complex(d)); }

Mobius Mobius::inverse() const { return Mobius(d, -b, -c, a); }

Mobius Mobius::compose(const Mobius& o) const {
  return Mobius(a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d);
}

Mobius infinity_avoiding_chart(std::span<const ExtendedPoint> pts) {
  if (pts.empty()) return Mobius::identity();
  std::vector<Real> pos;
  pos.reserve(pts.size());
  for (const auto& p : pts) pos.push_back(p.circle_position());
  std::sort(pos.begin(), pos.end());
  Real pi = Real::pi();
  Real best_gap = pos.front() + pi - pos.back();
  Real mid = pos.back() + best_gap / 2;
  for (size_t i = 0; i + 1 < pos.size(); ++i) {
    Real gap = pos[i + 1] - pos[i];
    if (gap > best_gap) {
      best_gap = gap;
      mid = pos[i] + gap / 2;
    }
  }
  // Rotation by angle m in the atan coordinate: x -> tan(atan(x) + pi/2 - m - pi/2).
  Real m = mid;
  return Mobius(cos(m), -sin(m), sin(m), cos(m));
}

}  // namespace mb
