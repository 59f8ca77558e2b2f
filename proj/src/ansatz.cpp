#include "multiband/ansatz.hpp"

#include <algorithm>

namespace mb {

namespace {

constexpr int kGuardBits = 32;

// Projective value (num : den) of a polynomial pair at a complex point.
struct Pair {
  Complex num, den;
};

Real chordal(const Pair& w, const ExtendedPoint& q) {
  Real norm = sqrt(w.num.norm() + w.den.norm());
  if (q.is_infinite()) return abs(w.den) / norm;
  return abs(w.num - q.value() * w.den) / (norm * sqrt(1 + q.value() * q.value()));
}

SpherePoint as_sphere(const Pair& w) {
  if (abs(w.den) <= ldexp(Real(1), -working_bits() + 8) * abs(w.num)) return {Complex(), true};
  return {w.num / w.den, false};
}

// R with the leading coefficients that vanish in both N and D removed.
RationalFunction trimmed(const RationalFunction& R) {
  Real tol = ldexp(Real(1), -working_bits() / 2);
  int dn = effective_degree(R.numerator(), tol), dd = effective_degree(R.denominator(), tol);
  if (dd < 0) throw DomainError("denominator vanishes identically");
  int d = std::max(dn, dd);
  if (d < 1) throw DomainError("R is constant");
  Poly num(R.numerator().begin(), R.numerator().begin() + std::min<int>(d + 1, static_cast<int>(R.numerator().size())));
  Poly den(R.denominator().begin(), R.denominator().begin() + d + 1);
  if (dn < 0) num.assign(1, Real(0));
  return RationalFunction(num, den);
}

// Rotation of the projective line, y -> (c y + s) / (-s y + c).
Mobius rotation(const Real& phi) { return Mobius(cos(phi), sin(phi), -sin(phi), cos(phi)); }

SpherePoint apply(const Mobius& T, const Complex& y) {
  Complex num = T.a * y + Complex(T.b), den = T.c * y + Complex(T.d);
  if (abs(den) <= ldexp(Real(1), -working_bits() / 2) * abs(num)) return {Complex(), true};
  return {num / den, false};
}

Poly preimage_poly(const RationalFunction& S, const ExtendedPoint& q) {
  if (q.is_infinite()) return S.denominator();
  return poly_sub(S.numerator(), poly_scale(S.denominator(), q.value()));
}

// Chart in which infinity is neither a critical point nor a preimage of Q.
struct Chart {
  Mobius T;
  RationalFunction S;
};

Chart regular_chart(const RationalFunction& R, const ExceptionalSet* Q) {
  Real tol = ldexp(Real(1), -working_bits() / 4);
  const int n = R.degree();
  for (int i = 0; i < 16; ++i) {
    Real phi = Real(0.3) + Real(0.61) * Real(i);
    Mobius T = rotation(phi);
    RationalFunction S = R.compose_right(T);
    if (effective_degree(S.wronskian(), tol) != 2 * n - 2) continue;
    bool ok = true;
    if (Q)
      for (const auto& q : Q->values()) ok = ok && effective_degree(preimage_poly(S, q), tol) == n;
    if (ok) return {T, S};
  }
  throw PrecisionError("no regular chart found");
}

std::vector<RootCluster> clustered_roots(const Poly& p) {
  Real radius = ldexp(Real(1), -(working_bits() - kGuardBits) / 3);
  int d = effective_degree(p, ldexp(Real(1), -working_bits() / 2));
  if (d < 1) return {};
  return cluster_roots(poly_roots(std::span<const Real>(p.data(), static_cast<size_t>(d) + 1)), radius);
}

bool before(const SpherePoint& a, const SpherePoint& b) {
  if (a.infinite != b.infinite) return b.infinite;
  if (a.x.re != b.x.re) return a.x.re < b.x.re;
  return a.x.im < b.x.im;
}

}  // namespace

ExceptionalSet::ExceptionalSet(std::array<ExtendedPoint, 4> values) : values_(std::move(values)) {
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = i + 1; j < 4; ++j)
      if (values_[i] == values_[j]) throw DomainError("exceptional set values must be distinct");
}

ExceptionalSet ExceptionalSet::from_theta(const Real& theta) {
  if (!(theta > 0) || theta == 1) throw DomainError("theta must be positive and not 1");
  return ExceptionalSet({ExtendedPoint(-1 / theta), ExtendedPoint(-theta), ExtendedPoint(theta), ExtendedPoint(1 / theta)});
}

ExceptionalSet ExceptionalSet::from_mu(const Real& mu) {
  if (!(mu > 0 && mu < 1)) throw DomainError("mu must lie in (0, 1)");
  return ExceptionalSet(
      {ExtendedPoint(-1 - mu), ExtendedPoint(-1 + mu), ExtendedPoint(1 - mu), ExtendedPoint(1 + mu)});
}

ExceptionalSet ExceptionalSet::from_range(const RangeSystem& F) {
  return ExceptionalSet({F.minus.lo, F.minus.hi, F.plus.lo, F.plus.hi});
}

bool SpherePoint::is_real(const Real& tol) const { return infinite || abs(x.im) <= tol * (1 + abs(x.re)); }

std::string SpherePoint::str(int digits) const {
  if (infinite) return "inf";
  if (x.im.is_zero()) return x.re.str(digits);
  return x.re.str(digits) + (x.im < 0 ? " - " : " + ") + abs(x.im).str(digits) + "i";
}

int BranchingProfile::total() const {
  int s = 0;
  for (const auto& e : entries) s += e.branching;
  return s;
}

int branching_number(const RationalFunction& R, const ExtendedPoint& x, Precision prec) {
  ScopedPrecision guard(prec.bits + kGuardBits);
  RationalFunction S = trimmed(R);
  // Rotate x to the origin.
  Real phi = x.is_infinite() ? Real::pi() / 2 : atan(x.value());
  S = S.compose_right(rotation(phi));
  const Real& n0 = S.numerator()[0];
  const Real& d0 = S.denominator()[0];
  // P(y) = N(y) d0 - D(y) n0 vanishes at 0 to the order of the local degree.
  Poly P = poly_sub(poly_scale(S.numerator(), d0), poly_scale(S.denominator(), n0));
  Real big(0);
  for (const auto& c : P) big = max(big, abs(c));
  if (big.is_zero()) throw DomainError("R is constant");
  Real tol = ldexp(Real(1), -prec.bits / 3) * big;
  for (size_t j = 1; j < P.size(); ++j)
    if (abs(P[j]) > tol) return static_cast<int>(j) - 1;
  return static_cast<int>(P.size()) - 2;
}

BranchingProfile branching_profile(const RationalFunction& R, const ExceptionalSet& Q, Precision prec) {
  ScopedPrecision guard(prec.bits + kGuardBits);
  RationalFunction Rt = trimmed(R);
  BranchingProfile out;
  out.degree = Rt.degree();
  if (out.degree == 1) return out;
  Chart chart = regular_chart(Rt, nullptr);
  const Real match = ldexp(Real(1), -prec.bits / 2);
  const Real loose = ldexp(Real(1), -prec.bits / 4);
  std::string ambiguous;
  for (const auto& c : clustered_roots(chart.S.wronskian())) {
    Complex y = c.center;
    Pair w{poly_eval(chart.S.numerator(), y), poly_eval(chart.S.denominator(), y)};
    CriticalPoint cp{apply(chart.T, y), c.multiplicity, as_sphere(w), false};
    Real best = Real(1);
    for (const auto& q : Q.values()) best = min(best, chordal(w, q));
    cp.in_q = best <= match;
    if (!cp.in_q && best <= loose)
      ambiguous += (ambiguous.empty() ? "" : ", ") + cp.point.str(12) + " (value " + cp.value.str(12) + ")";
    out.entries.push_back(std::move(cp));
  }
  if (!ambiguous.empty()) throw AmbiguityError("critical values near Q but not in it: " + ambiguous);
  std::sort(out.entries.begin(), out.entries.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return before(a.point, b.point); });
  if (out.total() != 2 * out.degree - 2)
    throw PrecisionError("branching numbers sum to " + std::to_string(out.total()) + ", expected " +
                         std::to_string(2 * out.degree - 2));
  return out;
}

int genus_count(const RationalFunction& R, const ExceptionalSet& Q, Precision prec) {
  auto profile = branching_profile(R, Q, prec);
  int g1 = 0;
  for (const auto& e : profile.entries) g1 += e.in_q ? e.branching / 2 : e.branching;
  return g1 + 1;
}

CurveSpec branch_points(const RationalFunction& R, const ExceptionalSet& Q, Precision prec) {
  CurveSpec out;
  out.genus = genus_count(R, Q, prec);
  ScopedPrecision guard(prec.bits + kGuardBits);
  RationalFunction Rt = trimmed(R);
  Chart chart = regular_chart(Rt, &Q);
  for (const auto& q : Q.values())
    for (const auto& c : clustered_roots(preimage_poly(chart.S, q)))
      if (c.multiplicity % 2 == 1) out.branch_points.push_back(apply(chart.T, c.center));
  std::sort(out.branch_points.begin(), out.branch_points.end(), before);
  int count = static_cast<int>(out.branch_points.size());
  if (count != 2 * out.genus + 2)
    throw PrecisionError("internal inconsistency: " + std::to_string(count) + " branch points for genus " +
                         std::to_string(out.genus));
  return out;
}

}  // namespace mb
