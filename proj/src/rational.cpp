#include "multiband/rational.hpp"

#include <algorithm>

namespace mb {
namespace {

int trimmed_degree(const Poly& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (!p[i].is_zero()) return i;
  return -1;
}

// sum_j p_j (a x + b)^j (c x + d)^(n - j)
Poly homogeneous_substitute(const Poly& p, int n, const Mobius& T) {
  std::vector<Poly> up{{Real(1)}}, down{{Real(1)}};
  for (int j = 1; j <= n; ++j) {
    up.push_back(poly_mul(up.back(), {T.b, T.a}));
    down.push_back(poly_mul(down.back(), {T.d, T.c}));
  }
  Poly out(n + 1, Real(0));
  for (int j = 0; j <= n; ++j) {
    if (p[j].is_zero()) continue;
    Poly term = poly_scale(poly_mul(up[j], down[n - j]), p[j]);
    for (size_t i = 0; i < term.size() && i < out.size(); ++i) out[i] += term[i];
  }
  return out;
}

}  // namespace

RationalFunction::RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  if (num_.empty()) num_.push_back(Real(0));
  if (den_.empty()) throw DomainError("rational function with empty denominator");
  size_t n = std::max(num_.size(), den_.size());
  num_.resize(n, Real(0));
  den_.resize(n, Real(0));
  if (trimmed_degree(den_) < 0) throw DomainError("rational function with zero denominator");
}

RationalFunction RationalFunction::from_mobius(const Mobius& T) { return RationalFunction({T.b, T.a}, {T.d, T.c}); }

int RationalFunction::exact_degree(const Real& rel_tol) const {
  Real big(0);
  for (const auto& c : num_) big = max(big, abs(c));
  for (const auto& c : den_) big = max(big, abs(c));
  Real cut = rel_tol * big;
  int dn = -1, dd = -1;
  for (int i = degree(); i >= 0; --i)
    if (abs(num_[i]) > cut) {
      dn = i;
      break;
    }
  for (int i = degree(); i >= 0; --i)
    if (abs(den_[i]) > cut) {
      dd = i;
      break;
    }
  return std::max(dn, dd);
}

Real RationalFunction::operator()(const Real& x) const {
  if (x.is_inf()) {
    auto v = at_infinity();
    return v.is_infinite() ? Real::infinity() : v.value();
  }
  Real d = poly_eval(den_, x);
  Real n = poly_eval(num_, x);
  if (d.is_zero()) return Real::infinity();
  return n / d;
}

Complex RationalFunction::operator()(const Complex& x) const { return poly_eval(num_, x) / poly_eval(den_, x); }

ExtendedPoint RationalFunction::operator()(const ExtendedPoint& x) const {
  if (x.is_infinite()) return at_infinity();
  Real d = poly_eval(den_, x.value());
  if (d.is_zero()) return ExtendedPoint::infinity();
  return ExtendedPoint(poly_eval(num_, x.value()) / d);
}

ExtendedPoint RationalFunction::at_infinity() const {
  int dn = trimmed_degree(num_);
  int dd = trimmed_degree(den_);
  if (dn > dd) return ExtendedPoint::infinity();
  if (dn < dd) return ExtendedPoint(Real(0));
  return ExtendedPoint(num_[dn] / den_[dd]);
}

Real RationalFunction::derivative(const Real& x) const {
  Real d = poly_eval(den_, x);
  return poly_eval(wronskian(), x) / (d * d);
}

Poly RationalFunction::wronskian() const {
  return poly_sub(poly_mul(poly_derivative(num_), den_), poly_mul(num_, poly_derivative(den_)));
}

RationalFunction RationalFunction::compose_right(const Mobius& T) const {
  int n = degree();
  return RationalFunction(homogeneous_substitute(num_, n, T), homogeneous_substitute(den_, n, T));
}

RationalFunction RationalFunction::compose_left(const Mobius& B) const {
  Poly n = poly_add(poly_scale(num_, B.a), poly_scale(den_, B.b));
  Poly d = poly_add(poly_scale(num_, B.c), poly_scale(den_, B.d));
  return RationalFunction(std::move(n), std::move(d));
}

RationalFunction RationalFunction::normalized() const {
  Real big(0);
  for (const auto& c : num_) big = max(big, abs(c));
  for (const auto& c : den_) big = max(big, abs(c));
  Real s = 1 / big;
  return RationalFunction(poly_scale(num_, s), poly_scale(den_, s));
}

}  // namespace mb
