#include "multiband/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace mb {

Real poly_eval(std::span<const Real> p, const Real& x) {
  Real acc;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

Complex poly_eval(std::span<const Real> p, const Complex& x) {
  Complex acc;
  for (size_t i = p.size(); i-- > 0;) {
    acc = acc * x;
    acc.re += p[i];
  }
  return acc;
}

Complex poly_eval(std::span<const Complex> p, const Complex& x) {
  Complex acc;
  for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

CPoly poly_mul(const CPoly& a, const CPoly& b) {
  if (a.empty() || b.empty()) return {};
  CPoly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_scale(const Poly& a, const Real& s) {
  Poly r(a);
  for (auto& c : r) c *= s;
  return r;
}

Poly poly_derivative(const Poly& a) {
  if (a.size() <= 1) return {Real(0)};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * Real(static_cast<long>(i));
  return r;
}

CPoly poly_from_roots(std::span<const Complex> roots) {
  CPoly p{Complex(1)};
  for (const auto& r : roots) p = poly_mul(p, CPoly{-r, Complex(1)});
  return p;
}

int effective_degree(std::span<const Real> p, const Real& rel_tol) {
  Real m;
  for (const auto& c : p) m = max(m, abs(c));
  if (m.is_zero()) return -1;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (abs(p[static_cast<size_t>(i)]) > rel_tol * m) return i;
  return -1;
}

int effective_degree(std::span<const Complex> p, const Real& rel_tol) {
  Real m;
  for (const auto& c : p) m = max(m, abs(c));
  if (m.is_zero()) return -1;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (abs(p[static_cast<size_t>(i)]) > rel_tol * m) return i;
  return -1;
}

namespace {

CPoly to_complex(std::span<const Real> p) {
  CPoly c;
  c.reserve(p.size());
  for (const auto& v : p) c.emplace_back(v);
  return c;
}

// Horner for p and p' together.
void eval_with_derivative(const CPoly& p, const Complex& x, Complex& v, Complex& d) {
  v = Complex();
  d = Complex();
  for (size_t i = p.size(); i-- > 0;) {
    d = d * x + v;
    v = v * x + p[i];
  }
}

}  // namespace

std::vector<Complex> poly_roots(std::span<const Real> p) { return poly_roots(to_complex(p)); }

std::vector<Complex> poly_roots(std::span<const Complex> pin) {
  CPoly p(pin.begin(), pin.end());
  while (!p.empty() && p.back().re.is_zero() && p.back().im.is_zero()) p.pop_back();
  if (p.size() <= 1) return {};
  const int n = static_cast<int>(p.size()) - 1;

  // Zero roots split off exactly.
  std::vector<Complex> roots;
  size_t lead = 0;
  while (lead < p.size() && p[lead].re.is_zero() && p[lead].im.is_zero()) ++lead;
  for (size_t i = 0; i < lead; ++i) roots.emplace_back(Real(0));
  p.erase(p.begin(), p.begin() + static_cast<long>(lead));
  const int m = n - static_cast<int>(lead);
  if (m == 0) return roots;

  // Initial radius from the Cauchy-type bound of the coefficient moduli.
  Real lead_abs = abs(p.back());
  Real rad(0);
  for (int k = 1; k <= m; ++k) {
    Real c = abs(p[static_cast<size_t>(m - k)]) / lead_abs;
    if (!c.is_zero()) rad = max(rad, pow(c, Real(1) / Real(k)));
  }
  if (rad.is_zero()) rad = Real(1);

  std::vector<Complex> z(static_cast<size_t>(m));
  const Real pi = Real::pi();
  for (int k = 0; k < m; ++k) {
    Real ang = 2 * pi * Real(k) / Real(m) + Real(0.4);
    z[static_cast<size_t>(k)] = Complex(rad * cos(ang), rad * sin(ang));
  }

  const Real eps = working_epsilon();
  std::vector<Real> absp;
  for (const auto& c : p) absp.push_back(abs(c));
  std::vector<bool> done(static_cast<size_t>(m), false);
  const int max_iter = 4 * working_bits() + 200;
  for (int it = 0; it < max_iter; ++it) {
    bool all_done = true;
    for (int k = 0; k < m; ++k) {
      auto ku = static_cast<size_t>(k);
      if (done[ku]) continue;
      Complex v, d;
      eval_with_derivative(p, z[ku], v, d);
      // Backward-error stop: |p(z)| at the rounding noise of the Horner sum.
      Real za = abs(z[ku]);
      Real noise;
      for (size_t i = absp.size(); i-- > 0;) noise = noise * za + absp[i];
      if (abs(v) <= 8 * eps * noise) {
        done[ku] = true;
        continue;
      }
      Complex ratio = v / d;
      Complex s;
      for (int j = 0; j < m; ++j) {
        if (j == k) continue;
        Complex diff = z[ku] - z[static_cast<size_t>(j)];
        if (diff.re.is_zero() && diff.im.is_zero()) continue;
        s += Complex(1) / diff;
      }
      Complex denom = Complex(1) - ratio * s;
      Complex step = (denom.re.is_zero() && denom.im.is_zero()) ? ratio : ratio / denom;
      z[ku] -= step;
      if (abs(step) <= eps * 4 * max(abs(z[ku]), Real(1e-300)))
        done[ku] = true;
      else
        all_done = false;
    }
    if (all_done) break;
  }

  // Newton polish. For clustered roots this is a no-op in effect.
  for (auto& r : z) {
    for (int it = 0; it < 3; ++it) {
      Complex v, d;
      eval_with_derivative(p, r, v, d);
      if (d.re.is_zero() && d.im.is_zero()) break;
      Complex step = v / d;
      Complex cand = r - step;
      Complex vc, dc;
      eval_with_derivative(p, cand, vc, dc);
      if (vc.norm() < v.norm()) r = cand;
      else break;
    }
  }

  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots, const Real& radius) {
  // Single linkage: two roots share a cluster when a chain of gaps below radius joins them.
  const size_t n = roots.size();
  std::vector<int> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      Real scale = max(Real(1), max(abs(roots[i]), abs(roots[j])));
      if (abs(roots[i] - roots[j]) < radius * scale) parent[static_cast<size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
    }
  std::vector<RootCluster> out;
  std::vector<int> slot(n, -1);
  for (size_t i = 0; i < n; ++i) {
    int r = find(static_cast<int>(i));
    auto ru = static_cast<size_t>(r);
    if (slot[ru] < 0) {
      slot[ru] = static_cast<int>(out.size());
      out.push_back({Complex(), 0});
    }
    auto& c = out[static_cast<size_t>(slot[ru])];
    c.center += roots[i];
    c.multiplicity += 1;
  }
  for (auto& c : out) c.center = c.center / Real(c.multiplicity);
  return out;
}

LU::LU(Matrix m) : lu_(std::move(m)) {
  if (lu_.rows != lu_.cols) throw std::invalid_argument("LU of a non-square matrix");
  const int n = lu_.rows;
  perm_.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm_[static_cast<size_t>(i)] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    Real best = abs(lu_(k, k));
    for (int i = k + 1; i < n; ++i) {
      Real v = abs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best.is_zero()) {
      singular_ = true;
      continue;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[static_cast<size_t>(k)], perm_[static_cast<size_t>(piv)]);
      sign_ = -sign_;
    }
    for (int i = k + 1; i < n; ++i) {
      Real f = lu_(i, k) / lu_(k, k);
      lu_(i, k) = f;
      for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Real LU::determinant() const {
  Real d(sign_);
  for (int i = 0; i < lu_.rows; ++i) d *= lu_(i, i);
  return d;
}

std::vector<Real> LU::solve(std::vector<Real> b) const {
  const int n = lu_.rows;
  std::vector<Real> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = b[static_cast<size_t>(perm_[static_cast<size_t>(i)])];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[static_cast<size_t>(i)] -= lu_(i, j) * x[static_cast<size_t>(j)];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[static_cast<size_t>(i)] -= lu_(i, j) * x[static_cast<size_t>(j)];
    if (lu_(i, i).is_zero()) throw std::domain_error("singular linear system");
    x[static_cast<size_t>(i)] /= lu_(i, i);
  }
  return x;
}

std::vector<Real> solve_linear(const Matrix& m, const std::vector<Real>& b) { return LU(m).solve(b); }

}  // namespace mb
