#include "multiband/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "multiband/zolotarev.hpp"

namespace mb {
namespace {

constexpr int kGuardBits = 32;
constexpr int kMaxLayouts = 100000;
constexpr int kScreenSamples = 32;
constexpr int kDampingSteps = 6;
constexpr int kStarts = 4;
constexpr int kScreenedLayouts = 64;

int sgn(const Real& x) { return x.sign(); }

// T_0..T_n at t.
std::vector<Real> chebyshev_values(const Real& t, int n) {
  std::vector<Real> T(static_cast<size_t>(n) + 1);
  T[0] = Real(1);
  if (n >= 1) T[1] = t;
  for (int j = 2; j <= n; ++j) T[j] = 2 * t * T[j - 1] - T[j - 2];
  return T;
}

Poly chebyshev_to_monomial(const std::vector<Real>& c) {
  int n = static_cast<int>(c.size()) - 1;
  Poly out(c.size(), Real(0));
  Poly prev{Real(1)}, cur{Real(0), Real(1)};
  for (int j = 0; j <= n; ++j) {
    const Poly& Tj = j == 0 ? prev : cur;
    for (size_t i = 0; i < Tj.size(); ++i) out[i] += c[j] * Tj[i];
    if (j >= 1) {
      Poly next = poly_sub(poly_mul(Poly{Real(0), Real(2)}, cur), prev);
      prev = cur;
      cur = next;
    }
  }
  return out;
}

int segment_of(const std::vector<ChartSegment>& segs, const Real& t) {
  for (size_t i = 0; i < segs.size(); ++i)
    if (t <= segs[i].hi) {
      if (i > 0 && t < segs[i].lo && segs[i].lo - t > t - segs[i - 1].hi) return static_cast<int>(i) - 1;
      return static_cast<int>(i);
    }
  return static_cast<int>(segs.size()) - 1;
}

Real golden_max(const ErrorFunction& f, Real a, Real b, int dir, const Real& tol) {
  const Real g = (sqrt(Real(5)) - 1) / 2;
  Real c = b - g * (b - a), d = a + g * (b - a);
  Real fc = f(c) * Real(dir), fd = f(d) * Real(dir);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c) * Real(dir);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d) * Real(dir);
    }
  }
  return fc >= fd ? c : d;
}

std::vector<Extremum> scan(const ErrorFunction& delta, int points) {
  const Real tol = ldexp(Real(1), -working_bits() / 2);
  const auto& segs = delta.segments();
  std::vector<Extremum> out;
  auto make = [&](const Real& t, int s, bool endpoint) {
    return Extremum{t, delta.to_original(t), delta(t), s, endpoint};
  };
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    const Real& lo = segs[s].lo;
    const Real& hi = segs[s].hi;
    int N = std::max(points, 3);
    Real mid = (lo + hi) / 2, half = (hi - lo) / 2;
    std::vector<Real> ts(N), vs(N);
    for (int i = 0; i < N; ++i) {
      ts[i] = i == 0 ? lo : i == N - 1 ? hi : mid - half * cos(Real::pi() * Real(i) / Real(N - 1));
      vs[i] = delta(ts[i]);
    }
    std::vector<Extremum> band;
    band.push_back(make(lo, s, true));
    for (int i = 1; i + 1 < N; ++i) {
      Real d1 = vs[i] - vs[i - 1], d2 = vs[i + 1] - vs[i];
      int dir = 0;
      if (d1 > 0 && d2 <= 0) dir = 1;
      if (d1 < 0 && d2 >= 0) dir = -1;
      if (dir == 0) continue;
      Real t = golden_max(delta, ts[i - 1], ts[i + 1], dir, tol * max(Real(1), half));
      if (abs(t - lo) <= 2 * tol || abs(t - hi) <= 2 * tol) continue;
      band.push_back(make(t, s, false));
    }
    band.push_back(make(hi, s, true));
    std::stable_sort(band.begin(), band.end(), [](const Extremum& a, const Extremum& b) { return a.t < b.t; });
    for (auto& e : band) {
      if (!out.empty() && out.back().segment == s && abs(out.back().t - e.t) <= 2 * tol) {
        if (e.endpoint) out.back() = e;
        continue;
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

// Remove the smallest point and its smaller neighbour until size target.
template <class T, class Mag>
void trim_cyclic(std::vector<T>& v, size_t target, Mag mag) {
  while (v.size() > target) {
    size_t k = 0;
    for (size_t i = 1; i < v.size(); ++i)
      if (mag(v[i]) < mag(v[k])) k = i;
    size_t prev = (k + v.size() - 1) % v.size(), next = (k + 1) % v.size();
    size_t other = mag(v[prev]) < mag(v[next]) ? prev : next;
    size_t a = std::max(k, other), b = std::min(k, other);
    v.erase(v.begin() + static_cast<long>(a));
    v.erase(v.begin() + static_cast<long>(b));
  }
}

// Symmetric eigen-decomposition by cyclic Jacobi rotations. Columns of V
// hold the eigenvectors.
void jacobi_eigen(Matrix& A, Matrix& V) {
  int n = A.rows;
  V = Matrix(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = Real(1);
  Real eps = working_epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off(0), norm(0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        norm += A(i, j) * A(i, j);
        if (i != j) off += A(i, j) * A(i, j);
      }
    if (off <= eps * eps * norm) return;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (A(p, q).is_zero()) continue;
        Real theta = (A(q, q) - A(p, p)) / (2 * A(p, q));
        Real t = Real(theta.sign() >= 0 ? 1 : -1) / (abs(theta) + sqrt(theta * theta + 1));
        Real c = 1 / sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < n; ++k) {
          Real akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          Real apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          Real vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
  }
}

bool cholesky(const Matrix& B, Matrix& L) {
  int n = B.rows;
  L = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    Real d = B(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > 0)) return false;
    L(j, j) = sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      Real s = B(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return true;
}

// Solves L x = b in place.
void forward(const Matrix& L, std::vector<Real>& b) {
  for (int i = 0; i < L.rows; ++i) {
    for (int k = 0; k < i; ++k) b[i] -= L(i, k) * b[k];
    b[i] /= L(i, i);
  }
}

// Solves L^T x = b in place.
void backward_transposed(const Matrix& L, std::vector<Real>& b) {
  for (int i = L.rows - 1; i >= 0; --i) {
    for (int k = i + 1; k < L.rows; ++k) b[i] -= L(k, i) * b[k];
    b[i] /= L(i, i);
  }
}

struct RefPoint {
  Real t;
  int segment = 0;
};

struct Step {
  Real lambda;
  Poly num, den;  // monomial coefficients in the chart coordinate
};

struct ClassPattern {
  const std::vector<ChartSegment>* segments;
  const SignClass* sigma;
  int first_band;
  int m;
};

// Q must keep one sign on every band and change sign exactly across the
// gaps whose class bit is set.
enum class DenominatorCheck { ok, wrong_pattern, pole_in_band };

DenominatorCheck check_denominator(const Poly& den, const ClassPattern& cls) {
  const auto& segs = *cls.segments;
  std::vector<int> signs;
  for (const auto& s : segs) {
    int v = sgn(poly_eval(den, (s.lo + s.hi) / 2));
    if (v == 0) return DenominatorCheck::pole_in_band;
    signs.push_back(v);
  }
  for (int j = 0; j + 1 < cls.m; ++j) {
    int changed = signs[j] != signs[j + 1] ? 1 : 0;
    if (changed != cls.sigma->bit((cls.first_band + j) % cls.m)) return DenominatorCheck::wrong_pattern;
  }
  Real tiny = ldexp(Real(1), -working_bits() / 2);
  int deg = effective_degree(den, tiny);
  if (deg < 0) return DenominatorCheck::wrong_pattern;
  if (deg >= 1) {
    auto roots = poly_roots(std::span<const Real>(den.data(), static_cast<size_t>(deg) + 1));
    Real im_tol = ldexp(Real(1), -working_bits() / 4);
    for (const auto& z : roots) {
      if (abs(z.im) > im_tol * (1 + abs(z.re))) continue;
      for (const auto& s : segs)
        if (z.re >= s.lo - im_tol && z.re <= s.hi + im_tol) return DenominatorCheck::pole_in_band;
    }
  }
  return DenominatorCheck::ok;
}

// Levelled reference solution: P(t_i) = (S_i + lambda (-1)^i) Q(t_i). The
// barycentric weights annihilate degree <= 2n, which eliminates P and leaves
// the symmetric definite pencil (A + lambda B) q = 0 in the Chebyshev basis.
std::optional<Step> levelled_step(const std::vector<RefPoint>& ref, int n, const ClassPattern& cls,
                                  bool* pole_in_band = nullptr) {
  const auto& segs = *cls.segments;
  int N = static_cast<int>(ref.size());
  std::vector<Real> w(N);
  Real wmax(0);
  for (int i = 0; i < N; ++i) {
    Real prod(1);
    for (int l = 0; l < N; ++l)
      if (l != i) prod *= ref[i].t - ref[l].t;
    if (prod.is_zero()) return std::nullopt;
    w[i] = 1 / prod;
    wmax = max(wmax, abs(w[i]));
  }
  std::vector<std::vector<Real>> T(N);
  std::vector<Real> S(N), s(N);
  for (int i = 0; i < N; ++i) {
    w[i] /= wmax;
    T[i] = chebyshev_values(ref[i].t, n);
    S[i] = Real(segs[ref[i].segment].sign);
    s[i] = Real(i % 2 == 0 ? 1 : -1);
  }
  Matrix A(n + 1, n + 1), B(n + 1, n + 1);
  for (int j = 0; j <= n; ++j)
    for (int l = j; l <= n; ++l) {
      Real a(0), b(0);
      for (int i = 0; i < N; ++i) {
        Real x = w[i] * T[i][j] * T[i][l];
        a += x * S[i];
        b += x * s[i];
      }
      A(j, l) = A(l, j) = a;
      B(j, l) = B(l, j) = b;
    }
  if (B(0, 0).sign() < 0)
    for (auto& x : A.a) x = -x;
  if (B(0, 0).sign() < 0)
    for (auto& x : B.a) x = -x;
  Matrix L;
  if (!cholesky(B, L)) return std::nullopt;
  // C = L^{-1} A L^{-T}
  Matrix X(n + 1, n + 1);
  for (int col = 0; col <= n; ++col) {
    std::vector<Real> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = A(i, col);
    forward(L, v);
    for (int i = 0; i <= n; ++i) X(i, col) = v[i];
  }
  Matrix C(n + 1, n + 1);
  for (int row = 0; row <= n; ++row) {
    std::vector<Real> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = X(row, i);
    forward(L, v);
    for (int i = 0; i <= n; ++i) C(i, row) = v[i];
  }
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) C(i, j) = C(j, i) = (C(i, j) + C(j, i)) / 2;
  Matrix V;
  jacobi_eigen(C, V);

  std::optional<Step> best;
  for (int k = 0; k <= n; ++k) {
    Real lambda = -C(k, k);
    if (!(abs(lambda) < 1)) continue;
    if (best && abs(lambda) >= abs(best->lambda)) continue;
    std::vector<Real> q(n + 1);
    for (int i = 0; i <= n; ++i) q[i] = V(i, k);
    backward_transposed(L, q);
    Real qmax(0);
    for (const auto& c : q) qmax = max(qmax, abs(c));
    for (auto& c : q) c /= qmax;
    Poly den = chebyshev_to_monomial(q);
    auto check = check_denominator(den, cls);
    if (check == DenominatorCheck::pole_in_band && pole_in_band) *pole_in_band = true;
    if (check != DenominatorCheck::ok) continue;
    // P from every other reference point.
    Matrix M(n + 1, n + 1);
    std::vector<Real> rhs(n + 1);
    for (int r = 0; r <= n; ++r) {
      int i = 2 * r;
      for (int j = 0; j <= n; ++j) M(r, j) = T[i][j];
      rhs[r] = (S[i] + lambda * s[i]) * poly_eval(den, ref[i].t);
    }
    std::vector<Real> p;
    try {
      p = solve_linear(M, rhs);
    } catch (const std::domain_error&) {
      continue;
    }
    best = Step{lambda, chebyshev_to_monomial(p), den};
  }
  return best;
}

ErrorFunction step_error(const Step& st, const SolverChart& chart, const Mobius& from_chart, int n) {
  auto segs = chart.segments;
  auto num = st.num, den = st.den;
  return ErrorFunction(
      [num, den, segs](const Real& t) {
        return poly_eval(num, t) / poly_eval(den, t) - Real(segs[segment_of(segs, t)].sign);
      },
      chart.segments, from_chart, n);
}

std::vector<RefPoint> to_reference(const std::vector<Extremum>& ext) {
  std::vector<RefPoint> out;
  for (const auto& e : ext) out.push_back({e.t, e.segment});
  return out;
}

// Pads a reference with pairs of points in the widest free interval of a band.
void pad_reference(std::vector<RefPoint>& ref, const std::vector<ChartSegment>& segs, size_t target) {
  while (ref.size() < target) {
    Real best_len(-1), best_lo, best_hi;
    int best_seg = 0;
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
      std::vector<Real> cuts{segs[s].lo};
      for (const auto& r : ref)
        if (r.segment == s) cuts.push_back(r.t);
      cuts.push_back(segs[s].hi);
      for (size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] - cuts[i] > best_len) {
          best_len = cuts[i + 1] - cuts[i];
          best_lo = cuts[i];
          best_hi = cuts[i + 1];
          best_seg = s;
        }
    }
    ref.push_back({best_lo + best_len / 3, best_seg});
    ref.push_back({best_hi - best_len / 3, best_seg});
    std::sort(ref.begin(), ref.end(), [](const RefPoint& a, const RefPoint& b) { return a.t < b.t; });
  }
}

// Reference with c[s] Chebyshev-Lobatto points on segment s.
std::vector<RefPoint> layout_reference(const std::vector<ChartSegment>& segs, const std::vector<int>& c) {
  std::vector<RefPoint> ref;
  for (size_t s = 0; s < segs.size(); ++s) {
    Real mid = (segs[s].lo + segs[s].hi) / 2, half = (segs[s].hi - segs[s].lo) / 2;
    if (c[s] == 1) {
      ref.push_back({mid, static_cast<int>(s)});
      continue;
    }
    for (int i = 0; i < c[s]; ++i)
      ref.push_back({mid - half * cos(Real::pi() * Real(i) / Real(c[s] - 1)), static_cast<int>(s)});
  }
  return ref;
}

// Double precision screening of reference layouts. Mirrors levelled_step
// but tests the class through Q's sign on a sample of every band instead of
// its roots; only the ranking matters here.
struct QuickPattern {
  std::vector<double> lo, hi;
  std::vector<int> sign;
  std::vector<int> bits;  // required sign change between chart bands j, j+1
};

void cheb_d(double t, int n, std::vector<double>& T) {
  T.assign(static_cast<size_t>(n) + 1, 1.0);
  if (n >= 1) T[1] = t;
  for (int j = 2; j <= n; ++j) T[j] = 2 * t * T[j - 1] - T[j - 2];
}

std::optional<double> quick_level(const std::vector<double>& t, const std::vector<int>& seg, int n,
                                  const QuickPattern& qp) {
  int N = static_cast<int>(t.size()), K = n + 1;
  std::vector<double> logw(N);
  double wmax = -HUGE_VAL;
  for (int i = 0; i < N; ++i) {
    // Products are taken in log form to stay clear of underflow.
    double logp = 0;
    for (int l = 0; l < N; ++l)
      if (l != i) {
        double d = t[i] - t[l];
        if (d == 0) return std::nullopt;
        logp += std::log(std::abs(d));
      }
    logw[i] = -logp;
    wmax = std::max(wmax, logw[i]);
  }
  // sign(w_i) (-1)^i is the same for every i, so B is minus the Gram matrix of
  // sqrt|w| V. A Householder QR of that matrix reduces the pencil to the
  // symmetric matrix G^T diag(sign(w_i) S_i) G.
  std::vector<double> G(static_cast<size_t>(N) * K), Tt;
  for (int i = 0; i < N; ++i) {
    double r = std::exp((logw[i] - wmax) / 2);
    cheb_d(t[i], n, Tt);
    for (int j = 0; j < K; ++j) G[i * K + j] = r * Tt[j];
  }
  std::vector<double> D(N);
  for (int i = 0; i < N; ++i) D[i] = ((N - 1 - i) % 2 == 0 ? 1.0 : -1.0) * qp.sign[seg[i]];
  std::vector<double> Rm(K * K, 0.0);
  std::vector<std::vector<double>> H;  // Householder vectors
  for (int j = 0; j < K; ++j) {
    double norm = 0;
    for (int i = j; i < N; ++i) norm += G[i * K + j] * G[i * K + j];
    norm = std::sqrt(norm);
    if (norm == 0) return std::nullopt;
    double alpha = G[j * K + j] > 0 ? -norm : norm;
    std::vector<double> v(N, 0.0);
    for (int i = j; i < N; ++i) v[i] = G[i * K + j];
    v[j] -= alpha;
    double vn = 0;
    for (int i = j; i < N; ++i) vn += v[i] * v[i];
    if (vn > 0)
      for (int c = j; c < K; ++c) {
        double d = 0;
        for (int i = j; i < N; ++i) d += v[i] * G[i * K + c];
        d = 2 * d / vn;
        for (int i = j; i < N; ++i) G[i * K + c] -= d * v[i];
      }
    for (int c = j; c < K; ++c) Rm[j * K + c] = G[j * K + c];
    H.push_back(std::move(v));
  }
  // Thin Q from the reflectors.
  std::vector<double> Qm(static_cast<size_t>(N) * K, 0.0);
  for (int j = 0; j < K; ++j) Qm[j * K + j] = 1;
  for (int j = K - 1; j >= 0; --j) {
    const auto& v = H[j];
    double vn = 0;
    for (int i = j; i < N; ++i) vn += v[i] * v[i];
    if (vn == 0) continue;
    for (int c = 0; c < K; ++c) {
      double d = 0;
      for (int i = j; i < N; ++i) d += v[i] * Qm[i * K + c];
      d = 2 * d / vn;
      for (int i = j; i < N; ++i) Qm[i * K + c] -= d * v[i];
    }
  }
  for (int j = 0; j < K; ++j)
    if (Rm[j * K + j] == 0) return std::nullopt;
  // A + lambda B = R^T (C - lambda I) R with C = Q^T diag(D) Q.
  std::vector<double> C(K * K, 0.0);
  for (int a = 0; a < K; ++a)
    for (int b = a; b < K; ++b) {
      double sum = 0;
      for (int i = 0; i < N; ++i) sum += Qm[i * K + a] * D[i] * Qm[i * K + b];
      C[a * K + b] = C[b * K + a] = sum;
    }
  std::vector<double> V(K * K, 0.0);
  for (int i = 0; i < K; ++i) V[i * K + i] = 1;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0, norm = 0;
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) {
        norm += C[i * K + j] * C[i * K + j];
        if (i != j) off += C[i * K + j] * C[i * K + j];
      }
    if (off <= 1e-30 * norm) break;
    for (int p = 0; p < K; ++p)
      for (int q = p + 1; q < K; ++q) {
        double apq = C[p * K + q];
        if (apq == 0) continue;
        double theta = (C[q * K + q] - C[p * K + p]) / (2 * apq);
        double tt = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(tt * tt + 1), s = tt * c;
        for (int k = 0; k < K; ++k) {
          double akp = C[k * K + p], akq = C[k * K + q];
          C[k * K + p] = c * akp - s * akq;
          C[k * K + q] = s * akp + c * akq;
        }
        for (int k = 0; k < K; ++k) {
          double apk = C[p * K + k], aqk = C[q * K + k];
          C[p * K + k] = c * apk - s * aqk;
          C[q * K + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < K; ++k) {
          double vkp = V[k * K + p], vkq = V[k * K + q];
          V[k * K + p] = c * vkp - s * vkq;
          V[k * K + q] = s * vkp + c * vkq;
        }
      }
  }
  std::optional<double> best;
  std::vector<double> q(K);
  int m = static_cast<int>(qp.lo.size());
  for (int k = 0; k < K; ++k) {
    double lambda = C[k * K + k];
    if (!(std::abs(lambda) < 1)) continue;
    if (best && std::abs(lambda) >= *best) continue;
    for (int i = 0; i < K; ++i) q[i] = V[i * K + k];
    for (int i = K - 1; i >= 0; --i) {
      for (int j = i + 1; j < K; ++j) q[i] -= Rm[i * K + j] * q[j];
      q[i] /= Rm[i * K + i];
    }
    bool ok = true;
    int prev = 0;
    for (int b = 0; b < m && ok; ++b) {
      int band_sign = 0;
      for (int i = 0; i <= kScreenSamples && ok; ++i) {
        double x = qp.lo[b] + (qp.hi[b] - qp.lo[b]) * i / kScreenSamples;
        cheb_d(x, n, Tt);
        double Q = 0;
        for (int j = 0; j < K; ++j) Q += q[j] * Tt[j];
        int sg = Q > 0 ? 1 : Q < 0 ? -1 : 0;
        if (sg == 0 || (band_sign != 0 && sg != band_sign)) ok = false;
        band_sign = sg;
      }
      if (ok && b > 0 && (band_sign != prev ? 1 : 0) != qp.bits[b - 1]) ok = false;
      prev = band_sign;
    }
    if (ok) best = std::abs(lambda);
  }
  return best;
}

// Every split of the reference size over the bands (each band at least one
// point) is screened; the best by |lambda|, a lower bound for the class
// minimum, are returned for the full precision exchange.
std::vector<std::vector<RefPoint>> search_layouts(const std::vector<ChartSegment>& segs, int n,
                                                  const ClassPattern& cls) {
  int m = static_cast<int>(segs.size());
  int N = 2 * n + 2;
  if (N < m) return {};
  QuickPattern qp;
  for (const auto& s : segs) {
    qp.lo.push_back(s.lo.to_double());
    qp.hi.push_back(s.hi.to_double());
    qp.sign.push_back(s.sign);
  }
  for (int j = 0; j + 1 < m; ++j) qp.bits.push_back(cls.sigma->bit((cls.first_band + j) % m));

  std::vector<std::pair<double, std::vector<int>>> found;
  std::vector<int> c(m, 1);
  int visited = 0;
  std::vector<double> t;
  std::vector<int> seg;
  auto visit = [&](auto&& self, int s, int left) -> void {
    if (visited >= kMaxLayouts) return;
    if (s == m - 1) {
      c[s] = left;
      ++visited;
      t.clear();
      seg.clear();
      for (int b = 0; b < m; ++b) {
        double mid = (qp.lo[b] + qp.hi[b]) / 2, half = (qp.hi[b] - qp.lo[b]) / 2;
        for (int i = 0; i < c[b]; ++i) {
          t.push_back(c[b] == 1 ? mid : mid - half * std::cos(std::numbers::pi * i / (c[b] - 1)));
          seg.push_back(b);
        }
      }
      auto lam = quick_level(t, seg, n, qp);
      if (lam) found.emplace_back(*lam, c);
      return;
    }
    for (int k = 1; k <= left - (m - 1 - s); ++k) {
      c[s] = k;
      self(self, s + 1, left - k);
    }
  };
  visit(visit, 0, N);
  std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<std::vector<RefPoint>> out;
  for (const auto& f : found) {
    if (static_cast<int>(out.size()) >= kScreenedLayouts) break;
    out.push_back(layout_reference(segs, f.second));
  }
  return out;
}

// Moves each reference point the fraction d of the way to its target,
// where both lie on the same band; elsewhere the target wins.
std::optional<std::vector<RefPoint>> blend(const std::vector<RefPoint>& from, const std::vector<RefPoint>& to,
                                           const Real& d) {
  if (d >= 1 || from.size() != to.size()) return to;
  std::vector<RefPoint> out = to;
  for (size_t i = 0; i < out.size(); ++i)
    if (from[i].segment == to[i].segment) out[i].t = from[i].t + d * (to[i].t - from[i].t);
  for (size_t i = 0; i + 1 < out.size(); ++i)
    if (!(out[i].t < out[i + 1].t)) return std::nullopt;
  return out;
}

// Swap the worst point into the reference keeping the alternation.
std::optional<std::vector<RefPoint>> single_exchange(const std::vector<RefPoint>& ref, const Step& st,
                                                      const Extremum& worst) {
  std::vector<RefPoint> out = ref;
  int N = static_cast<int>(ref.size());
  int lam = sgn(st.lambda);
  auto sign_at = [&](int i) { return lam * (i % 2 == 0 ? 1 : -1); };
  int v = sgn(worst.value);
  for (const auto& r : ref)
    if (r.t == worst.t) return std::nullopt;
  int k = 0;
  while (k < N && ref[k].t < worst.t) ++k;
  RefPoint p{worst.t, worst.segment};
  if (k == 0) {
    if (sign_at(0) == v) {
      out[0] = p;
    } else {
      out.pop_back();
      out.insert(out.begin(), p);
    }
  } else if (k == N) {
    if (sign_at(N - 1) == v) {
      out[N - 1] = p;
    } else {
      out.erase(out.begin());
      out.push_back(p);
    }
  } else {
    out[sign_at(k - 1) == v ? k - 1 : k] = p;
  }
  return out;
}

RationalFunction product(const RationalFunction& a, const RationalFunction& b) {
  return RationalFunction(poly_mul(a.numerator(), b.numerator()), poly_mul(a.denominator(), b.denominator()));
}

Real finite_sample(const RationalFunction& R, const Band& b) {
  for (double f : {0.5, 0.25, 0.75}) {
    ExtendedPoint x = b.at_fraction(Real(f));
    if (x.is_infinite()) continue;
    return R(x.value());
  }
  return R(b.lo.is_infinite() ? b.hi.value() : b.lo.value());
}

RationalFunction negate(const RationalFunction& R) {
  return RationalFunction(poly_scale(R.numerator(), Real(-1)), R.denominator());
}

// Degree-one factor negative only on a short sub-arc of the gap, so that Q
// picks up one sign change there.
RationalFunction flip_factor(const BandSystem& E, int gap) {
  int m = E.size();
  Arc g(E[gap].hi, E[(gap + 1) % m].lo);
  ExtendedPoint p = g.at_fraction(Real(0.45)), z = g.at_fraction(Real(0.55));
  Poly num = z.is_infinite() ? Poly{Real(1), Real(0)} : Poly{-z.value(), Real(1)};
  Poly den = p.is_infinite() ? Poly{Real(1), Real(0)} : Poly{-p.value(), Real(1)};
  RationalFunction M(num, den);
  if (finite_sample(M, E[0]) < 0) M = negate(M);
  return M;
}

struct Run {
  Step step;
  std::vector<Real> trace;
  int iterations = 0;
  bool converged = false;
  bool boundary = false;
  Real D;
};

// Remez exchange from a starting reference. nullopt if the reference has no
// class-consistent levelled solution.
std::optional<Run> exchange(std::vector<RefPoint> ref, const SolverChart& chart, const ClassPattern& cls,
                            const SolverConfig& cfg, int n) {
  const int N = 2 * n + 2;
  const Real conv_tol = ldexp(Real(1), -cfg.precision.bits / 3);
  const Real slack = ldexp(Real(1), -cfg.precision.bits / 2);
  Mobius from_chart = chart.to_chart.inverse();
  auto first = levelled_step(ref, n, cls);
  if (!first) return std::nullopt;
  Run run{std::move(*first), {}, 0, false, false, Real(0)};
  run.trace.push_back(abs(run.step.lambda));
  for (; run.iterations < cfg.max_iterations; ++run.iterations) {
    auto delta = step_error(run.step, chart, from_chart, n);
    std::vector<Extremum> ext;
    try {
      ext = local_extrema(delta, cfg, N);
    } catch (const GridTooCoarse&) {
      run.D = abs(run.step.lambda);
      return run;
    }
    run.D = Real(0);
    const Extremum* worst = nullptr;
    for (const auto& e : ext)
      if (abs(e.value) > run.D) {
        run.D = abs(e.value);
        worst = &e;
      }
    if (run.D - abs(run.step.lambda) <= conv_tol * run.D) {
      run.converged = true;
      return run;
    }

    // Full exchange first, then the single worst point; each is damped
    // towards the current reference until the class is kept and the
    // levelled error does not drop.
    std::vector<std::vector<RefPoint>> targets;
    auto a = alternating_subsequence(ext);
    if (static_cast<int>(a.size()) >= N) {
      trim_cyclic(a, static_cast<size_t>(N), [](const Extremum& e) { return abs(e.value); });
      targets.push_back(to_reference(a));
    }
    if (auto single = single_exchange(ref, run.step, *worst)) targets.push_back(std::move(*single));
    std::optional<std::vector<RefPoint>> next;
    std::optional<Step> candidate;
    bool boundary = false;
    for (const auto& target : targets) {
      Real damp(cfg.exchange_damping);
      for (int k = 0; k < kDampingSteps && !candidate; ++k, damp /= 2) {
        auto trial = blend(ref, target, damp);
        if (!trial) continue;
        auto st = levelled_step(*trial, n, cls, &boundary);
        if (st && abs(st->lambda) >= abs(run.step.lambda) * (1 - slack)) {
          next = std::move(trial);
          candidate = std::move(st);
        }
      }
      if (candidate) break;
    }
    if (!candidate) {
      run.boundary = boundary;
      return run;
    }
    ref = std::move(*next);
    run.step = std::move(*candidate);
    run.trace.push_back(abs(run.step.lambda));
  }
  return run;
}

}  // namespace

SolverConfig SolverConfig::for_precision(int bits) {
  SolverConfig c;
  c.precision = Precision::of(bits);
  c.certificate_tolerance = std::min(1e-10 * std::exp2((256.0 - bits) / 4.0), 1e-4);
  return c;
}

void SolverConfig::validate() const {
  if (precision.bits < 53) throw DomainError("precision below 53 bits");
  if (max_iterations < 1) throw DomainError("max_iterations must be positive");
  if (!(exchange_damping > 0 && exchange_damping <= 1)) throw DomainError("exchange_damping must lie in (0,1]");
  if (!(certificate_tolerance > 0 && std::isfinite(certificate_tolerance)))
    throw DomainError("certificate_tolerance must be positive and finite");
  if (grid_density < 0) throw DomainError("grid_density must be non-negative");
}

SolverChart make_chart(const BandSystem& E) {
  int m = E.size();
  // Infinity goes to the middle of the widest gap of E; the widest spacing
  // between endpoints may lie inside a band.
  const Real pi = Real::pi();
  Real best(-1), mid;
  for (int j = 0; j < m; ++j) {
    Real a = E[j].hi.circle_position();
    Real len = E[(j + 1) % m].lo.circle_position() - a;
    if (len < 0) len += pi;
    if (len > best) {
      best = len;
      mid = a + len / 2;
    }
  }
  Mobius rot(cos(mid), -sin(mid), sin(mid), cos(mid));
  std::vector<Real> lo(m), hi(m);
  int r = 0;
  for (int j = 0; j < m; ++j) {
    lo[j] = rot(E[j].lo).value();
    hi[j] = rot(E[j].hi).value();
    if (lo[j] < lo[r]) r = j;
  }
  Real L = lo[r], H = hi[(r + m - 1) % m];
  Mobius aff(2 / (H - L), -(L + H) / (H - L), Real(0), Real(1));
  SolverChart chart;
  chart.to_chart = aff.compose(rot);
  chart.first_band = r;
  for (int j = 0; j < m; ++j) {
    int b = (r + j) % m;
    chart.segments.push_back({aff(lo[b]), aff(hi[b]), b, kind_sign(E[b].kind)});
  }
  chart.segments.front().lo = Real(-1);
  chart.segments.back().hi = Real(1);
  return chart;
}

ErrorFunction::ErrorFunction(std::function<Real(const Real&)> delta, std::vector<ChartSegment> segments,
                             Mobius from_chart, int degree_hint)
    : delta_(std::move(delta)), segments_(std::move(segments)), from_chart_(std::move(from_chart)),
      degree_hint_(degree_hint) {
  if (segments_.empty()) throw DomainError("error function needs at least one segment");
  for (const auto& s : segments_)
    if (!(s.lo < s.hi)) throw DomainError("segment bounds out of order");
}

ErrorFunction::ErrorFunction(const RationalFunction& R, const BandSystem& E) {
  auto chart = make_chart(E);
  segments_ = chart.segments;
  from_chart_ = chart.to_chart.inverse();
  degree_hint_ = R.degree();
  RationalFunction Rc = R.compose_right(from_chart_);
  const Poly& den = Rc.denominator();
  Real tiny = ldexp(Real(1), -working_bits() / 2);
  int deg = effective_degree(den, tiny);
  if (deg >= 1) {
    auto roots = poly_roots(std::span<const Real>(den.data(), static_cast<size_t>(deg) + 1));
    Real im_tol = ldexp(Real(1), -working_bits() / 4);
    for (const auto& z : roots) {
      if (abs(z.im) > im_tol * (1 + abs(z.re))) continue;
      for (const auto& s : segments_)
        if (z.re >= s.lo && z.re <= s.hi)
          throw DomainError("R has a pole on band " + std::to_string(s.band + 1));
    }
  }
  auto segs = segments_;
  delta_ = [Rc, segs](const Real& t) { return Rc(t) - Real(segs[segment_of(segs, t)].sign); };
}

std::vector<Extremum> local_extrema(const ErrorFunction& delta, const SolverConfig& cfg, int expected) {
  int base = cfg.grid_density > 0 ? cfg.grid_density : 16 * (delta.degree_hint() + 2);
  for (int attempt = 0; attempt <= 4; ++attempt) {
    auto ext = scan(delta, base << attempt);
    if (expected <= 0 || static_cast<int>(alternating_subsequence(ext).size()) >= expected) return ext;
  }
  throw GridTooCoarse("fewer than " + std::to_string(expected) + " alternating extrema after " +
                      std::to_string(base << 4) + " grid points per band");
}

std::vector<Extremum> alternating_subsequence(const std::vector<Extremum>& ext) {
  std::vector<Extremum> out;
  for (const auto& e : ext) {
    int s = sgn(e.value);
    if (s == 0) continue;
    if (!out.empty() && sgn(out.back().value) == s) {
      if (abs(e.value) > abs(out.back().value)) out.back() = e;
      continue;
    }
    out.push_back(e);
  }
  while (out.size() >= 2 && sgn(out.front().value) == sgn(out.back().value)) {
    if (abs(out.front().value) < abs(out.back().value))
      out.erase(out.begin());
    else
      out.pop_back();
  }
  return out;
}

Certification certify(const RationalFunction& R, const BandSystem& E, const SolverConfig& cfg) {
  cfg.validate();
  ScopedPrecision guard(cfg.precision.bits + kGuardBits);
  ErrorFunction delta(R, E);
  int n = R.degree();
  Certification out;
  out.required = 2 * n + 2;
  auto ext = local_extrema(delta, cfg);
  Real D(0);
  for (const auto& e : ext) D = max(D, abs(e.value));
  Real level = D * (1 - Real(cfg.certificate_tolerance));
  std::vector<Extremum> top;
  for (const auto& e : ext)
    if (abs(e.value) >= level) top.push_back(e);
  auto alt = alternating_subsequence(top);

  auto& c = out.certificate;
  c.achieved_deviation = D;
  c.degree = n;
  c.count = static_cast<int>(alt.size());
  auto chart = make_chart(E);
  for (const auto& e : alt) {
    ExtendedPoint x = e.x;
    if (e.endpoint) {
      // Report band edges exactly rather than their round trip through the chart.
      const Band& b = E[delta.segments()[e.segment].band];
      Real dlo = abs(chart.to_chart(b.lo).value() - e.t), dhi = abs(chart.to_chart(b.hi).value() - e.t);
      x = dlo <= dhi ? b.lo : b.hi;
    }
    c.points.push_back(x);
    c.signs.push_back(sgn(e.value));
  }
  if (c.count >= out.required) {
    out.certified = true;
  } else if (static_cast<int>(ext.size()) < out.required) {
    out.refusal = "too few alternation points: " + std::to_string(ext.size()) + " extrema of " +
                  std::to_string(out.required);
  } else if (static_cast<int>(top.size()) < out.required) {
    out.refusal = "ripple heights unequal: " + std::to_string(top.size()) + " extrema at the deviation level, " +
                  std::to_string(out.required) + " needed";
  } else {
    out.refusal = "non-alternating signs: " + std::to_string(c.count) + " alternations at the deviation level";
  }
  return out;
}

RationalFunction initial_guess(const BandSystem& E, int n, const SignClass& sigma, Precision prec) {
  int m = E.size();
  if (n < 1) throw DomainError("degree must be positive");
  if (sigma.band_count() != m) throw DomainError("sign class has the wrong number of bands");
  if (sigma.degree_parity() != n % 2) throw DomainError("sign class parity does not match the degree");
  ScopedPrecision guard(prec.bits + kGuardBits);

  std::vector<int> changes;
  for (int j = 0; j < m; ++j)
    if (E[j].kind != E[(j + 1) % m].kind) changes.push_back(j);
  std::vector<int> flips;
  for (int j = 0; j < m; ++j)
    if (E[j].kind == E[(j + 1) % m].kind && sigma.bit(j)) flips.push_back(j);

  struct Pair {
    int ga, gb, degree;
    bool keep;
  };
  std::vector<Pair> pairs;
  for (size_t i = 0; i + 1 < changes.size(); i += 2) {
    int ga = changes[i], gb = changes[i + 1];
    int a = sigma.bit(ga), b = sigma.bit(gb);
    if (a != b) {
      pairs.push_back({ga, gb, 1, b == 1});
    } else if (a == 0) {
      pairs.push_back({ga, gb, 2, true});
    } else {
      pairs.push_back({ga, gb, 1, false});
      flips.push_back(gb);
    }
  }
  int minimal = static_cast<int>(flips.size());
  for (const auto& p : pairs) minimal += p.degree;
  if (n < minimal)
    throw ClassEmpty("class likely empty: sigma " + sigma.str() + " forces degree " + std::to_string(minimal) +
                     " > " + std::to_string(n));
  int extra = n - minimal;
  for (size_t i = 0; extra > 0 && !pairs.empty(); i = (i + 1) % pairs.size(), extra -= 2) pairs[i].degree += 2;

  RationalFunction R = RationalFunction::constant(Real(1));
  for (const auto& p : pairs) {
    Arc eplus(E[(p.ga + 1) % m].lo, E[p.gb].hi);
    Arc eminus(E[(p.gb + 1) % m].lo, E[p.ga].hi);
    Real k = modulus_for_segments(eplus, eminus);
    auto Z = build_zolotarev(p.degree, k, prec);
    const Real& k1 = Z.modulus.k;
    auto f = adapt_to_segments(Z, eplus, eminus, p.keep);
    f = RationalFunction(poly_scale(f.numerator(), 2 * k1 / (1 + k1)), f.denominator());
    R = product(R, f);
  }
  for (int g : flips) R = product(R, flip_factor(E, g));
  if (extra > 0) {
    // Single-kind systems: pad the formal degree.
    Poly num = R.numerator(), den = R.denominator();
    num.resize(static_cast<size_t>(n) + 1, Real(0));
    den.resize(static_cast<size_t>(n) + 1, Real(0));
    R = RationalFunction(num, den);
  }
  if (sgn(finite_sample(R, E[0])) != kind_sign(E[0].kind)) R = negate(R);
  return R;
}

SolveResult solve(const BandSystem& E, int n, const SignClass& sigma, const SolverConfig& cfg) {
  cfg.validate();
  int m = E.size();
  if (n < 1) throw DomainError("degree must be positive");
  if (sigma.band_count() != m) throw DomainError("sign class has the wrong number of bands");
  if (sigma.degree_parity() != n % 2) throw DomainError("sign class parity does not match the degree");
  bool has_pass = false, has_stop = false;
  for (const auto& b : E.bands()) (b.kind == BandKind::pass ? has_pass : has_stop) = true;
  if (!has_pass || !has_stop) throw DomainError("band system needs both pass and stop bands");

  ScopedPrecision guard(cfg.precision.bits + kGuardBits);
  const int N = 2 * n + 2;

  SolverChart chart = make_chart(E);
  Mobius from_chart = chart.to_chart.inverse();
  ClassPattern cls{&chart.segments, &sigma, chart.first_band, m};

  RationalFunction seed = initial_guess(E, n, sigma, cfg.precision);
  RationalFunction seed_chart = seed.compose_right(from_chart);
  auto segs = chart.segments;
  ErrorFunction seed_delta(
      [seed_chart, segs](const Real& t) { return seed_chart(t) - Real(segs[segment_of(segs, t)].sign); },
      chart.segments, from_chart, n);
  auto alt = alternating_subsequence(local_extrema(seed_delta, cfg));
  trim_cyclic(alt, static_cast<size_t>(N), [](const Extremum& e) { return abs(e.value); });
  auto ref = to_reference(alt);
  pad_reference(ref, chart.segments, static_cast<size_t>(N));

  std::vector<std::vector<RefPoint>> starts;
  if (levelled_step(ref, n, cls)) starts.push_back(ref);
  // Screening is done in double and can pass layouts whose denominator has
  // a pole between samples; those are dropped here.
  for (auto& r : search_layouts(chart.segments, n, cls)) {
    if (static_cast<int>(starts.size()) > kStarts) break;
    if (levelled_step(r, n, cls)) starts.push_back(std::move(r));
  }
  if (starts.empty()) throw ClassEmpty("no sign-consistent reference for class " + sigma.str());

  std::optional<NonConverged> failure;
  for (const auto& first : starts) {
    auto run = exchange(first, chart, cls, cfg, n);
    if (!run) continue;
    RationalFunction R = RationalFunction(run->step.num, run->step.den).compose_right(chart.to_chart).normalized();
    std::string why;
    if (!run->converged) {
      why = "no convergence for class " + sigma.str() + " after " + std::to_string(run->iterations) + " iterations";
      if (run->boundary) why += "; a pole is entering a band, the class minimum appears to lie on the class boundary";
    } else if (!(run->D < 1)) {
      why = "deviation reached 1";
    } else {
      Real widened = min(run->D * (1 + ldexp(Real(1), -cfg.precision.bits / 4)), (1 + run->D) / 2);
      try {
        if (sign_class_of(R, E, RangeSystem::from_mu(widened)) != sigma) why = "iterate left class " + sigma.str();
      } catch (const NotInClassError& e) {
        why = std::string("final iterate not in its class: ") + e.what();
      }
    }
    if (why.empty()) {
      auto cert = certify(R, E, cfg);
      if (cert.certified)
        return SolveResult{R, cert.certificate.achieved_deviation, cert.certificate, sigma, run->trace,
                           run->iterations};
      why = "certificate refused: " + cert.refusal;
    }
    if (!failure) failure.emplace(why, R, run->D, run->trace);
  }
  if (!failure) throw ClassEmpty("no sign-consistent reference for class " + sigma.str());
  throw *failure;
}

std::vector<ClassOutcome> solve_each_class(const BandSystem& E, int n, const SolverConfig& cfg) {
  std::vector<ClassOutcome> out;
  for (const auto& sigma : SignClass::all(E.size(), n % 2)) {
    ClassOutcome o{sigma, std::nullopt, {}};
    try {
      o.result = solve(E, n, sigma, cfg);
    } catch (const ClassEmpty& e) {
      o.failure = std::string("class empty: ") + e.what();
    } catch (const NonConverged& e) {
      o.failure = std::string("not converged: ") + e.what();
    } catch (const GridTooCoarse& e) {
      o.failure = std::string("grid too coarse: ") + e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

SolveResult solve(const BandSystem& E, int n, const SolverConfig& cfg) {
  auto outcomes = solve_each_class(E, n, cfg);
  const SolveResult* best = nullptr;
  for (const auto& o : outcomes)
    if (o.result && (!best || o.result->mu < best->mu)) best = &*o.result;
  if (!best) throw ClassEmpty("no sign class produced a certified minimizer");
  return *best;
}

}  // namespace mb
