#pragma once

// Dense polynomials (ascending coefficients), root finding and small
// dense linear algebra at working precision.

#include <span>
#include <vector>

#include "multiband/complex.hpp"

namespace mb {

using Poly = std::vector<Real>;
using CPoly = std::vector<Complex>;

Real poly_eval(std::span<const Real> p, const Real& x);
Complex poly_eval(std::span<const Real> p, const Complex& x);
Complex poly_eval(std::span<const Complex> p, const Complex& x);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Real& s);
Poly poly_derivative(const Poly& a);
CPoly poly_mul(const CPoly& a, const CPoly& b);

/// Monic product of (x - r) over the given roots.
CPoly poly_from_roots(std::span<const Complex> roots);

/// Index of the highest coefficient that is not negligible relative to the
/// largest one (|c| > rel_tol * max|c|). Returns -1 for the zero polynomial.
int effective_degree(std::span<const Real> p, const Real& rel_tol);
int effective_degree(std::span<const Complex> p, const Real& rel_tol);

/// All complex roots of a polynomial with nonzero leading coefficient
/// (Aberth-Ehrlich with Newton polishing). Deterministic starting points.
std::vector<Complex> poly_roots(std::span<const Real> p);
std::vector<Complex> poly_roots(std::span<const Complex> p);

/// Roots grouped by proximity: each cluster is represented by its centroid
/// and the number of roots it absorbed (the multiplicity).
struct RootCluster {
  Complex center;
  int multiplicity = 0;
};
std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots, const Real& radius);

/// Row-major dense square or rectangular matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<Real> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  Real& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Real& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

/// LU factorization with partial pivoting.
class LU {
 public:
  explicit LU(Matrix m);
  bool singular() const { return singular_; }
  Real determinant() const;
  std::vector<Real> solve(std::vector<Real> b) const;

 private:
  Matrix lu_;
  std::vector<int> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

std::vector<Real> solve_linear(const Matrix& m, const std::vector<Real>& b);

}  // namespace mb
