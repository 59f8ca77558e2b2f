#pragma once

// Shared helpers and independent oracles for the test suites.

#include <random>

#include "multiband/complex.hpp"

namespace mbtest {

using mb::Complex;
using mb::Real;

inline double rel_err(const Real& a, const Real& b) {
  Real d = abs(a - b);
  Real s = max(abs(b), Real(1e-300));
  return (d / s).to_double();
}

inline double abs_err(const Real& a, const Real& b) { return abs(a - b).to_double(); }

inline double abs_err(const Complex& a, const Complex& b) { return abs(a - b).to_double(); }

/// K(k) = int_0^{pi/2} dphi / sqrt(1 - k^2 sin^2 phi) by the trapezoid rule
/// on the full period, which converges geometrically for this analytic
/// periodic integrand. Independent of the AGM route.
inline Real quadrature_K(const Real& k, int nodes = 400) {
  Real pi = Real::pi();
  Real h = 2 * pi / Real(nodes);
  Real sum;
  for (int j = 0; j < nodes; ++j) {
    Real s = sin(h * Real(j));
    sum += 1 / sqrt(1 - k * k * s * s);
  }
  // The integrand has period pi; the full-period integral is four times K.
  return sum * h / 4;
}

/// Deterministic generator for property-style tests.
class Rng {
 public:
  explicit Rng(unsigned seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mbtest
