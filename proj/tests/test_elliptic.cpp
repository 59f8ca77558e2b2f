#include <doctest.h>

#include "multiband/elliptic.hpp"
#include "support.hpp"

using namespace mb;
using mbtest::abs_err;
using mbtest::rel_err;

namespace {

const Precision P256{256};
const Precision P128{128};

// One descending Landen step: sn(u, k) from sn(v, k1), k1 = (1-k')/(1+k').
Real landen_sn(const Real& u, const Real& k, Precision prec) {
  ScopedPrecision g(prec.bits + 32);
  Real kp = sqrt((1 - k) * (1 + k));
  Real k1 = (1 - kp) / (1 + kp);
  Real v = u / (1 + k1);
  Real s = jacobi_sn_cn_dn(v, k1, prec).sn;
  return (1 + k1) * s / (1 + k1 * s * s);
}

}  // namespace

TEST_CASE("agm fixed points and the Gauss constant") {
  ScopedPrecision g(256);
  CHECK(abs_err(agm(Real(1), Real(1), P256), Real(1)) == 0.0);
  CHECK(abs_err(agm(Real(3.5), Real(3.5), P256), Real(3.5)) == 0.0);

  // agm(1, sqrt 2) = sqrt 2 * pi / (2 K(1/sqrt 2)).
  Real k = 1 / sqrt(Real(2));
  Real expected = sqrt(Real(2)) * Real::pi() / (2 * mbtest::quadrature_K(k));
  CHECK(rel_err(agm(Real(1), sqrt(Real(2)), P256), expected) < 1e-70);
}

TEST_CASE("agm iterates bracket the limit") {
  ScopedPrecision g(256);
  auto it = agm_iterates(Real(1), Real("0.001"), P256);
  Real limit = agm(Real(1), Real("0.001"), P256);
  for (size_t i = 1; i < it.size(); ++i) {
    const auto& [a, b] = it[i];
    CHECK(b <= limit * (1 + Real(1e-70)));
    CHECK(a >= limit * (1 - Real(1e-70)));
    CHECK(a <= it[i - 1].first);
    CHECK(b >= it[i - 1].second);
  }
  CHECK_THROWS_AS(agm(Real(-1), Real(1), P256), DomainError);
  CHECK_THROWS_AS(agm(Real(0), Real(1), P256), DomainError);
}

TEST_CASE("complete elliptic integrals") {
  ScopedPrecision g(256);
  SUBCASE("degenerate modulus") {
    auto q = complete_elliptic(Real("1e-20"), P256);
    CHECK(abs_err(q.K, Real::pi() / 2) < 1e-38);
  }
  SUBCASE("self-complementary modulus") {
    auto q = complete_elliptic(1 / sqrt(Real(2)), P256);
    CHECK(rel_err(q.K, q.K_prime) < 1e-70);
  }
  SUBCASE("quadrature oracle at k = 0.5") {
    auto q = complete_elliptic(Real("0.5"), P256);
    CHECK(rel_err(q.K, mbtest::quadrature_K(Real("0.5"))) < std::ldexp(1.0, 8 - 256));
    Real kp = sqrt(1 - Real("0.25"));
    CHECK(rel_err(q.K_prime, mbtest::quadrature_K(kp)) < std::ldexp(1.0, 8 - 256));
  }
  CHECK_THROWS_AS(complete_elliptic(Real(0), P256), DomainError);
  CHECK_THROWS_AS(complete_elliptic(Real(1), P256), DomainError);
  CHECK_THROWS_AS(complete_elliptic(Real("1.5"), P256), DomainError);
}

TEST_CASE("theta3 and the modulus-nome relation") {
  ScopedPrecision g(256);
  CHECK(abs_err(theta3(Real(50), P256), Real(1)) < 1e-60);
  CHECK_THROWS_AS(theta3(Real(0), P256), DomainError);

  Real t3 = theta3(Real(1), P256);
  auto q = complete_elliptic(1 / sqrt(Real(2)), P256);
  CHECK(rel_err(Real::pi() / 2 * t3 * t3, q.K) < 1e-70);

  for (const char* t : {"0.5", "1", "2"}) {
    Real tau(t);
    auto m = EllipticModulus::from_tau(tau, P256);
    auto qq = complete_elliptic(m, P256);
    Real th = theta3(tau, P256);
    CHECK(rel_err(Real::pi() / 2 * th * th, qq.K) < 1e-28);
    // Round trip k -> tau -> k.
    auto back = EllipticModulus::from_k(m.k, P256);
    CHECK(rel_err(back.tau_im, tau) < 1e-60);
    CHECK(abs_err(m.k * m.k + m.k_complement * m.k_complement, Real(1)) < 1e-70);
  }

  ScopedPrecision g128(128);
  Real tau2(2);
  auto m2 = EllipticModulus::from_tau(tau2, P128);
  Real th2 = theta3(tau2, P128);
  CHECK(rel_err(Real::pi() / 2 * th2 * th2, complete_elliptic(m2, P128).K) < 1e-30);
}

TEST_CASE("jacobi functions: special values") {
  ScopedPrecision g(256);
  auto z = jacobi_sn_cn_dn(Real(0), Real("0.3"), P256);
  CHECK(abs_err(z.sn, Real(0)) == 0.0);
  CHECK(abs_err(z.cn, Real(1)) < 1e-70);

  Real k7("0.7");
  auto K7 = complete_elliptic(k7, P256).K;
  CHECK(abs_err(jacobi_sn_cn_dn(K7, k7, P256).sn, Real(1)) < 1e-70);

  Real tiny("1e-40");
  for (int i = 0; i <= 60; ++i) {
    Real u = Real(i) / 10;
    CHECK(abs_err(jacobi_sn_cn_dn(u, tiny, P256).sn, sin(u)) < 1e-70);
  }

  Real k4("0.4");
  auto q4 = complete_elliptic(k4, P256);
  auto at_corner = jacobi_sn_cn_dn(Complex(q4.K, q4.K_prime), k4, P256);
  CHECK(abs_err(at_corner.sn, Complex(1 / k4)) < 1e-60);
  // Landen oracle for the real quarter-period value feeding the corner.
  CHECK(abs_err(landen_sn(q4.K, k4, P256), Real(1)) < 1e-60);
}

TEST_CASE("jacobi functions: identities, periods and Landen consistency") {
  ScopedPrecision g(128);
  mbtest::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Real k(rng.uniform(0.01, 0.99));
    auto m = EllipticModulus::from_k(k, P128);
    Complex u(Real(rng.uniform(-4, 4)), Real(rng.uniform(-1.5, 1.5)) * m.tau_im);
    JacobiComplex j;
    try {
      j = jacobi_sn_cn_dn(u, m, P128);
    } catch (const PoleError&) {
      continue;
    }
    CHECK(abs_err(j.sn * j.sn + j.cn * j.cn, Complex(1)) < 1e-30 * std::max(1.0, abs(j.sn).to_double() * abs(j.sn).to_double()));
    CHECK(abs_err(j.dn * j.dn + (m.k * m.k) * j.sn * j.sn, Complex(1)) <
          1e-30 * std::max(1.0, abs(j.sn).to_double() * abs(j.sn).to_double()));
  }

  for (int i = 0; i < 100; ++i) {
    Real k(rng.uniform(0.05, 0.95));
    auto m = EllipticModulus::from_k(k, P128);
    auto q = complete_elliptic(m, P128);
    Real u(rng.uniform(-5, 5));
    Real s = jacobi_sn_cn_dn(u, m, P128).sn;
    CHECK(abs_err(jacobi_sn_cn_dn(u + 4 * q.K, m, P128).sn, s) < 1e-28);
    CHECK(abs_err(landen_sn(u, k, P128), s) < 1e-28);
    Complex shifted = jacobi_sn_cn_dn(Complex(u, 2 * q.K_prime), m, P128).sn;
    CHECK(abs_err(shifted, Complex(s)) < 1e-28);
  }
}

TEST_CASE("jacobi functions signal poles") {
  ScopedPrecision g(256);
  Real k("0.6");
  auto q = complete_elliptic(k, P256);
  CHECK_THROWS_AS(jacobi_sn_cn_dn(Complex(Real(0), q.K_prime), k, P256), PoleError);
  CHECK_THROWS_AS(jacobi_sn_cn_dn(Complex(2 * q.K, 3 * q.K_prime), k, P256), PoleError);
  CHECK_NOTHROW(jacobi_sn_cn_dn(Complex(Real("0.1"), q.K_prime), k, P256));
}

TEST_CASE("rectangle map normalization") {
  ScopedPrecision g(256);
  Real tau("0.8");
  auto m = EllipticModulus::from_tau(tau, P256);
  CHECK(abs_err(rectangle_map(Complex(-1), tau, P256), Complex(-1)) < 1e-70);
  CHECK(abs_err(rectangle_map(Complex(0), tau, P256), Complex(0)) < 1e-70);
  CHECK(abs_err(rectangle_map(Complex(1), tau, P256), Complex(1)) < 1e-70);
  CHECK(abs_err(rectangle_map(Complex(Real(1), tau), tau, P256), Complex(1 / m.k)) < 1e-60);
  CHECK(abs_err(rectangle_map(Complex(Real(-1), tau), tau, P256), Complex(-1 / m.k)) < 1e-60);

  // Top edge: x(s + tau) = 1 / (k sn(K s)), real with modulus above 1/k.
  auto K = complete_elliptic(m, P256).K;
  for (const char* sv : {"-0.9", "-0.3", "0.2", "0.7"}) {
    Real s(sv);
    Complex x = rectangle_map(Complex(s, tau), tau, P256);
    Real direct = 1 / (m.k * jacobi_sn_cn_dn(K * s, m, P256).sn);
    CHECK(abs_err(x, Complex(direct)) < 1e-55);
    CHECK(abs(x.re) >= 1 / m.k);
    CHECK(x.re.sign() == s.sign());
  }
  CHECK_THROWS_AS(rectangle_map(Complex(Real(0), tau), tau, P256), PoleError);
  CHECK_THROWS_AS(rectangle_map(Complex(Real("1.5")), tau, P256), DomainError);
  CHECK_THROWS_AS(rectangle_map(Complex(Real(0), Real(2)), tau, P256), DomainError);
}
