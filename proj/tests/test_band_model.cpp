#include <doctest.h>

#include <algorithm>

#include "multiband/band_model.hpp"
#include "support.hpp"

using namespace mb;
using mbtest::abs_err;
using mbtest::rel_err;

namespace {

BandSystem two_bands() {
  return BandSystem({Band(Real(1), Real(2), BandKind::pass), Band(Real(-2), Real(-1), BandKind::stop)});
}

RangeSystem range(double a, double b, double c, double d) { return RangeSystem(Arc(a, b), Arc(c, d)); }

Mobius random_mobius(mbtest::Rng& rng) {
  for (;;) {
    Real a(rng.uniform(-3, 3)), b(rng.uniform(-3, 3)), c(rng.uniform(-3, 3)), d(rng.uniform(-3, 3));
    if (abs(a * d - b * c) > Real("0.1")) return Mobius(a, b, c, d);
  }
}

}  // namespace

TEST_CASE("extended points and arcs") {
  ScopedPrecision g(256);
  ExtendedPoint inf = ExtendedPoint::infinity();
  CHECK(cyclic_less(inf, ExtendedPoint(-1e300)));
  CHECK_FALSE(cyclic_less(ExtendedPoint(5), inf));
  CHECK(ExtendedPoint(Real::infinity()) == inf);
  CHECK(ExtendedPoint::from_circle_position(Real(0)) == inf);
  CHECK(abs_err(ExtendedPoint::from_circle_position(ExtendedPoint(Real("0.3")).circle_position()).value(), Real("0.3")) <
        1e-70);

  Arc through_inf(Real(3), Real(-3));
  CHECK(through_inf.wraps());
  CHECK(through_inf.contains(inf));
  CHECK(through_inf.contains(ExtendedPoint(10)));
  CHECK_FALSE(through_inf.contains(ExtendedPoint(0)));
  CHECK(through_inf.midpoint() == inf);
  CHECK_THROWS_AS(Arc(Real(1), Real(1)), DomainError);
}

TEST_CASE("band system validation and canonical order") {
  ScopedPrecision g(256);
  auto E = two_bands();
  CHECK(E.size() == 2);
  CHECK(E[0].kind == BandKind::stop);
  CHECK(E[1].kind == BandKind::pass);
  CHECK(E.gap_contains_infinity(1));
  CHECK_FALSE(E.gap_contains_infinity(0));

  CHECK_THROWS_AS(BandSystem({Band(Real(1), Real(2), BandKind::pass)}), DomainError);
  CHECK_THROWS_AS(BandSystem({Band(Real(0), Real(2), BandKind::pass), Band(Real(1), Real(3), BandKind::stop)}),
                  DomainError);
  CHECK_THROWS_AS(BandSystem({Band(Real(0), Real(1), BandKind::pass), Band(Real(1), Real(3), BandKind::stop)}),
                  DomainError);
  CHECK_THROWS_AS(BandSystem({Band(Real(0), Real(1), BandKind::pass), Band(Real(2), Real(3), BandKind::pass)}),
                  DomainError);
  try {
    BandSystem({Band(Real(0), Real(1), BandKind::pass), Band(Real(5), Real(6), BandKind::pass),
                Band(Real("0.5"), Real(2), BandKind::stop)});
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("bands 1 and 3") != std::string::npos);
  }

  // Band through infinity closes the cycle.
  BandSystem W({Band(Real(4), Real(-4), BandKind::stop), Band(Real(-1), Real(1), BandKind::pass)});
  CHECK(W[0].kind == BandKind::pass);
  CHECK(W[1].wraps());
  CHECK_FALSE(W.gap_contains_infinity(1));
  CHECK_THROWS_AS(BandSystem({Band(Real(4), Real(-4), BandKind::stop), Band(Real(-5), Real(1), BandKind::pass)}),
                  DomainError);
}

TEST_CASE("indicator") {
  ScopedPrecision g(256);
  auto E = two_bands();
  CHECK(indicator(ExtendedPoint(Real("1.5")), E) == 1);
  CHECK(indicator(ExtendedPoint(Real(-2)), E) == -1);
  CHECK(indicator(ExtendedPoint(Real(0)), E) == std::nullopt);
  CHECK(indicator(ExtendedPoint::infinity(), E) == std::nullopt);
  for (int i = 0; i <= 20; ++i) {
    Real t = Real(i) / 20;
    CHECK(indicator(E[0].at_fraction(t), E) == -1);
    CHECK(indicator(E[1].at_fraction(t), E) == 1);
  }
}

TEST_CASE("cross ratio examples") {
  ScopedPrecision g(256);
  CHECK(abs_err(cross_ratio(range(-1.5, -0.5, 0.5, 1.5)), Real(4)) < 1e-70);
  CHECK(abs_err(cross_ratio(RangeSystem::from_mu(Real("0.5"))), Real(4)) < 1e-70);
  CHECK(abs_err(cross_ratio(range(-2, -1, 1, 2)), Real(9)) < 1e-70);
  CHECK(abs_err(cross_ratio(range(-2, -1, 1, 1.5)), Real(15)) < 1e-70);

  CHECK(abs_err(kappa_from_theta(Real("0.5")), Real("1.5625")) < 1e-70);
  CHECK(abs_err(cross_ratio(RangeSystem::from_theta(Real("0.5"))), Real("1.5625")) < 1e-70);
  CHECK(abs_err(kappa_from_theta(Real("0.1")), Real("25.5025")) < 1e-70);
  CHECK(abs_err(cross_ratio(RangeSystem::from_theta(Real("0.1"))), Real("25.5025")) < 1e-68);
  CHECK(abs_err(kappa_from_theta(1 - Real("1e-30")), Real(1)) < 1e-50);
  CHECK_THROWS_AS(kappa_from_theta(Real(1)), DomainError);
  CHECK_THROWS_AS(kappa_from_theta(Real(0)), DomainError);
  CHECK_THROWS_AS(range(-2, 1, -1, 2), DomainError);
}

TEST_CASE("cross ratio: projective invariance and monotonicity") {
  ScopedPrecision g(256);
  mbtest::Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(4);
    for (auto& x : v) x = rng.uniform(-10, 10);
    std::sort(v.begin(), v.end());
    if (v[3] - v[0] < 1e-3 || v[1] - v[0] < 1e-6 || v[2] - v[1] < 1e-6 || v[3] - v[2] < 1e-6) continue;
    auto F = range(v[0], v[1], v[2], v[3]);
    Real kappa = cross_ratio(F);
    CHECK(kappa > 1);

    Mobius T = random_mobius(rng);
    CHECK(rel_err(cross_ratio(apply_projective(T, F)), kappa) < 1e-25);

    // Shrink one of the arcs strictly inside itself.
    double s = rng.uniform(0.05, 0.95);
    auto shrunk = range(v[0], v[1], v[2] + s * (v[3] - v[2]) / 2, v[3] - s * (v[3] - v[2]) / 2);
    CHECK(cross_ratio(shrunk) > kappa);
  }

  auto F9 = range(-2, -1, 1, 2);
  Mobius shift(Real(1), Real(3), Real(0), Real(1));
  CHECK(abs_err(cross_ratio(apply_projective(shift, F9)), Real(9)) < 1e-70);
  CHECK_THROWS_AS(Mobius(Real(1), Real(2), Real(2), Real(4)), DomainError);
}

TEST_CASE("projective maps preserve kinds and identity is a no-op") {
  ScopedPrecision g(256);
  auto E = two_bands();
  auto same = apply_projective(Mobius::identity(), E);
  for (int j = 0; j < 2; ++j) {
    CHECK(same[j].lo == E[j].lo);
    CHECK(same[j].hi == E[j].hi);
    CHECK(same[j].kind == E[j].kind);
  }
  // x -> -1/x sends [1,2] to [-1,-1/2] and [-2,-1] to [1/2,1].
  auto flipped = apply_projective(Mobius(Real(0), Real(-1), Real(1), Real(0)), E);
  CHECK(flipped[0].kind == BandKind::pass);
  CHECK(abs_err(flipped[0].lo.value(), Real(-1)) == 0.0);
  auto mirrored = apply_projective(Mobius(Real(-1), Real(0), Real(0), Real(1)), E);
  CHECK(mirrored[0].kind == BandKind::pass);
  CHECK(abs_err(mirrored[0].lo.value(), Real(-2)) == 0.0);
  CHECK(abs_err(mirrored[0].hi.value(), Real(-1)) == 0.0);
}

TEST_CASE("sign classes: construction and enumeration") {
  SignClass s({1, 0, 1}, 1);
  CHECK(s.closing_bit() == 1);
  CHECK(s.str() == "101|1");
  CHECK(s.bit(3) == 1);
  CHECK_THROWS_AS(SignClass({1, 0, 1}, 0, 1), DomainError);
  CHECK_NOTHROW(SignClass({1, 1}, 1, 1));
  CHECK_THROWS_AS(SignClass({2}, 0), DomainError);

  auto all = SignClass::all(4, 0);
  CHECK(all.size() == 8);
  CHECK(all.front().str() == "000|0");
  CHECK(all.back().str() == "111|1");
  for (const auto& c : all) {
    int sum = c.closing_bit();
    for (int b : c.bits()) sum += b;
    CHECK(sum % 2 == 0);
  }
  // m = 2: the single free bit and the closing bit are tied by parity.
  CHECK(SignClass::all(2, 1).size() == 2);
  CHECK(SignClass({0}, 1).closing_bit() == 1);
}

TEST_CASE("sign class of simple fractions by lifting") {
  ScopedPrecision g(256);
  auto E = two_bands();
  // R = x: monotone through 0 on the gap (-1,1), wraps through infinity on the other.
  auto F1 = range(-2.5, -0.5, 0.5, 2.5);
  auto c1 = sign_class_of(RationalFunction({Real(0), Real(1)}, {Real(1)}), E, F1);
  CHECK(c1.str() == "0|1");

  // R = (x^2 + 1)/x: pole in the gap (-1,1), pole at infinity.
  RationalFunction R({Real(1), Real(0), Real(1)}, {Real(0), Real(1)});
  auto F2 = range(-3, -1.5, 1.5, 3);
  auto c2 = sign_class_of(R, E, F2);
  CHECK(c2.str() == "1|1");
  CHECK(c2.degree_parity() == 0);

  // Orientation-reversing value map: both pairs mix kinds, so both bits flip.
  Mobius beta(Real(-1), Real(0), Real(0), Real(1));
  auto lifted = sign_class_of(R.compose_left(beta), E, apply_projective(beta, F2));
  CHECK(lifted == apply_projective(beta, c2, E));
  CHECK(lifted.str() == "0|0");

  CHECK_THROWS_AS(sign_class_of(R, E, range(-3, -1.5, 2.2, 3)), NotInClassError);
}

TEST_CASE("sign class: value-map action agrees with lifting") {
  ScopedPrecision g(128);
  mbtest::Rng rng(5);
  // Chebyshev T3 = 4x^3 - 3x alternates between the value ranges on these bands.
  BandSystem E({Band(Real(-1), Real("-0.95"), BandKind::stop), Band(Real("-0.75"), Real("-0.2"), BandKind::pass),
                Band(Real("0.2"), Real("0.75"), BandKind::stop), Band(Real("0.95"), Real(1), BandKind::pass)});
  RationalFunction R({Real(0), Real(-3), Real(0), Real(4)}, {Real(1)});
  // Build F from the actual value sets of R on E, with margins.
  Real lo_m(1e9), hi_m(-1e9), lo_p(1e9), hi_p(-1e9);
  for (int j = 0; j < E.size(); ++j)
    for (int s = 0; s <= 200; ++s) {
      Real y = R(E[j].at_fraction(Real(s) / 200).value());
      if (E[j].kind == BandKind::pass) {
        lo_p = min(lo_p, y);
        hi_p = max(hi_p, y);
      } else {
        lo_m = min(lo_m, y);
        hi_m = max(hi_m, y);
      }
    }
  REQUIRE(hi_m < lo_p);
  RangeSystem F(Arc(lo_m - Real("0.01"), hi_m + Real("0.01")), Arc(lo_p - Real("0.01"), hi_p + Real("0.01")));
  auto base = sign_class_of(R, E, F);
  for (int t = 0; t < 30; ++t) {
    Mobius beta = random_mobius(rng);
    RangeSystem Fb = apply_projective(beta, F);
    auto direct = sign_class_of(R.compose_left(beta), E, Fb);
    CHECK(direct == apply_projective(beta, base, E));
  }
}

TEST_CASE("sign class parity law on random fractions") {
  ScopedPrecision g(128);
  mbtest::Rng rng(3);
  BandSystem E({Band(Real(-3), Real(-2), BandKind::pass), Band(Real(-1), Real("-0.5"), BandKind::stop),
                Band(Real("0.5"), Real(1), BandKind::pass), Band(Real(2), Real(3), BandKind::stop),
                Band(Real(5), Real(-6), BandKind::pass)});
  auto F = range(-2, -1, 1, 2);
  for (int t = 0; t < 40; ++t) {
    int n = rng.integer(1, 6);
    Poly num(n + 1), den(n + 1);
    for (auto& c : num) c = Real(rng.uniform(-1, 1));
    for (auto& c : den) c = Real(rng.uniform(-1, 1));
    RationalFunction R(num, den);
    auto bits = lift_bits(R, E, F);
    int sum = 0;
    for (int b : bits) sum += b;
    CHECK(sum % 2 == n % 2);
  }
}

TEST_CASE("setting conversions") {
  ScopedPrecision g(256);
  CHECK(mu_from_theta(Real(1)) == 1);
  CHECK(theta_from_mu(Real(1)) == 1);
  CHECK(abs_err(theta_from_mu(Real("0.5")), 2 - sqrt(Real(3))) < 1e-70);
  Real theta = theta_from_mu(Real("0.5"));
  CHECK(abs_err(1 / Real("0.5"), (theta + 1 / theta) / 2) < 1e-70);
  CHECK(abs_err(kappa_from_mu(Real("0.5")), kappa_from_theta(theta)) < 1e-70);

  RationalFunction R({Real(0), Real(3), Real(0), Real(-1)}, {Real(2), Real(0), Real(1), Real(0)});
  SettingSolution s4{Setting::zolotarev4, R, Real("0.3")};
  auto s3 = convert_setting(s4, Setting::zolotarev3);
  auto back = convert_setting(s3, Setting::zolotarev4);
  CHECK(abs_err(back.deviation, s4.deviation) < 1e-70);
  for (double x : {-2.0, -0.7, 0.1, 0.9, 1.3, 5.0}) CHECK(rel_err(back.R(Real(x)), R(Real(x))) < 1e-25);

  // The setting-4 ranges go to the setting-3 ranges.
  auto f4 = RangeSystem::from_mu(s4.deviation);
  auto f3 = range_for(Setting::zolotarev3, s3.deviation);
  CHECK(abs_err(cross_ratio(f4), cross_ratio(f3)) < 1e-60);

  // Every cycle through the four settings returns the original deviation.
  auto others = convert_setting(s4);
  CHECK(others.size() == 3);
  for (const auto& o : others) {
    CHECK(abs_err(convert_setting(o, Setting::zolotarev4).deviation, s4.deviation) < 1e-25);
    for (const auto& p : convert_setting(o)) CHECK(abs_err(p.mu(), s4.deviation) < 1e-25);
  }
  CHECK(abs_err(convert_setting(s4, Setting::min_deviation).deviation, s3.deviation * s3.deviation) < 1e-70);
}
