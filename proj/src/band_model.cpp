#include "multiband/band_model.hpp"

#include <algorithm>
#include <numeric>

namespace mb {

std::string to_string(BandKind k) { return k == BandKind::pass ? "pass" : "stop"; }

namespace {

// Representative angle of a projective point in (-pi/2, pi/2].
Real angle_of(const ExtendedPoint& y) {
  if (y.is_infinite()) return Real::pi() / 2;
  return atan(y.value());
}

Real mod_pi(const Real& x) {
  Real pi = Real::pi();
  return x - pi * floor(x / pi);
}

// Reduce an angle difference to (-pi/2, pi/2].
Real reduce_half(const Real& d) {
  Real pi = Real::pi();
  Real r = mod_pi(d + pi / 2) - pi / 2;
  if (r <= -pi / 2) r += pi;
  return r;
}

}  // namespace

Arc::Arc(ExtendedPoint lo_, ExtendedPoint hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo == hi) throw DomainError("arc with coincident endpoints " + lo.str(17));
}

bool Arc::wraps() const { return cyclic_less(hi, lo); }

bool Arc::contains(const ExtendedPoint& x) const {
  if (!wraps()) return !cyclic_less(x, lo) && !cyclic_less(hi, x);
  return !cyclic_less(x, lo) || !cyclic_less(hi, x);
}

bool Arc::contains_approx(const ExtendedPoint& x, const Real& slack) const {
  if (contains(x)) return true;
  Real d = mod_pi(x.circle_position() - lo.circle_position());
  return d <= angular_length() + slack || d >= Real::pi() - slack;
}

Real Arc::angular_length() const { return mod_pi(hi.circle_position() - lo.circle_position()); }

ExtendedPoint Arc::midpoint() const { return at_fraction(Real("0.5")); }

ExtendedPoint Arc::at_fraction(const Real& t) const {
  if (t.is_zero()) return lo;
  if (t == 1) return hi;
  return ExtendedPoint::from_circle_position(lo.circle_position() + t * angular_length());
}

BandSystem::BandSystem(std::vector<Band> bands) {
  const int m = static_cast<int>(bands.size());
  if (m < 2) throw DomainError("a band system needs at least two bands");
  bool has_pass = false, has_stop = false;
  for (const auto& b : bands) (b.kind == BandKind::pass ? has_pass : has_stop) = true;
  if (!has_pass || !has_stop) throw DomainError("a band system needs at least one passband and one stopband");

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return cyclic_less(bands[i].lo, bands[j].lo); });
  auto clash = [&](int i, int j) {
    return DomainError("bands " + std::to_string(order[i] + 1) + " and " + std::to_string(order[j] + 1) +
                       " overlap or touch");
  };
  for (int i = 0; i + 1 < m; ++i) {
    const auto& b = bands[order[i]];
    const auto& next = bands[order[i + 1]];
    if (b.wraps() || !cyclic_less(b.hi, next.lo)) throw clash(i, i + 1);
  }
  const auto& last = bands[order[m - 1]];
  if (last.wraps() && !cyclic_less(last.hi, bands[order[0]].lo)) throw clash(m - 1, 0);
  for (int i : order) bands_.push_back(bands[i]);
}

std::vector<ExtendedPoint> BandSystem::endpoints() const {
  std::vector<ExtendedPoint> out;
  for (const auto& b : bands_) {
    out.push_back(b.lo);
    out.push_back(b.hi);
  }
  return out;
}

std::optional<int> BandSystem::band_of(const ExtendedPoint& x) const {
  for (int i = 0; i < size(); ++i)
    if (bands_[i].contains(x)) return i;
  return std::nullopt;
}

bool BandSystem::gap_contains_infinity(int j) const {
  if (j != size() - 1) return false;
  return !bands_.back().wraps() && !bands_.front().lo.is_infinite();
}

RangeSystem::RangeSystem(Arc minus_, Arc plus_) : minus(std::move(minus_)), plus(std::move(plus_)) {
  auto pts = endpoints();
  if (!cyclically_ordered(pts)) throw DomainError("range endpoints are not in the order lo(F-), hi(F-), lo(F+), hi(F+)");
}

RangeSystem RangeSystem::from_mu(const Real& mu) {
  if (!(mu > 0) || !(mu < 1)) throw DomainError("mu must lie in (0,1)");
  return RangeSystem(Arc(-1 - mu, -1 + mu), Arc(1 - mu, 1 + mu));
}

RangeSystem RangeSystem::from_theta(const Real& theta) {
  if (!(theta > 0) || !(theta < 1)) throw DomainError("theta must lie in (0,1)");
  return RangeSystem(Arc(1 / theta, -1 / theta), Arc(-theta, theta));
}

std::optional<int> indicator(const ExtendedPoint& x, const BandSystem& E) {
  auto j = E.band_of(x);
  if (!j) return std::nullopt;
  return kind_sign(E[*j].kind);
}

Real cross_ratio(const RangeSystem& F) {
  auto pts = F.endpoints();
  Mobius chart = infinity_avoiding_chart(pts);
  Real a = chart(pts[0]).value();
  Real b = chart(pts[1]).value();
  Real c = chart(pts[2]).value();
  Real d = chart(pts[3]).value();
  return ((d - b) / (d - c)) / ((a - b) / (a - c));
}

Real kappa_from_theta(const Real& theta) {
  if (!(theta > 0) || !(theta < 1)) throw DomainError("theta must lie in (0,1)");
  Real h = (theta + 1 / theta) / 2;
  return h * h;
}

Real kappa_from_mu(const Real& mu) {
  if (!(mu > 0) || !(mu < 1)) throw DomainError("mu must lie in (0,1)");
  return 1 / (mu * mu);
}

Real theta_from_mu(const Real& mu) {
  if (!(mu > 0) || mu > 1) throw DomainError("mu must lie in (0,1]");
  return mu / (1 + sqrt((1 - mu) * (1 + mu)));
}

Real mu_from_theta(const Real& theta) {
  if (!(theta > 0) || theta > 1) throw DomainError("theta must lie in (0,1]");
  return 2 * theta / (1 + theta * theta);
}

SignClass::SignClass(std::vector<int> bits, int degree_parity) : bits_(std::move(bits)), parity_(degree_parity & 1) {
  int sum = 0;
  for (int b : bits_) {
    if (b != 0 && b != 1) throw DomainError("sign class bits must be 0 or 1");
    sum += b;
  }
  closing_ = (parity_ - sum) & 1;
}

SignClass::SignClass(std::vector<int> bits, int closing_bit, int degree_parity) : SignClass(std::move(bits), degree_parity) {
  if (closing_bit != closing_) throw DomainError("sign class bits violate the parity law");
}

int SignClass::bit(int j) const {
  if (j < 0 || j > static_cast<int>(bits_.size())) throw DomainError("sign class index out of range");
  return j == static_cast<int>(bits_.size()) ? closing_ : bits_[j];
}

std::string SignClass::str() const {
  std::string s;
  for (int b : bits_) s += static_cast<char>('0' + b);
  s += '|';
  s += static_cast<char>('0' + closing_);
  return s;
}

std::vector<SignClass> SignClass::all(int m, int degree_parity) {
  if (m < 2 || m > 24) throw DomainError("band count out of range for class enumeration");
  std::vector<SignClass> out;
  const unsigned count = 1u << (m - 1);
  for (unsigned code = 0; code < count; ++code) {
    std::vector<int> bits(m - 1);
    for (int j = 0; j < m - 1; ++j) bits[j] = (code >> (m - 2 - j)) & 1u;
    out.emplace_back(std::move(bits), degree_parity);
  }
  return out;
}

ExtendedPoint apply_projective(const Mobius& T, const ExtendedPoint& x) { return T(x); }

Arc apply_projective(const Mobius& T, const Arc& a) {
  if (T.preserves_orientation()) return Arc(T(a.lo), T(a.hi));
  return Arc(T(a.hi), T(a.lo));
}

Band apply_projective(const Mobius& T, const Band& b) {
  Arc a = apply_projective(T, static_cast<const Arc&>(b));
  return Band(a.lo, a.hi, b.kind);
}

BandSystem apply_projective(const Mobius& T, const BandSystem& E) {
  std::vector<Band> out;
  for (const auto& b : E.bands()) out.push_back(apply_projective(T, b));
  return BandSystem(std::move(out));
}

RangeSystem apply_projective(const Mobius& T, const RangeSystem& F) {
  return RangeSystem(apply_projective(T, F.minus), apply_projective(T, F.plus));
}

SignClass apply_projective(const Mobius& beta, const SignClass& s, const BandSystem& E) {
  const int m = E.size();
  if (s.band_count() != m) throw DomainError("sign class does not match the band system");
  std::vector<int> full(m);
  for (int j = 0; j < m; ++j) {
    full[j] = s.bit(j);
    if (!beta.preserves_orientation() && E[j].kind != E[(j + 1) % m].kind) full[j] ^= 1;
  }
  int closing = full.back();
  full.pop_back();
  return SignClass(std::move(full), closing, s.degree_parity());
}

std::vector<int> lift_bits(const RationalFunction& R, const BandSystem& E, const RangeSystem& F) {
  const Real pi = Real::pi();
  // Sheet F0 of the double cover: the window of length pi that contains
  // F- followed by F+, centered away from both.
  Real alpha_a = angle_of(F.minus.lo);
  Real alpha_d = angle_of(F.plus.hi);
  while (alpha_d <= alpha_a) alpha_d += pi;
  Real base = (alpha_d + alpha_a + pi) / 2 - pi;

  auto psi = [&](const Real& p) { return angle_of(R(ExtendedPoint::from_circle_position(p))); };
  const Real quarter = pi / 4;

  // Lifted increment of the angle between two path positions.
  auto advance = [&](auto&& self, const Real& pa, const Real& psi_a, const Real& pb, const Real& psi_b,
                     int depth) -> Real {
    Real d = reduce_half(psi_b - psi_a);
    if (abs(d) < quarter || depth >= 60) return d;
    Real pm = (pa + pb) / 2;
    Real psi_m = psi(pm);
    return self(self, pa, psi_a, pm, psi_m, depth + 1) + self(self, pm, psi_m, pb, psi_b, depth + 1);
  };

  // Zeros and poles of R as circle positions. Between two consecutive
  // breakpoints R keeps its sign, so sampled increments cannot alias.
  std::vector<Real> breaks{Real(0)};
  Real near_real = ldexp(Real(1), -working_bits() / 4);
  for (const Poly* poly : {&R.numerator(), &R.denominator()}) {
    Poly q = *poly;
    while (q.size() > 1 && q.back().is_zero()) q.pop_back();
    if (q.size() < 2) continue;
    for (const auto& z : poly_roots(q))
      if (abs(z.im) <= near_real * (1 + abs(z.re))) breaks.push_back(ExtendedPoint(z.re).circle_position());
  }

  const int m = E.size();
  const int steps = 128;
  std::vector<int> out(m);
  for (int j = 0; j < m; ++j) {
    Real p0 = E[j].midpoint().circle_position();
    Real p1 = E[(j + 1) % m].midpoint().circle_position();
    while (p1 <= p0) p1 += pi;
    std::vector<Real> path;
    for (int s = 1; s <= steps; ++s) path.push_back(p0 + (p1 - p0) * Real(s) / Real(steps));
    for (const auto& b : breaks) {
      Real q = b - pi * floor((b - p0) / pi);
      if (q > p0 && q < p1) path.push_back(q);
    }
    std::sort(path.begin(), path.end());
    Real psi0 = psi(p0);
    Real phi = psi0 - pi * floor((psi0 - base) / pi);
    Real prev_p = p0, prev_psi = psi0;
    for (const auto& p : path) {
      Real cur = psi(p);
      phi += advance(advance, prev_p, prev_psi, p, cur, 0);
      prev_p = p;
      prev_psi = cur;
    }
    long sheet = floor((phi - base) / pi).to_long();
    out[j] = static_cast<int>(((sheet % 2) + 2) % 2);
  }
  return out;
}

SignClass sign_class_of(const RationalFunction& R, const BandSystem& E, const RangeSystem& F,
                        std::optional<Real> check_slack) {
  Real slack = check_slack ? *check_slack : ldexp(Real(1), -working_bits() / 3);
  const int samples = 64;
  for (int j = 0; j < E.size(); ++j) {
    const Band& b = E[j];
    const Arc& target = b.kind == BandKind::pass ? F.plus : F.minus;
    for (int s = 0; s <= samples; ++s) {
      ExtendedPoint x = b.at_fraction(Real(s) / Real(samples));
      ExtendedPoint y = R(x);
      if (!target.contains_approx(y, slack))
        throw NotInClassError("R(" + x.str(12) + ") = " + y.str(12) + " leaves the range of " + to_string(b.kind) +
                              "band " + std::to_string(j + 1));
    }
  }
  auto bits = lift_bits(R, E, F);
  int sum = 0;
  for (int b : bits) sum += b;
  int closing = bits.back();
  bits.pop_back();
  return SignClass(std::move(bits), closing, sum & 1);
}

Real SettingSolution::theta() const {
  switch (setting) {
    case Setting::min_deviation:
      return sqrt(deviation);
    case Setting::modified_deviation:
    case Setting::zolotarev3:
      return deviation;
    case Setting::zolotarev4:
      return theta_from_mu(deviation);
  }
  return deviation;
}

Real SettingSolution::mu() const { return setting == Setting::zolotarev4 ? deviation : mu_from_theta(theta()); }

Real SettingSolution::kappa() const {
  Real m = mu();
  return 1 / (m * m);
}

RangeSystem range_for(Setting s, const Real& deviation) {
  switch (s) {
    case Setting::min_deviation:
      return RangeSystem::from_theta(sqrt(deviation));
    case Setting::modified_deviation:
    case Setting::zolotarev3:
      return RangeSystem::from_theta(deviation);
    case Setting::zolotarev4:
      return RangeSystem::from_mu(deviation);
  }
  throw DomainError("unknown setting");
}

SettingSolution convert_setting(const SettingSolution& src, Setting target) {
  Real theta = src.theta();
  Real mu = src.mu();
  // beta maps the setting-4 ranges onto the shared ranges of settings 1-3.
  auto f4 = RangeSystem::from_mu(mu);
  auto f3 = RangeSystem::from_theta(theta);
  Mobius beta = Mobius::from_three_points(f4.minus.lo, f4.minus.hi, f4.plus.lo, f3.minus.lo, f3.minus.hi, f3.plus.lo);

  RationalFunction shared = src.setting == Setting::zolotarev4 ? src.R.compose_left(beta) : src.R;
  SettingSolution out;
  out.setting = target;
  switch (target) {
    case Setting::min_deviation:
      out.R = shared;
      out.deviation = theta * theta;
      break;
    case Setting::modified_deviation:
    case Setting::zolotarev3:
      out.R = shared;
      out.deviation = theta;
      break;
    case Setting::zolotarev4:
      out.R = src.setting == Setting::zolotarev4 ? src.R : shared.compose_left(beta.inverse());
      out.deviation = mu;
      break;
  }
  return out;
}

std::vector<SettingSolution> convert_setting(const SettingSolution& src) {
  std::vector<SettingSolution> out;
  for (Setting s : {Setting::min_deviation, Setting::modified_deviation, Setting::zolotarev3, Setting::zolotarev4})
    if (s != src.setting) out.push_back(convert_setting(src, s));
  return out;
}

}  // namespace mb
