// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "multiband/ansatz.hpp"
#include "multiband/band_model.hpp"
#include "multiband/elliptic.hpp"
#include "multiband/filter.hpp"
#include "multiband/minimax.hpp"
#include "multiband/zolotarev.hpp"
#include "support.hpp"

using namespace mb;

namespace {

const Precision P256{256};
const Precision P128{128};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

BandSystem symmetric_pair() {
  return BandSystem({Band(Real(-2), Real(-1), BandKind::stop), Band(Real(1), Real(2), BandKind::pass)});
}

BandSystem three_bands() {
  return BandSystem({Band(Real(-1), Real("-0.5"), BandKind::pass), Band(Real("-0.2"), Real("0.2"), BandKind::stop),
                     Band(Real("0.5"), Real(1), BandKind::pass)});
}

BandSystem four_bands() {
  return BandSystem({Band(Real(-1), Real("-0.6"), BandKind::pass), Band(Real("-0.4"), Real("0.1"), BandKind::stop),
                     Band(Real("0.3"), Real("0.5"), BandKind::pass), Band(Real("0.7"), Real(1), BandKind::stop)});
}

MaskBand pass_band(const char* lo, const char* hi, double ripple) {
  MaskBand b;
  b.lo = ExtendedPoint(Real(lo));
  b.hi = std::string(hi) == "inf" ? ExtendedPoint::infinity() : ExtendedPoint(Real(hi));
  b.kind = BandKind::pass;
  b.ripple_db = ripple;
  return b;
}

MaskBand stop_band(const char* lo, const char* hi, double attenuation) {
  MaskBand b = pass_band(lo, hi, 0);
  b.kind = BandKind::stop;
  b.attenuation_db = attenuation;
  return b;
}

// Outputs shared between criteria.
std::vector<Real> g_mus;
std::vector<std::pair<SignClass, int>> g_classes;

void record(const SolveResult& r, int n) {
  g_mus.push_back(r.mu);
  g_classes.emplace_back(r.sigma, n);
}

Outcome criterion1() {
  Outcome o;
  ScopedPrecision g(256);
  BandSystem E = symmetric_pair();
  SolverConfig cfg;
  double worst = 0, slowest = 0;
  for (int n = 1; n <= 8; ++n) {
    auto t0 = Clock::now();
    SolveResult r = solve(E, n, cfg);
    double t = seconds_since(t0);
    record(r, n);
    Real mu = deviation(n, Real("0.5"), P256).mu;
    double err = mbtest::rel_err(r.mu, mu);
    worst = std::max(worst, err);
    slowest = std::max(slowest, t);
    o.require(err <= 1e-12, "n=" + std::to_string(n) + " relative error " + sci(err));
    o.require(t < 60, "n=" + std::to_string(n) + " took " + std::to_string(t) + " s");
  }
  o.detail << "E = +-[1,2], n = 1..8: worst relative error " << sci(worst) << ", slowest degree " << sci(slowest)
           << " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  ScopedPrecision g(256);
  SolverConfig cfg;
  int certified = 0;
  std::vector<std::pair<const char*, BandSystem>> fixtures{
      {"m=2", symmetric_pair()}, {"m=3", three_bands()}, {"m=4", four_bands()}};
  for (const auto& [name, E] : fixtures) {
    int per_fixture = 0;
    for (int n = 1; n <= 8; ++n) {
      for (const auto& out : solve_each_class(E, n, cfg)) {
        if (!out.result) continue;
        const SolveResult& r = *out.result;
        record(r, n);
        int count = r.certificate.count;
        ++certified;
        ++per_fixture;
        std::string where = std::string(name) + " n=" + std::to_string(n) + " class " + r.sigma.str();
        o.require(count >= 2 * n + 2, where + ": " + std::to_string(count) + " alternation points");
        if (E.size() == 2) o.require(count == 2 * n + 2, where + ": " + std::to_string(count) + " points, not 2n+2");
      }
    }
    o.require(per_fixture > 0, std::string(name) + ": no certified minimizer");
  }
  o.detail << certified << " certified minimizers on m = 2, 3, 4, n <= 8, all with >= 2n+2 alternation points";
  return o;
}

Outcome criterion3() {
  Outcome o;
  ScopedPrecision g(256);
  double worst = 0;
  int checked = 0;
  for (const auto& mu : g_mus) {
    SettingSolution src{Setting::zolotarev4, RationalFunction(), mu};
    std::vector<SettingSolution> all = convert_setting(src);
    all.push_back(src);
    for (const auto& s : all) {
      Real m = s.mu(), th = s.theta(), ka = s.kappa();
      Real half = (th + 1 / th) / 2;
      double e1 = mbtest::rel_err(1 / m, half);
      double e2 = mbtest::rel_err(ka, 1 / (m * m));
      double e3 = mbtest::rel_err(ka, half * half);
      double e4 = mbtest::rel_err(m, mu);
      double e = std::max({e1, e2, e3, e4});
      worst = std::max(worst, e);
      ++checked;
      o.require(e <= 1e-25, "mu " + mu.str(8) + " error " + sci(e));
    }
  }
  o.require(checked > 0, "no outputs to convert");
  o.detail << checked << " converted (theta, mu, kappa) triples, worst relative error " << sci(worst);
  return o;
}

Outcome criterion4() {
  Outcome o;
  int checked = 0;
  auto check = [&](const SignClass& s, int n) {
    int sum = s.closing_bit();
    for (int b : s.bits()) sum += b;
    o.require(sum % 2 == n % 2, "class " + s.str() + " at n=" + std::to_string(n));
    ++checked;
  };
  for (const auto& [s, n] : g_classes) check(s, n);
  for (int m = 2; m <= 6; ++m)
    for (int parity = 0; parity <= 1; ++parity)
      for (const auto& s : SignClass::all(m, parity)) check(s, parity);
  o.detail << checked << " emitted and enumerated classes satisfy sum(sigma) = n mod 2";
  return o;
}

Outcome criterion5() {
  Outcome o;
  ScopedPrecision g(256);
  mbtest::Rng rng(2024);
  double worst = 0;
  int invariance = 0, shrinks = 0;
  while (invariance < 1000 || shrinks < 1000) {
    std::vector<double> v(4);
    for (auto& x : v) x = rng.uniform(-10, 10);
    std::sort(v.begin(), v.end());
    if (v[1] - v[0] < 1e-3 || v[2] - v[1] < 1e-3 || v[3] - v[2] < 1e-3) continue;
    RangeSystem F(Arc(v[0], v[1]), Arc(v[2], v[3]));
    Real kappa = cross_ratio(F);
    if (invariance < 1000) {
      Real a(rng.uniform(-3, 3)), b(rng.uniform(-3, 3)), c(rng.uniform(-3, 3)), d(rng.uniform(-3, 3));
      if (abs(a * d - b * c) < Real("0.1")) continue;
      double e = mbtest::rel_err(cross_ratio(apply_projective(Mobius(a, b, c, d), F)), kappa);
      worst = std::max(worst, e);
      o.require(e <= 1e-25, "invariance error " + sci(e));
      ++invariance;
    }
    if (shrinks < 1000) {
      // Shrink one arc strictly inside itself.
      double s = rng.uniform(0.01, 0.99);
      bool first = rng.integer(0, 1) == 0;
      RangeSystem G = first ? RangeSystem(Arc(v[0] + s * (v[1] - v[0]) / 2, v[1] - s * (v[1] - v[0]) / 2), F.plus)
                            : RangeSystem(F.minus, Arc(v[2] + s * (v[3] - v[2]) / 2, v[3]));
      o.require(cross_ratio(G) > kappa, "shrink did not increase the cross-ratio");
      ++shrinks;
    }
  }
  o.detail << invariance << " random transforms (worst relative error " << sci(worst) << "), " << shrinks
           << " shrinks strictly increasing";
  return o;
}

Outcome criterion6() {
  Outcome o;
  ScopedPrecision g(128);
  mbtest::Rng rng(6);
  double worst = 0;
  int points = 0;
  while (points < 10000) {
    Real k(rng.uniform(0.01, 0.99));
    auto m = EllipticModulus::from_k(k, P128);
    Complex u(Real(rng.uniform(-4, 4)), Real(rng.uniform(-1, 1)) * m.tau_im);
    JacobiComplex j;
    try {
      j = jacobi_sn_cn_dn(u, m, P128);
    } catch (const PoleError&) {
      continue;
    }
    double scale = std::max(1.0, std::pow(abs(j.sn).to_double(), 2));
    double e1 = abs(j.sn * j.sn + j.cn * j.cn - Complex(1)).to_double() / scale;
    double e2 = abs(j.dn * j.dn + (m.k * m.k) * j.sn * j.sn - Complex(1)).to_double() / scale;
    worst = std::max({worst, e1, e2});
    o.require(e1 < 1e-30 && e2 < 1e-30, "identity residual " + sci(std::max(e1, e2)));
    ++points;
  }
  auto small = complete_elliptic(Real("1e-20"), P128);
  double e_small = abs(small.K - Real::pi() / 2).to_double();
  o.require(e_small < 1e-30, "K(0+) - pi/2 = " + sci(e_small));
  auto self = complete_elliptic(1 / sqrt(Real(2)), P128);
  double e_self = mbtest::rel_err(self.K, self.K_prime);
  o.require(e_self < 1e-30, "K(1/sqrt 2) - K' = " + sci(e_self));
  o.detail << points << " points at 128 bits, worst identity residual " << sci(worst) << "; |K(1e-20) - pi/2| "
           << sci(e_small) << "; K(1/sqrt 2) vs K' " << sci(e_self);
  return o;
}

Outcome criterion7() {
  Outcome o;
  ScopedPrecision g(256);
  int cases = 0;
  for (const char* ks : {"0.3", "0.5", "0.7"}) {
    Real k(ks);
    for (int n = 1; n <= 10; ++n) {
      std::string where = std::string("k=") + ks + " n=" + std::to_string(n);
      auto Z = build_zolotarev(n, k, P256);
      const Real& k1 = Z.modulus.k;
      ExceptionalSet Q({ExtendedPoint(-1 / k1), ExtendedPoint(Real(-1)), ExtendedPoint(Real(1)), ExtendedPoint(1 / k1)});
      auto profile = branching_profile(Z.rational, Q, P256);
      bool all_in_q = true;
      for (const auto& e : profile.entries) all_in_q = all_in_q && e.in_q;
      o.require(all_in_q, where + ": critical value outside Q");
      o.require(profile.total() == 2 * n - 2, where + ": sum B = " + std::to_string(profile.total()));
      o.require(genus_count(Z.rational, Q, P256) == 1, where + ": genus != 1");
      auto curve = branch_points(Z.rational, Q, P256);
      Real expect[] = {-1 / k, Real(-1), Real(1), 1 / k};
      bool ends = curve.branch_points.size() == 4;
      for (size_t i = 0; ends && i < 4; ++i)
        ends = !curve.branch_points[i].infinite && abs(curve.branch_points[i].x - Complex(expect[i])) < Real("1e-30");
      o.require(ends, where + ": branch points are not the band endpoints");
      ++cases;
    }
  }
  o.detail << cases << " Zolotarev fractions (n <= 10, k in {0.3, 0.5, 0.7}): genus 1, branch points +-1, +-1/k, "
           << "sum B = 2n-2";
  return o;
}

// Largest | |h|^2 - M | over 1000 frequencies.
double residual(const TransferFunction& h, const RationalFunction& M) {
  Real worst(0);
  for (int i = 0; i < 1000; ++i) {
    Real f = h.domain == Domain::analogue ? Real(i) / Real(200) + Real("0.0007")
                                          : Real::pi() * (Real(i) + Real("0.5")) / Real(1000);
    Real x = to_line(h.domain, ExtendedPoint(f)).value();
    worst = max(worst, abs(magnitude_square(h, f) - M(x)));
  }
  return worst.to_double();
}

bool poles_causal(const TransferFunction& h) {
  for (const auto& p : h.poles)
    if (h.domain == Domain::analogue ? !(p.im < 0) : !(abs(p) > Real(1))) return false;
  return true;
}

FilterMask narrow_double_notch() {
  return {Domain::analogue,
          {pass_band("0", "0.95", 1), stop_band("0.99", "1.01", 40), pass_band("1.05", "1.95", 1),
           stop_band("1.99", "2.01", 40), pass_band("2.05", "inf", 1)}};
}

std::optional<Design> g_notch_optimal;
std::optional<CompositeDesign> g_notch_composite;

Outcome criterion8() {
  Outcome o;
  SearchConfig cfg;
  std::vector<std::pair<std::string, FilterMask>> masks{
      {"analogue lowpass", {Domain::analogue, {pass_band("0", "1", 0.5), stop_band("1.3", "inf", 40)}}},
      {"analogue bandpass",
       {Domain::analogue,
        {stop_band("0", "0.5", 30), pass_band("0.8", "1.2", 1), stop_band("1.6", "inf", 30)}}},
      {"digital lowpass", {Domain::digital, {pass_band("0", "1", 0.5), stop_band("1.4", "3.14159", 40)}}},
      {"digital bandstop",
       {Domain::digital, {pass_band("0", "0.8", 1), stop_band("1.1", "1.5", 30), pass_band("1.8", "3.14159", 1)}}}};
  double worst = 0, worst_gain = 0;
  int gains = 0;
  mbtest::Rng rng(8);
  for (const auto& [name, mask] : masks) {
    Design d = minimal_degree_search(mask, cfg);
    ScopedPrecision g(288);
    double r = residual(d.h, d.magnitude);
    worst = std::max(worst, r);
    o.require(r <= 1e-18, name + ": residual " + sci(r));
    o.require(poles_causal(d.h), name + ": pole on the wrong side");
    if (mask.domain == Domain::digital) {
      DigitalFilter f = to_digital_filter(d.h);
      for (int i = 0; i < 20; ++i) {
        double th = rng.uniform(0.02, 3.12);
        double want = std::sqrt(magnitude_square(d.h, Real(th)).to_double());
        double e = std::abs(steady_state_gain(f, th) - want);
        worst_gain = std::max(worst_gain, e);
        o.require(e <= 1e-6, name + ": steady-state gain off by " + sci(e));
        ++gains;
      }
    }
  }
  g_notch_optimal = minimal_degree_search(narrow_double_notch(), cfg);
  g_notch_composite = composite_baseline(narrow_double_notch(), cfg);
  {
    ScopedPrecision g(288);
    for (const auto* h : {&g_notch_optimal->h, &g_notch_composite->h}) {
      const RationalFunction& M = h == &g_notch_optimal->h ? g_notch_optimal->magnitude : g_notch_composite->magnitude;
      double r = residual(*h, M);
      worst = std::max(worst, r);
      o.require(r <= 1e-18, "double notch: residual " + sci(r));
      o.require(poles_causal(*h), "double notch: pole on the wrong side");
    }
  }
  o.detail << masks.size() + 2 << " factorized designs, worst residual " << sci(worst) << ", all poles causal; "
           << gains << " steady-state gains, worst error " << sci(worst_gain);
  return o;
}

Outcome criterion9() {
  Outcome o;
  const Design& d = *g_notch_optimal;
  const CompositeDesign& c = *g_notch_composite;
  double ratio = static_cast<double>(c.degree) / d.degree;
  o.require(d.check.met && c.check.met, "a design misses the mask");
  o.require(d.degree < c.degree, "optimal degree not below the composite");
  o.require(ratio >= 2, "degree ratio " + std::to_string(ratio));
  std::ostringstream stages;
  for (size_t i = 0; i < c.stages.size(); ++i) stages << (i ? "+" : "") << c.stages[i].degree;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", ratio);
  o.detail << "double notch at omega = 1, 2: optimal degree " << d.degree << ", composite " << c.degree << " ("
           << stages.str() << "), ratio " << buf;
  return o;
}

struct Captured {
  int code = -1;
  std::string out;
};

Captured capture(const std::string& args) {
  Captured c;
  std::string cmd = std::string(MBFILTER_EXE) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return c;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) c.out.append(buf, n);
  int status = pclose(p);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

Outcome criterion10() {
  Outcome o;
  const std::string data = MBFILTER_DATA;
  std::vector<std::string> runs{"--no-timing design " + data + "/digital_lowpass.json",
                                "--no-timing design " + data + "/lowpass.json",
                                "--no-timing compare " + data + "/lowpass.json",
                                "--no-timing zolotarev 7 0.4"};
  size_t bytes = 0;
  for (const auto& args : runs) {
    Captured a = capture(args), b = capture(args);
    o.require(a.code == 0 && b.code == 0, "mbfilter " + args + " failed");
    o.require(a.out == b.out, "mbfilter " + args + " differs between runs");
    o.require(a.out.find("timing_seconds") == std::string::npos, "timing present with --no-timing");
    bytes += a.out.size();
  }
  // Library level: the same search twice.
  ScopedPrecision g(256);
  FilterMask m{Domain::digital, {pass_band("0", "1", 0.5), stop_band("1.4", "3.14159", 40)}};
  Design d1 = minimal_degree_search(m, SearchConfig{}), d2 = minimal_degree_search(m, SearchConfig{});
  bool same = d1.degree == d2.degree && d1.magnitude.numerator() == d2.magnitude.numerator() &&
              d1.magnitude.denominator() == d2.magnitude.denominator();
  o.require(same, "library search differs between runs");
  o.detail << runs.size() << " report pairs byte-identical (" << bytes << " bytes each set), repeated search identical";
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", seconds_since(t0));
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << buf << " s) " << o.detail.str()
              << std::endl;
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
