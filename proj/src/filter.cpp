#include "multiband/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mb {

namespace {

constexpr int kGuardBits = 32;

Real acos_real(const Real& x) { return atan2(sqrt(max(Real(0), 1 - x * x)), x); }

Complex i_power(int d) {
  switch (((d % 4) + 4) % 4) {
    case 0: return Complex(1);
    case 1: return Complex(Real(0), Real(1));
    case 2: return Complex(-1);
    default: return Complex(Real(0), Real(-1));
  }
}

// Roots of p after dropping negligible leading coefficients.
std::vector<RootCluster> roots_of(const Poly& p) {
  int d = effective_degree(p, ldexp(Real(1), -working_bits() / 2));
  if (d < 1) return {};
  Real radius = ldexp(Real(1), -(working_bits() - kGuardBits) / 3);
  return cluster_roots(poly_roots(std::span<const Real>(p.data(), static_cast<size_t>(d) + 1)), radius);
}

bool near_real(const Complex& z) { return abs(z.im) <= ldexp(Real(1), -working_bits() / 4) * (1 + abs(z.re)); }

// Real points of the physical line where R may attain an extremum: the
// endpoints of the physical region and the real critical points inside it.
std::vector<ExtendedPoint> physical_candidates(const RationalFunction& R, Domain d) {
  std::vector<ExtendedPoint> out;
  if (d == Domain::analogue) {
    out = {ExtendedPoint(0), ExtendedPoint::infinity()};
  } else {
    out = {ExtendedPoint(-1), ExtendedPoint(1)};
  }
  for (const auto& c : roots_of(R.wronskian()))
    if (near_real(c.center) && is_physical(d, ExtendedPoint(c.center.re))) out.emplace_back(c.center.re);
  return out;
}

bool pole_at_infinity(const RationalFunction& R) {
  Real tol = ldexp(Real(1), -working_bits() / 2);
  return effective_degree(R.numerator(), tol) > effective_degree(R.denominator(), tol);
}

// Band of the line variable with its mask target.
struct LineTarget {
  Band band;
  double target_db = 0;
  int index = 0;
};

double to_db(const Real& v) {
  if (!(v > 0)) return 400;
  return -10 * std::log10(v.to_double());
}

BandMargin measure(const LineTarget& t, const RationalFunction& M, const std::vector<ExtendedPoint>& critical) {
  std::vector<ExtendedPoint> pts{t.band.lo, t.band.hi};
  const int K = 64 + 16 * M.degree();
  for (int k = 1; k < K; ++k) {
    // Chebyshev spacing crowds the samples towards the edges.
    Real s = (1 - cos(Real::pi() * Real(k) / Real(K))) / 2;
    pts.push_back(t.band.at_fraction(s));
  }
  for (const auto& c : critical)
    if (t.band.contains(c)) pts.push_back(c);
  BandMargin out;
  out.band = t.index;
  out.target_db = t.target_db;
  bool first = true;
  for (const auto& x : pts) {
    ExtendedPoint v = M(x);
    Real y = v.is_infinite() ? Real::infinity() : v.value();
    if (first || y < out.min_value) out.min_value = y;
    if (first || y > out.max_value) out.max_value = y;
    first = false;
  }
  if (t.band.kind == BandKind::pass) {
    Real top = max(out.max_value, Real(1));
    out.achieved_db = out.min_value > 0 ? 10 * std::log10((top / out.min_value).to_double()) : 400;
    out.margin_db = t.target_db - out.achieved_db;
  } else {
    out.achieved_db = to_db(out.max_value);
    out.margin_db = out.achieved_db - t.target_db;
  }
  return out;
}

MaskCheck check_line(const std::vector<LineTarget>& targets, const RationalFunction& M) {
  std::vector<ExtendedPoint> critical;
  for (const auto& c : roots_of(M.wronskian()))
    if (near_real(c.center)) critical.emplace_back(c.center.re);
  MaskCheck out;
  out.met = true;
  for (const auto& t : targets) {
    out.bands.push_back(measure(t, M, critical));
    out.met = out.met && out.bands.back().margin_db >= 0;
  }
  std::sort(out.bands.begin(), out.bands.end(), [](const BandMargin& a, const BandMargin& b) { return a.band < b.band; });
  return out;
}

std::vector<LineTarget> mask_targets(const FilterMask& mask) {
  std::vector<LineTarget> out;
  for (size_t i = 0; i < mask.bands.size(); ++i) {
    const auto& b = mask.bands[i];
    ExtendedPoint a = to_line(mask.domain, b.lo), c = to_line(mask.domain, b.hi);
    if (mask.domain == Domain::digital) std::swap(a, c);
    out.push_back({Band(a, c, b.kind), b.kind == BandKind::pass ? b.ripple_db : b.attenuation_db, static_cast<int>(i)});
  }
  return out;
}

// A class bit of 1 on a gap forces an odd number of poles into it; that is
// fatal when the whole gap lies on the physical line.
bool forces_physical_pole(const BandSystem& E, const SignClass& sigma, Domain d) {
  ExtendedPoint probe = d == Domain::analogue ? ExtendedPoint(-1) : ExtendedPoint::infinity();
  const int m = E.size();
  for (int j = 0; j < m; ++j) {
    if (sigma.bit(j) == 0) continue;
    Arc gap(E[j].hi, E[(j + 1) % m].lo);
    if (!gap.contains(probe)) return true;
  }
  return false;
}

struct Levels {
  double stop_db = 0, ripple_db = std::numeric_limits<double>::infinity();
};

Levels levels_of(const std::vector<LineTarget>& targets) {
  Levels out;
  for (const auto& t : targets) {
    if (t.band.kind == BandKind::stop)
      out.stop_db = std::max(out.stop_db, t.target_db);
    else
      out.ripple_db = std::min(out.ripple_db, t.target_db);
  }
  return out;
}

// Minimizer of one class turned into a magnitude and checked; nullopt when
// the class has no usable minimizer. Solver failures are rethrown.
std::optional<Design> design_for_class(const BandSystem& E, int n, const SignClass& sigma, Domain domain,
                                       const std::vector<LineTarget>& targets, const SearchConfig& cfg) {
  Levels lv = levels_of(targets);
  SolveResult res = solve(E, n, sigma, cfg.solver);
  ScopedPrecision guard(cfg.solver.precision.bits + kGuardBits);
  auto M = magnitude_from_minimizer(res.R, res.mu, domain, lv.stop_db, lv.ripple_db);
  if (!M) return std::nullopt;
  MaskCheck check = check_line(targets, *M);
  return Design{n, res.sigma, res.mu, res.R, *M, TransferFunction{}, check, res.certificate};
}

Design search_line(const BandSystem& E, Domain domain, const std::vector<LineTarget>& targets, const SearchConfig& cfg) {
  std::optional<Design> best;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= cfg.max_degree; ++n) {
    for (const auto& sigma : SignClass::all(E.size(), n % 2)) {
      if (forces_physical_pole(E, sigma, domain)) continue;
      std::optional<Design> d;
      try {
        d = design_for_class(E, n, sigma, domain, targets, cfg);
      } catch (const ClassEmpty&) {
        continue;
      } catch (const NonConverged&) {
        continue;
      } catch (const PrecisionError&) {
        continue;
      }
      if (!d) continue;
      if (d->check.met) {
        d->h = spectral_factorize(d->magnitude, domain, cfg.solver.precision);
        return std::move(*d);
      }
      double worst = d->check.worst_margin_db();
      if (!best || worst > best_margin) {
        best_margin = worst;
        best = std::move(d);
      }
    }
  }
  std::string what = "no design up to degree " + std::to_string(cfg.max_degree) + " meets the mask";
  if (best) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", best_margin);
    what += "; best near miss: degree " + std::to_string(best->degree) + ", class " + best->sigma.str() +
            ", worst margin " + buf + " dB";
  }
  throw InfeasibleAtCap(what, std::move(best));
}

bool close(const Real& a, const Real& b) { return abs(a - b) <= ldexp(Real(1), -working_bits() / 2) * (1 + abs(a)); }

Real wrap_angle(Real t) {
  const Real pi = Real::pi();
  while (t > pi) t -= 2 * pi;
  while (t <= -pi) t += 2 * pi;
  return t;
}

}  // namespace

std::string to_string(Domain d) { return d == Domain::analogue ? "analogue" : "digital"; }

ExtendedPoint to_line(Domain d, const ExtendedPoint& f) {
  if (d == Domain::analogue) return f.is_infinite() ? f : ExtendedPoint(f.value() * f.value());
  if (f.is_infinite()) throw DomainError("digital frequencies are finite angles");
  return ExtendedPoint(cos(f.value()));
}

ExtendedPoint from_line(Domain d, const ExtendedPoint& x) {
  if (!is_physical(d, x)) throw DomainError("point " + x.str(12) + " is not on the frequency axis");
  if (d == Domain::analogue) return x.is_infinite() ? x : ExtendedPoint(sqrt(x.value()));
  return ExtendedPoint(acos_real(x.value()));
}

bool is_physical(Domain d, const ExtendedPoint& x) {
  if (d == Domain::analogue) return x.is_infinite() || x.value() >= 0;
  return !x.is_infinite() && abs(x.value()) <= 1;
}

void FilterMask::validate() const {
  if (bands.size() < 2) throw DomainError("a mask needs at least two bands");
  bool pass = false, stop = false;
  for (size_t i = 0; i < bands.size(); ++i) {
    const auto& b = bands[i];
    std::string name = "band " + std::to_string(i + 1);
    if (b.lo.is_infinite()) throw DomainError(name + ": lower edge is infinite");
    if (b.lo.value() < 0) throw DomainError(name + ": negative frequency");
    if (!b.hi.is_infinite() && !(b.lo.value() < b.hi.value())) throw DomainError(name + ": empty band");
    if (domain == Domain::digital && (b.hi.is_infinite() || b.hi.value() > Real::pi()))
      throw DomainError(name + ": digital frequencies must lie in [0, pi]");
    if (b.kind == BandKind::pass) {
      pass = true;
      if (!(b.ripple_db >= 0) || !std::isfinite(b.ripple_db)) throw DomainError(name + ": ripple must be finite and >= 0");
    } else {
      stop = true;
      if (!(b.attenuation_db > 0) || !std::isfinite(b.attenuation_db))
        throw DomainError(name + ": attenuation must be finite and > 0");
    }
    if (i > 0) {
      const auto& a = bands[i - 1];
      if (a.hi.is_infinite() || !(a.hi.value() < b.lo.value()))
        throw DomainError("bands " + std::to_string(i) + " and " + std::to_string(i + 1) + " overlap or are out of order");
    }
  }
  if (!pass || !stop) throw DomainError("a mask needs a passband and a stopband");
}

BandSystem FilterMask::line_bands() const {
  std::vector<Band> out;
  for (const auto& t : mask_targets(*this)) out.push_back(t.band);
  return BandSystem(out);
}

std::vector<double> FilterMask::line_targets() const {
  auto ts = mask_targets(*this);
  BandSystem E = line_bands();
  std::vector<double> out;
  for (const auto& b : E.bands())
    for (const auto& t : ts)
      if (t.band.lo == b.lo) out.push_back(t.target_db);
  return out;
}

Complex TransferFunction::operator()(const Complex& s) const {
  Complex v = gain;
  for (const auto& z : zeros) v *= s - z;
  for (const auto& p : poles) {
    Complex d = s - p;
    if (d.re.is_zero() && d.im.is_zero()) throw PoleError("evaluation at a pole");
    v /= d;
  }
  return v;
}

Complex TransferFunction::response(const Real& f) const {
  return domain == Domain::analogue ? (*this)(Complex(f)) : (*this)(exp_i(f));
}

int TransferFunction::degree() const { return static_cast<int>(std::max(zeros.size(), poles.size())); }

bool TransferFunction::causal() const {
  for (const auto& p : poles)
    if (domain == Domain::analogue ? !(p.im < 0) : !(p.norm() > 1)) return false;
  return true;
}

bool TransferFunction::real_symmetric(const Real& tol) const {
  auto closed = [&](const std::vector<Complex>& set) {
    std::vector<bool> used(set.size(), false);
    for (size_t i = 0; i < set.size(); ++i) {
      Complex img = domain == Domain::analogue ? -set[i].conj() : set[i].conj();
      bool found = false;
      for (size_t j = 0; j < set.size() && !found; ++j)
        if (!used[j] && abs(set[j] - img) <= tol * (1 + abs(img))) used[j] = found = true;
      if (!found) return false;
    }
    return true;
  };
  return closed(zeros) && closed(poles);
}

TransferFunction cascade(const std::vector<TransferFunction>& stages) {
  if (stages.empty()) throw DomainError("empty cascade");
  TransferFunction out;
  out.domain = stages.front().domain;
  for (const auto& s : stages) {
    if (s.domain != out.domain) throw DomainError("cascade mixes analogue and digital stages");
    out.zeros.insert(out.zeros.end(), s.zeros.begin(), s.zeros.end());
    out.poles.insert(out.poles.end(), s.poles.begin(), s.poles.end());
    out.gain *= s.gain;
  }
  return out;
}

TransferFunction parallel(const std::vector<TransferFunction>& stages) {
  if (stages.empty()) throw DomainError("empty battery");
  TransferFunction out;
  out.domain = stages.front().domain;
  std::vector<CPoly> num, den;
  for (const auto& s : stages) {
    if (s.domain != out.domain) throw DomainError("battery mixes analogue and digital stages");
    CPoly n = poly_from_roots(s.zeros);
    for (auto& c : n) c *= s.gain;
    num.push_back(n);
    den.push_back(poly_from_roots(s.poles));
    out.poles.insert(out.poles.end(), s.poles.begin(), s.poles.end());
  }
  CPoly total{Complex(0)};
  for (size_t i = 0; i < stages.size(); ++i) {
    CPoly term = num[i];
    for (size_t j = 0; j < stages.size(); ++j)
      if (j != i) term = poly_mul(term, den[j]);
    if (term.size() > total.size()) total.resize(term.size(), Complex(0));
    for (size_t k = 0; k < term.size(); ++k) total[k] += term[k];
  }
  int d = effective_degree(total, ldexp(Real(1), -working_bits() / 2));
  if (d < 0) throw DomainError("stage responses cancel");
  total.resize(static_cast<size_t>(d) + 1);
  out.gain = total.back();
  if (d > 0) out.zeros = poly_roots(total);
  return out;
}

RationalFunction magnitude_in_line(const TransferFunction& h) {
  // Factors |s - r|^2 on the frequency axis, written in the line variable.
  auto factor = [&](const std::vector<Complex>& roots) {
    Poly p{Real(1)};
    if (h.domain == Domain::analogue) {
      // The root set is closed under r -> -conj(r): the product of |w - r|^2 is prod (x - r^2).
      std::vector<Complex> sq;
      for (const auto& r : roots) sq.push_back(r * r);
      for (const auto& c : poly_from_roots(sq)) p.push_back(c.re);
      p.erase(p.begin());
      return p;
    }
    // |z - a|^2 = 1 + |a|^2 - 2 Re(a) x - 2 Im(a) sin(theta); conjugate pairs cancel the sine.
    std::vector<bool> used(roots.size(), false);
    const Real tol = ldexp(Real(1), -working_bits() / 4);
    for (size_t i = 0; i < roots.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      const Complex& a = roots[i];
      if (abs(a.im) <= tol * (1 + abs(a.re))) {
        p = poly_mul(p, Poly{1 + a.re * a.re, -2 * a.re});
        continue;
      }
      size_t best = roots.size();
      for (size_t j = i + 1; j < roots.size(); ++j)
        if (!used[j] && (best == roots.size() || abs(roots[j] - a.conj()) < abs(roots[best] - a.conj()))) best = j;
      if (best == roots.size() || abs(roots[best] - a.conj()) > tol * (1 + abs(a)))
        throw DomainError("roots are not closed under conjugation");
      used[best] = true;
      Real c = 1 + a.norm(), re2 = 2 * a.re, im2 = 4 * a.im * a.im;
      // (c - re2 x)^2 - im2 (1 - x^2)
      p = poly_mul(p, Poly{c * c - im2, -2 * c * re2, re2 * re2 + im2});
    }
    return p;
  };
  Poly num = poly_scale(factor(h.zeros), h.gain.norm());
  Poly den = factor(h.poles);
  return RationalFunction(num, den).normalized();
}

Real magnitude_square(const TransferFunction& h, const Real& frequency) { return h.response(frequency).norm(); }

TransferFunction spectral_factorize(const RationalFunction& R, Domain domain, Precision prec) {
  ScopedPrecision guard(prec.bits + kGuardBits);
  TransferFunction h;
  h.domain = domain;
  const Real edge = ldexp(Real(1), -working_bits() / 4);

  auto split = [&](const Poly& p, bool is_pole, std::vector<Complex>& out) {
    for (const auto& c : roots_of(p)) {
      const Complex& x = c.center;
      const int m = c.multiplicity;
      bool real = near_real(x);
      if (domain == Domain::analogue) {
        if (real && abs(x.re) <= edge) {
          if (is_pole) throw NotAMagnitude("pole at zero frequency");
          for (int k = 0; k < m; ++k) out.emplace_back();
        } else if (real && x.re > 0) {
          if (is_pole) throw NotAMagnitude("pole on the frequency axis at omega^2 = " + x.re.str(12));
          if (m % 2) throw NotAMagnitude("sign change on the frequency axis at omega^2 = " + x.re.str(12));
          Real r = sqrt(x.re);
          for (int k = 0; k < m / 2; ++k) {
            out.emplace_back(r);
            out.emplace_back(-r);
          }
        } else {
          Complex s = sqrt(real ? Complex(x.re) : x);
          if (s.im > 0) s = -s;
          for (int k = 0; k < m; ++k) out.push_back(s);
        }
      } else {
        if (real && abs(abs(x.re) - 1) <= edge) {
          if (is_pole) throw NotAMagnitude("pole on the unit circle at z = " + x.re.str(12));
          Real z = x.re > 0 ? Real(1) : Real(-1);
          for (int k = 0; k < m; ++k) out.emplace_back(z);
        } else if (real && abs(x.re) < 1) {
          if (is_pole) throw NotAMagnitude("pole on the unit circle at cos(theta) = " + x.re.str(12));
          if (m % 2) throw NotAMagnitude("sign change on the unit circle at cos(theta) = " + x.re.str(12));
          Complex z(x.re, sqrt(1 - x.re * x.re));
          for (int k = 0; k < m / 2; ++k) {
            out.push_back(z);
            out.push_back(z.conj());
          }
        } else {
          Complex xx = real ? Complex(x.re) : x;
          Complex z = xx + sqrt(xx * xx - Complex(1));
          if (z.norm() < 1) z = Complex(1) / z;
          for (int k = 0; k < m; ++k) out.push_back(z);
        }
      }
    }
  };
  split(R.numerator(), false, h.zeros);
  split(R.denominator(), true, h.poles);

  // Gain from a test frequency where R is comfortably positive.
  const std::vector<double> probes = domain == Domain::analogue ? std::vector<double>{0.7, 1.3, 0.31, 2.9, 0.05, 11.0}
                                                                : std::vector<double>{0.7, 2.1, 1.3, 0.3, 2.8, 1.9};
  Real best(0), f_best(0);
  for (double f : probes) {
    Real v = R(to_line(domain, ExtendedPoint(f)).value());
    if (abs(v) > abs(best)) {
      best = v;
      f_best = Real(f);
    }
  }
  if (!(best > 0)) throw NotAMagnitude("R is not positive on the frequency axis");
  if (domain == Domain::analogue)
    h.gain = i_power(static_cast<int>(h.poles.size()) - static_cast<int>(h.zeros.size()));
  Real shape = abs(h.response(f_best));
  h.gain = h.gain * (sqrt(best) / shape);

  Real worst(0);
  for (int k = 0; k < 64; ++k) {
    Real f = domain == Domain::analogue ? Real(k) / 8 + Real(1) / 64 : Real::pi() * (Real(k) + Real(0.5)) / 64;
    Real r = R(to_line(domain, ExtendedPoint(f)).value());
    worst = max(worst, abs(magnitude_square(h, f) - r) / (1 + abs(r)));
  }
  if (worst > ldexp(Real(1), -prec.bits / 3))
    throw PrecisionError("factorization residual " + worst.str(6) + " exceeds tolerance");
  return h;
}

DigitalFilter to_digital_filter(const TransferFunction& h) {
  if (h.domain != Domain::digital) throw DomainError("not a digital transfer function");
  if (!h.causal()) throw DomainError("poles must lie outside the unit circle");
  Complex scale = h.gain;
  CPoly Q{Complex(1)};
  for (const auto& p : h.poles) {
    Q = poly_mul(Q, CPoly{Complex(1), -(Complex(1) / p)});
    scale /= -p;
  }
  CPoly P = poly_from_roots(h.zeros);
  DigitalFilter f;
  for (const auto& c : P) f.p.push_back((c * scale).re.to_double());
  for (size_t j = 1; j < Q.size(); ++j) f.q.push_back(-Q[j].re.to_double());
  return f;
}

std::complex<double> filter_response(const DigitalFilter& f, double theta) {
  std::complex<double> z = std::polar(1.0, theta), num = 0, den = 1, zk = 1;
  for (double c : f.p) {
    num += c * zk;
    zk *= z;
  }
  zk = z;
  for (double c : f.q) {
    den -= c * zk;
    zk *= z;
  }
  return num / den;
}

std::vector<double> simulate(const DigitalFilter& f, const std::vector<double>& x) {
  std::vector<double> y(x.size());
  for (size_t m = 0; m < x.size(); ++m) {
    double acc = 0;
    for (size_t j = 0; j < f.p.size() && j <= m; ++j) acc += f.p[j] * x[m - j];
    for (size_t j = 1; j <= f.q.size() && j <= m; ++j) acc += f.q[j - 1] * y[m - j];
    if (!std::isfinite(acc) || std::abs(acc) > 1e200)
      throw Instability("output overflow at sample " + std::to_string(m));
    y[m] = acc;
  }
  return y;
}

double steady_state_gain(const DigitalFilter& f, double theta) {
  if (!(theta > 0 && theta < M_PI)) throw DomainError("frequency must lie in (0, pi)");
  const double period = 2 * M_PI / theta;
  const size_t window = std::max<size_t>(64, static_cast<size_t>(std::ceil(5 * period)));
  auto fit = [&](size_t len) {
    std::vector<double> x(len);
    for (size_t k = 0; k < len; ++k) x[k] = std::cos(theta * static_cast<double>(k));
    auto y = simulate(f, x);
    double cc = 0, cs = 0, ss = 0, yc = 0, ys = 0;
    for (size_t k = len - window; k < len; ++k) {
      double c = std::cos(theta * static_cast<double>(k)), s = std::sin(theta * static_cast<double>(k));
      cc += c * c;
      cs += c * s;
      ss += s * s;
      yc += y[k] * c;
      ys += y[k] * s;
    }
    double det = cc * ss - cs * cs;
    double a = (yc * ss - ys * cs) / det, b = (ys * cc - yc * cs) / det;
    return std::hypot(a, b);
  };
  size_t len = std::max<size_t>(static_cast<size_t>(std::ceil(20 * period)), 2 * window);
  double g = fit(len);
  for (int it = 0; it < 16; ++it) {
    len *= 2;
    double g2 = fit(len);
    if (std::abs(g2 - g) <= 1e-12 * std::max(1.0, g2)) return g2;
    g = g2;
  }
  return g;
}

std::vector<Band> digital_line_map(const std::vector<CircleBand>& arcs) {
  const Real pi = Real::pi();
  std::vector<Band> out;
  auto has_mirror = [&](const CircleBand& a) {
    for (const auto& b : arcs)
      if (b.kind == a.kind && close(wrap_angle(b.start), wrap_angle(-a.end)) && close(wrap_angle(b.end), wrap_angle(-a.start)))
        return true;
    return false;
  };
  for (size_t i = 0; i < arcs.size(); ++i) {
    const auto& a = arcs[i];
    std::string name = "arc " + std::to_string(i + 1);
    if (close(a.end - a.start, 2 * pi)) {
      out.emplace_back(ExtendedPoint(-1), ExtendedPoint(1), a.kind);
      continue;
    }
    Real s = wrap_angle(a.start), e = wrap_angle(a.end);
    if (close(s, -pi)) s = pi;  // an arc may start at -pi
    if (s >= 0 && e > s && e <= pi) {
      out.emplace_back(ExtendedPoint(cos(e)), ExtendedPoint(cos(s)), a.kind);
    } else if (s >= -pi && e <= 0 && s < e) {
      if (!has_mirror(a)) throw DomainError(name + " has no conjugate mirror");
    } else if (s < 0 && e > 0) {
      if (!close(s, -e)) throw DomainError(name + " crosses theta = 0 asymmetrically");
      out.emplace_back(ExtendedPoint(cos(e)), ExtendedPoint(1), a.kind);
    } else if (s > e) {
      if (!close(s, -e)) throw DomainError(name + " crosses theta = pi asymmetrically");
      out.emplace_back(ExtendedPoint(-1), ExtendedPoint(cos(s)), a.kind);
    } else {
      throw DomainError(name + " is not a valid arc");
    }
  }
  std::sort(out.begin(), out.end(), [](const Band& a, const Band& b) { return a.lo.value() < b.lo.value(); });
  for (size_t i = 1; i < out.size(); ++i)
    if (!(out[i - 1].hi.value() < out[i].lo.value())) throw DomainError("arcs overlap");
  return out;
}

std::vector<CircleBand> digital_circle_map(const std::vector<Band>& segments) {
  std::vector<CircleBand> out;
  const Real pi = Real::pi();
  for (const auto& b : segments) {
    if (b.lo.is_infinite() || b.hi.is_infinite() || b.lo.value() < -1 || b.hi.value() > 1 || !(b.lo.value() < b.hi.value()))
      throw DomainError("segment outside [-1, 1]");
    const Real& a = b.lo.value();
    const Real& c = b.hi.value();
    if (a == -1 && c == 1) {
      out.push_back({-pi, pi, b.kind});
    } else if (c == 1) {
      Real t = acos_real(a);
      out.push_back({-t, t, b.kind});
    } else if (a == -1) {
      Real t = acos_real(c);
      out.push_back({t, -t, b.kind});
    } else {
      out.push_back({acos_real(c), acos_real(a), b.kind});
    }
  }
  return out;
}

std::optional<RationalFunction> magnitude_from_minimizer(const RationalFunction& R, const Real& mu, Domain domain,
                                                         double stop_db, double ripple_db) {
  if (domain == Domain::analogue && pole_at_infinity(R)) return std::nullopt;
  for (const auto& c : roots_of(R.denominator()))
    if (near_real(c.center) && is_physical(domain, ExtendedPoint(c.center.re))) return std::nullopt;
  Real low = -1 - mu, high = 1 + mu;
  for (const auto& x : physical_candidates(R, domain)) {
    ExtendedPoint v = R(x);
    if (v.is_infinite()) return std::nullopt;
    low = min(low, v.value());
    high = max(high, v.value());
  }
  // Keep M strictly positive so that near-double zeros do not split into real pairs.
  low -= ldexp(Real(1), -working_bits() / 3) * (1 + mu);
  const ExtendedPoint zero(low), stop_edge(-1 + mu), pass_edge(1 - mu), top(1 + mu);
  auto beta = [&](const Real& s) {
    return Mobius::from_three_points(zero, stop_edge, top, ExtendedPoint(0), ExtendedPoint(s), ExtendedPoint(1));
  };
  // Equal margins: stop margin falls and passband margin rises with s.
  auto excess = [&](const Real& u) {
    Real s = exp(u);
    double stop = -10 * std::log10(s.to_double()) - stop_db;
    double pass = ripple_db + 10 * std::log10(beta(s)(pass_edge.value()).to_double());
    return stop - pass;
  };
  Real lo_u = log(ldexp(Real(1), -200)), hi_u = log(1 - ldexp(Real(1), -40));
  for (int it = 0; it < 200; ++it) {
    Real mid = (lo_u + hi_u) / 2;
    (excess(mid) > 0 ? lo_u : hi_u) = mid;
  }
  Mobius B = beta(exp(lo_u));
  // The pole of beta must stay out of the range of R on the physical line.
  ExtendedPoint pole = B.inverse()(ExtendedPoint::infinity());
  if (!pole.is_infinite() && pole.value() > 0 && !(pole.value() > high)) {
    B = Mobius(1 / (1 + mu - low), -low / (1 + mu - low), Real(0), Real(1));
  }
  return R.compose_left(B).normalized();
}

double MaskCheck::worst_margin_db() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& b : bands) w = std::min(w, b.margin_db);
  return w;
}

MaskCheck check_mask(const FilterMask& mask, const RationalFunction& M) {
  mask.validate();
  return check_line(mask_targets(mask), M);
}

Design minimal_degree_search(const FilterMask& mask, const SearchConfig& cfg) {
  mask.validate();
  cfg.solver.validate();
  return search_line(mask.line_bands(), mask.domain, mask_targets(mask), cfg);
}

Design design_at_degree(const FilterMask& mask, int n, const SearchConfig& cfg) {
  mask.validate();
  cfg.solver.validate();
  if (n < 1) throw DomainError("degree must be positive");
  BandSystem E = mask.line_bands();
  auto targets = mask_targets(mask);
  std::optional<Design> best;
  std::optional<NonConverged> failure;
  for (const auto& sigma : SignClass::all(E.size(), n % 2)) {
    if (forces_physical_pole(E, sigma, mask.domain)) continue;
    std::optional<Design> d;
    try {
      d = design_for_class(E, n, sigma, mask.domain, targets, cfg);
    } catch (const ClassEmpty&) {
      continue;
    } catch (const NonConverged& e) {
      if (!failure) failure.emplace(e);
      continue;
    }
    if (!d) continue;
    if (!best || d->check.worst_margin_db() > best->check.worst_margin_db()) best = std::move(d);
  }
  if (!best) {
    if (failure) throw *failure;
    throw ClassEmpty("no sign class of degree " + std::to_string(n) + " gives a magnitude response");
  }
  best->h = spectral_factorize(best->magnitude, mask.domain, cfg.solver.precision);
  return std::move(*best);
}

CompositeDesign composite_baseline(const FilterMask& mask, const SearchConfig& cfg) {
  mask.validate();
  cfg.solver.validate();
  auto targets = mask_targets(mask);
  BandSystem E = mask.line_bands();
  std::vector<LineTarget> line;  // canonical order
  for (const auto& b : E.bands())
    for (const auto& t : targets)
      if (t.band.lo == b.lo) line.push_back(t);
  const int m = E.size();
  int passes = 0;
  double ripple = std::numeric_limits<double>::infinity();
  for (const auto& t : line) {
    if (t.band.kind == BandKind::pass) {
      ++passes;
      ripple = std::min(ripple, t.target_db);
    }
  }
  CompositeDesign out;
  if (passes == 1) {
    out.stages.push_back(search_line(E, mask.domain, line, cfg));
  } else {
    double stop_db = 0;
    for (const auto& t : line)
      if (t.band.kind == BandKind::stop) stop_db = std::max(stop_db, t.target_db);
    // Each stage stops P - 1 other passbands' worth of leakage into the sum.
    const double P = passes;
    const double stage_stop = stop_db + 20 * std::log10(P);
    const double leak = (P - 1) * std::pow(10.0, -stage_stop / 20);
    for (int j = 0; j < m; ++j) {
      if (line[j].band.kind != BandKind::pass) continue;
      // |h_j| - leak must stay above the mask floor and |h_j| + leak below 1 + leak.
      double floor = (1 + leak) * std::pow(10.0, -line[j].target_db / 20) + leak;
      if (!(floor < 1))
        throw InfeasibleAtCap("composite stage for band " + std::to_string(line[j].index + 1) +
                                  ": ripple budget exhausted by leakage",
                              std::nullopt);
      double stage_ripple = -20 * std::log10(floor);
      Band own = line[j].band;
      Band rest(line[(j + 1) % m].band.lo, line[(j + m - 1) % m].band.hi, BandKind::stop);
      std::vector<LineTarget> stage_targets{{own, stage_ripple, 0}, {rest, stage_stop, 1}};
      try {
        out.stages.push_back(search_line(BandSystem({own, rest}), mask.domain, stage_targets, cfg));
      } catch (const InfeasibleAtCap& e) {
        throw InfeasibleAtCap("composite stage for band " + std::to_string(line[j].index + 1) + ": " + e.what(), e.best);
      }
    }
  }
  ScopedPrecision guard(cfg.solver.precision.bits + kGuardBits);
  std::vector<TransferFunction> hs;
  for (const auto& s : out.stages) hs.push_back(s.h);
  out.h = parallel(hs);
  out.degree = out.h.degree();
  out.magnitude = magnitude_in_line(out.h);
  out.check = check_line(targets, out.magnitude);
  return out;
}

}  // namespace mb
