// mbfilter: multiband filter design from the command line.
//
//   mbfilter design MASK             minimal degree design (or fixed degree)
//   mbfilter zolotarev N K           closed-form two-band fraction
//   mbfilter certify FUNCTION [MASK] alternation certificate or refusal
//   mbfilter compare MASK            optimal design against the composite
//   mbfilter simulate FILTER SIGNAL  run the digital recurrence
//
// Exit codes: 0 ok, 2 input, 3 infeasible, 4 non-convergence, 5 refusal,
// 6 instability.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "multiband/band_model.hpp"
#include "multiband/filter.hpp"
#include "multiband/minimax.hpp"
#include "multiband/zolotarev.hpp"

using json = nlohmann::ordered_json;
using namespace mb;

namespace {

enum Exit { kOk = 0, kInput = 2, kInfeasible = 3, kNonConvergence = 4, kRefusal = 5, kInstability = 6 };

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Refused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  int bits = 256;
  bool bits_given = false;
  int grid = 200;
  std::string csv;
  bool no_timing = false;
  int max_degree = 20;
  double gain_theta = -1;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Digits follow the requested precision, not the guarded working precision.
int g_digits = 78;
std::string num(const Real& x) { return x.str(g_digits); }
std::string num(const ExtendedPoint& x) { return x.is_infinite() ? "inf" : num(x.value()); }

json num(const Complex& z) { return json{{"re", num(z.re)}, {"im", num(z.im)}}; }

json num_list(const std::vector<Real>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(num(x));
  return out;
}

json num_list(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(num(z));
  return out;
}

// JSON numbers are re-read from their shortest decimal form, so 1.3 means
// the decimal 1.3 at full precision.
ExtendedPoint parse_point(const json& v, const std::string& where) {
  std::string text;
  if (v.is_number()) {
    text = v.dump();
  } else if (v.is_string()) {
    text = v.get<std::string>();
  } else {
    throw InputError(where + ": expected a number or a string");
  }
  if (text == "inf" || text == "+inf") return ExtendedPoint::infinity();
  if (text == "pi") return ExtendedPoint(Real::pi());
  try {
    Real r(text);
    if (!r.is_finite()) throw InputError(where + ": not a finite number: " + text);
    return ExtendedPoint(r);
  } catch (const std::invalid_argument&) {
    throw InputError(where + ": not a number: " + text);
  }
}

Real parse_real(const json& v, const std::string& where) {
  ExtendedPoint p = parse_point(v, where);
  if (p.is_infinite()) throw InputError(where + ": must be finite");
  return p.value();
}

double parse_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + ": expected a number");
  return v.get<double>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InputError(where + ": unknown field \"" + key + "\"");
  }
}

struct MaskDocument {
  FilterMask mask;
  std::optional<int> degree;
  std::optional<int> precision_bits;
};

// Precision must be set before the band edges are parsed.
std::optional<int> mask_precision(const json& doc) {
  if (!doc.is_object() || !doc.contains("precision_bits")) return std::nullopt;
  const auto& v = doc["precision_bits"];
  if (!v.is_number_integer() || v.get<int>() < 53) throw InputError("precision_bits: integer >= 53 expected");
  return v.get<int>();
}

MaskDocument parse_mask(const json& doc) {
  reject_unknown(doc, {"schema_version", "domain", "bands", "precision_bits", "degree"}, "mask");
  if (!doc.contains("schema_version") || doc["schema_version"] != 1) throw InputError("mask: schema_version must be 1");
  MaskDocument out;
  out.precision_bits = mask_precision(doc);
  if (!doc.contains("domain")) throw InputError("mask: missing domain");
  std::string domain = doc["domain"].is_string() ? doc["domain"].get<std::string>() : "";
  if (domain == "analogue" || domain == "analog")
    out.mask.domain = Domain::analogue;
  else if (domain == "digital")
    out.mask.domain = Domain::digital;
  else
    throw InputError("mask: domain must be \"analogue\" or \"digital\"");
  if (doc.contains("degree")) {
    if (!doc["degree"].is_number_integer() || doc["degree"].get<int>() < 1)
      throw InputError("mask: degree must be a positive integer");
    out.degree = doc["degree"].get<int>();
  }
  if (!doc.contains("bands") || !doc["bands"].is_array()) throw InputError("mask: bands must be a list");
  int i = 0;
  for (const auto& b : doc["bands"]) {
    std::string where = "band " + std::to_string(++i);
    reject_unknown(b, {"lo", "hi", "kind", "ripple", "attenuation"}, where);
    for (const char* key : {"lo", "hi", "kind"})
      if (!b.contains(key)) throw InputError(where + ": missing " + key);
    MaskBand mb;
    mb.lo = parse_point(b["lo"], where + ".lo");
    mb.hi = parse_point(b["hi"], where + ".hi");
    std::string kind = b["kind"].is_string() ? b["kind"].get<std::string>() : "";
    if (kind == "pass") {
      mb.kind = BandKind::pass;
      if (!b.contains("ripple")) throw InputError(where + ": passband needs ripple");
      if (b.contains("attenuation")) throw InputError(where + ": attenuation given for a passband");
      mb.ripple_db = parse_double(b["ripple"], where + ".ripple");
    } else if (kind == "stop") {
      mb.kind = BandKind::stop;
      if (!b.contains("attenuation")) throw InputError(where + ": stopband needs attenuation");
      if (b.contains("ripple")) throw InputError(where + ": ripple given for a stopband");
      mb.attenuation_db = parse_double(b["attenuation"], where + ".attenuation");
    } else {
      throw InputError(where + ": kind must be \"pass\" or \"stop\"");
    }
    out.mask.bands.push_back(mb);
  }
  out.mask.validate();
  return out;
}

std::vector<Complex> sorted_roots(const Poly& p) {
  int d = effective_degree(p, ldexp(Real(1), -working_bits() / 2));
  if (d < 1) return {};
  Poly t(p.begin(), p.begin() + d + 1);
  auto r = poly_roots(t);
  std::sort(r.begin(), r.end(), [](const Complex& a, const Complex& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  });
  return r;
}

json rational_json(const RationalFunction& R) {
  return json{{"numerator", num_list(R.numerator())},
              {"denominator", num_list(R.denominator())},
              {"zeros", num_list(sorted_roots(R.numerator()))},
              {"poles", num_list(sorted_roots(R.denominator()))}};
}

json margins_json(const FilterMask& mask, const MaskCheck& check) {
  json out = json::array();
  for (const auto& b : check.bands)
    out.push_back({{"band", b.band + 1},
                   {"kind", to_string(mask.bands[static_cast<size_t>(b.band)].kind)},
                   {"target_db", b.target_db},
                   {"achieved_db", b.achieved_db},
                   {"margin_db", b.margin_db}});
  return out;
}

json deviation_json(const Real& mu) {
  SettingSolution s{Setting::zolotarev4, RationalFunction(), mu};
  return json{{"mu", num(s.mu())}, {"theta", num(s.theta())}, {"kappa", num(s.kappa())}};
}

json transfer_json(const TransferFunction& h) {
  return json{{"gain", num(h.gain)},
              {"zeros", num_list(h.zeros)},
              {"poles", num_list(h.poles)},
              {"causal", h.causal()}};
}

std::vector<Real> frequency_grid(const FilterMask& mask, int points) {
  Real top = Real::pi();
  if (mask.domain == Domain::analogue) {
    top = Real(1);
    for (const auto& b : mask.bands)
      for (const auto& e : {b.lo, b.hi})
        if (!e.is_infinite()) top = max(top, e.value());
    top *= Real(1.5);
  }
  std::vector<Real> out;
  for (int i = 0; i < points; ++i) out.push_back(points == 1 ? Real(0) : top * Real(i) / Real(points - 1));
  return out;
}

Real factorization_residual(const TransferFunction& h, const RationalFunction& M, const FilterMask& mask) {
  Real worst(0);
  for (const auto& f : frequency_grid(mask, 1000)) {
    Real x = to_line(mask.domain, ExtendedPoint(f)).value();
    worst = max(worst, abs(magnitude_square(h, f) - M(x)));
  }
  return worst;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

void write_design_csv(const std::string& path, const FilterMask& mask, const Design& d, int points) {
  auto out = open_csv(path);
  BandSystem E = mask.line_bands();
  out << "frequency,magnitude_square,delta\n";
  for (const auto& f : frequency_grid(mask, points)) {
    ExtendedPoint x = to_line(mask.domain, ExtendedPoint(f));
    out << num(f) << ',' << num(magnitude_square(d.h, f)) << ',';
    if (auto b = E.band_of(x)) out << num(d.R(x.value()) - Real(kind_sign(E[*b].kind)));
    out << '\n';
  }
}

SearchConfig search_config(const Options& opt, const MaskDocument& doc) {
  SearchConfig cfg;
  int bits = opt.bits_given ? opt.bits : doc.precision_bits.value_or(opt.bits);
  cfg.solver = SolverConfig::for_precision(bits);
  cfg.max_degree = opt.max_degree;
  return cfg;
}

int effective_bits(const Options& opt, const json& doc) {
  if (opt.bits_given) return opt.bits;
  return mask_precision(doc).value_or(opt.bits);
}

using Clock = std::chrono::steady_clock;

void finish(json& report, const Options& opt, Clock::time_point t0) {
  if (!opt.no_timing) report["timing_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
  std::cout << report.dump(2) << '\n';
}

json design_report(const json& raw, const MaskDocument& doc, const Design& d, const SearchConfig& cfg,
                   const std::string& mode) {
  json r;
  r["command"] = "design";
  r["mask"] = raw;
  r["precision_bits"] = cfg.solver.precision.bits;
  r["mode"] = mode;
  r["degree"] = d.degree;
  r["sign_class"] = d.sigma.str();
  r["deviation"] = deviation_json(d.mu);
  r["mask_met"] = d.check.met;
  r["margins"] = margins_json(doc.mask, d.check);
  json pts = json::array();
  for (size_t i = 0; i < d.certificate.points.size(); ++i)
    pts.push_back({{"x", num(d.certificate.points[i])}, {"sign", d.certificate.signs[i]}});
  r["alternation"] = {{"count", d.certificate.count}, {"required", 2 * d.degree + 2}, {"points", pts}};
  r["R"] = rational_json(d.R);
  r["magnitude"] = rational_json(d.magnitude);
  r["h"] = transfer_json(d.h);
  if (doc.mask.domain == Domain::digital) {
    DigitalFilter f = to_digital_filter(d.h);
    r["filter"] = {{"p", f.p}, {"q", f.q}};
  }
  r["diagnostics"] = {{"factorization_residual", num(factorization_residual(d.h, d.magnitude, doc.mask))},
                      {"certified_deviation", num(d.certificate.achieved_deviation)}};
  return r;
}

int cmd_design(const Options& opt, const std::string& path) {
  auto t0 = Clock::now();
  json raw = read_json(path);
  int bits = effective_bits(opt, raw);
  ScopedPrecision guard(bits + 32);
  g_digits = decimal_digits(bits);
  MaskDocument doc = parse_mask(raw);
  SearchConfig cfg = search_config(opt, doc);
  Design d = doc.degree ? design_at_degree(doc.mask, *doc.degree, cfg) : minimal_degree_search(doc.mask, cfg);
  json report = design_report(raw, doc, d, cfg, doc.degree ? "fixed_degree" : "search");
  if (!opt.csv.empty()) write_design_csv(opt.csv, doc.mask, d, opt.grid);
  finish(report, opt, t0);
  return kOk;
}

int cmd_zolotarev(const Options& opt, int n, const std::string& k_text) {
  auto t0 = Clock::now();
  ScopedPrecision guard(opt.bits + 32);
  g_digits = decimal_digits(opt.bits);
  if (n < 1) throw InputError("n must be >= 1");
  Real k = parse_real(json(k_text), "k");
  if (!(k > 0 && k < 1)) throw InputError("k must lie in (0, 1)");
  Precision prec{opt.bits};
  ZolotarevFraction Z = build_zolotarev(n, k, prec);
  TwoBandDeviation dev = deviation(Z);

  // Scale so that the lowest nonzero denominator coefficient is one.
  Poly numer = Z.rational.numerator(), denom = Z.rational.denominator();
  Real lead(0);
  for (const auto& c : denom)
    if (abs(c) > ldexp(Real(1), -opt.bits / 2)) {
      lead = c;
      break;
    }
  for (auto& c : numer) c /= lead;
  for (auto& c : denom) c /= lead;

  std::vector<Real> alt{-1 / k, Real(-1), Real(1), 1 / k};
  for (const auto& c : Z.critical_points(prec)) alt.push_back(c);
  std::sort(alt.begin(), alt.end());

  json r;
  r["command"] = "zolotarev";
  r["precision_bits"] = opt.bits;
  r["n"] = n;
  r["k"] = num(k);
  r["k1"] = num(Z.modulus.k);
  r["theta"] = num(dev.theta);
  r["mu"] = num(dev.mu);
  r["identity_residual"] = num(abs(1 / dev.mu - (dev.theta + 1 / dev.theta) / 2));
  r["numerator"] = num_list(numer);
  r["denominator"] = num_list(denom);
  r["zeros"] = num_list(Z.finite_zeros());
  r["poles"] = num_list(Z.finite_poles());
  r["pole_at_infinity"] = Z.pole_at_infinity();
  r["alternation_points"] = num_list(alt);

  if (!opt.csv.empty()) {
    // Grid rows over +-1.25/k, then the 2n + 2 alternation points.
    auto out = open_csv(opt.csv);
    out << "kind,x,z\n";
    RationalFunction R(numer, denom);
    Real span = Real(1.25) / k;
    for (int i = 0; i < opt.grid; ++i) {
      Real x = opt.grid == 1 ? Real(0) : -span + 2 * span * Real(i) / Real(opt.grid - 1);
      out << "grid," << num(x) << ',' << num(R(ExtendedPoint(x))) << '\n';
    }
    for (const auto& x : alt) out << "alternation," << num(x) << ',' << num(R(ExtendedPoint(x))) << '\n';
  }
  finish(r, opt, t0);
  return kOk;
}

Poly parse_poly(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw InputError(where + ": expected a non-empty list of coefficients");
  Poly p;
  int i = 0;
  for (const auto& c : v) p.push_back(parse_real(c, where + "[" + std::to_string(i++) + "]"));
  return p;
}

int cmd_certify(const Options& opt, const std::string& function_path, const std::string& mask_path) {
  auto t0 = Clock::now();
  json fn = read_json(function_path);
  json raw;
  if (!mask_path.empty()) {
    raw = read_json(mask_path);
  } else if (fn.is_object() && fn.contains("mask")) {
    raw = fn["mask"];
  } else {
    throw InputError("no mask given and " + function_path + " carries none");
  }
  int bits = effective_bits(opt, raw);
  if (!opt.bits_given && fn.is_object() && fn.contains("precision_bits") && fn["precision_bits"].is_number_integer())
    bits = fn["precision_bits"].get<int>();
  ScopedPrecision guard(bits + 32);
  g_digits = decimal_digits(bits);
  MaskDocument doc = parse_mask(raw);

  const json& src = fn.is_object() && fn.contains("R") ? fn["R"] : fn;
  if (!src.is_object() || !src.contains("numerator") || !src.contains("denominator"))
    throw InputError(function_path + ": needs numerator and denominator");
  RationalFunction R(parse_poly(src["numerator"], "numerator"), parse_poly(src["denominator"], "denominator"));

  BandSystem E = doc.mask.line_bands();
  for (const auto& p : sorted_roots(R.denominator()))
    if (abs(p.im) <= ldexp(Real(1), -bits / 4) * (1 + abs(p.re)))
      if (auto b = E.band_of(ExtendedPoint(p.re)))
        throw InputError("candidate has a pole in band " + std::to_string(*b + 1) + " at x = " + num(p.re));
  if (R.at_infinity().is_infinite())
    if (auto b = E.band_of(ExtendedPoint::infinity()))
      throw InputError("candidate has a pole at infinity, inside band " + std::to_string(*b + 1));

  SolverConfig cfg = SolverConfig::for_precision(bits);
  Certification c = certify(R, E, cfg);
  json r;
  r["command"] = "certify";
  r["precision_bits"] = bits;
  r["certified"] = c.certified;
  r["required"] = c.required;
  r["count"] = c.certificate.count;
  r["deviation"] = num(c.certificate.achieved_deviation);
  if (c.certified) {
    json pts = json::array();
    for (size_t i = 0; i < c.certificate.points.size(); ++i)
      pts.push_back({{"x", num(c.certificate.points[i])}, {"sign", c.certificate.signs[i]}});
    r["points"] = pts;
  } else {
    r["refusal"] = c.refusal;
  }
  finish(r, opt, t0);
  if (!c.certified) throw Refused(c.refusal);
  return kOk;
}

int cmd_compare(const Options& opt, const std::string& path) {
  auto t0 = Clock::now();
  json raw = read_json(path);
  int bits = effective_bits(opt, raw);
  ScopedPrecision guard(bits + 32);
  g_digits = decimal_digits(bits);
  MaskDocument doc = parse_mask(raw);
  SearchConfig cfg = search_config(opt, doc);
  Design d = minimal_degree_search(doc.mask, cfg);
  CompositeDesign c = composite_baseline(doc.mask, cfg);
  json r;
  r["command"] = "compare";
  r["mask"] = raw;
  r["precision_bits"] = cfg.solver.precision.bits;
  r["optimal"] = {{"degree", d.degree},
                  {"sign_class", d.sigma.str()},
                  {"deviation", deviation_json(d.mu)},
                  {"mask_met", d.check.met},
                  {"margins", margins_json(doc.mask, d.check)}};
  json stages = json::array();
  for (const auto& s : c.stages)
    stages.push_back({{"degree", s.degree}, {"sign_class", s.sigma.str()}, {"deviation", deviation_json(s.mu)}});
  r["composite"] = {{"degree", c.degree},
                    {"stages", stages},
                    {"mask_met", c.check.met},
                    {"margins", margins_json(doc.mask, c.check)}};
  r["degree_ratio"] = static_cast<double>(c.degree) / d.degree;
  if (!opt.csv.empty()) {
    auto out = open_csv(opt.csv);
    out << "frequency,optimal,composite\n";
    for (const auto& f : frequency_grid(doc.mask, opt.grid))
      out << num(f) << ',' << num(magnitude_square(d.h, f)) << ',' << num(magnitude_square(c.h, f)) << '\n';
  }
  finish(r, opt, t0);
  return kOk;
}

std::vector<double> read_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::vector<double> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      try {
        size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InputError(path + ":" + std::to_string(row) + ": not a number: " + tok);
      }
    }
  }
  return out;
}

std::vector<double> parse_doubles(const json& v, const std::string& where) {
  if (!v.is_array()) throw InputError(where + ": expected a list");
  std::vector<double> out;
  for (const auto& c : v) out.push_back(parse_double(c, where));
  return out;
}

int cmd_simulate(const Options& opt, const std::string& filter_path, const std::string& signal_path) {
  json fj = read_json(filter_path);
  const json& src = fj.is_object() && fj.contains("filter") ? fj["filter"] : fj;
  reject_unknown(src, {"p", "q"}, "filter");
  if (!src.contains("p")) throw InputError("filter: missing p");
  DigitalFilter f{parse_doubles(src["p"], "filter.p"), src.contains("q") ? parse_doubles(src["q"], "filter.q")
                                                                         : std::vector<double>{}};
  auto x = read_signal(signal_path);
  auto y = simulate(f, x);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!opt.csv.empty()) {
    file = open_csv(opt.csv);
    out = &file;
  }
  char buf[64];
  *out << "m,y\n";
  for (size_t m = 0; m < y.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%.17g", y[m]);
    *out << m << ',' << buf << '\n';
  }
  if (opt.gain_theta >= 0) {
    double g = steady_state_gain(f, opt.gain_theta);
    double want = std::abs(filter_response(f, opt.gain_theta));
    char line[160];
    std::snprintf(line, sizeof line, "# gain theta=%.17g steady_state=%.17g transfer=%.17g\n", opt.gain_theta, g,
                  want);
    std::cout << line;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiband minimax filter design"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--precision-bits", opt.bits, "Working precision in bits")
      ->check(CLI::Range(53, 1 << 16))
      ->each([&](const std::string&) { opt.bits_given = true; });
  app.add_option("--grid", opt.grid, "Rows of CSV plot data")->check(CLI::Range(1, 10000000));
  app.add_option("--csv", opt.csv, "Write CSV plot data to this path");
  app.add_flag("--no-timing", opt.no_timing, "Omit timing from reports");

  std::string path1, path2, k_text;
  int n = 0;
  auto* design = app.add_subcommand("design", "Minimal degree design for a mask");
  design->add_option("mask", path1, "Mask file (JSON)")->required();
  design->add_option("--max-degree", opt.max_degree, "Search cap")->check(CLI::Range(1, 200));

  auto* zolo = app.add_subcommand("zolotarev", "Zolotarev fraction Z_n for modulus k");
  zolo->add_option("n", n, "Degree")->required();
  zolo->add_option("k", k_text, "Modulus in (0, 1)")->required();

  auto* cert = app.add_subcommand("certify", "Certify a candidate against a mask");
  cert->add_option("function", path1, "Candidate (JSON coefficients or a design report)")->required();
  cert->add_option("mask", path2, "Mask file; defaults to the mask inside a design report");

  auto* cmp = app.add_subcommand("compare", "Optimal design against the composite baseline");
  cmp->add_option("mask", path1, "Mask file (JSON)")->required();
  cmp->add_option("--max-degree", opt.max_degree, "Search cap")->check(CLI::Range(1, 200));

  auto* sim = app.add_subcommand("simulate", "Run a digital filter on a signal");
  sim->add_option("filter", path1, "Filter (JSON p, q or a digital design report)")->required();
  sim->add_option("signal", path2, "Signal file, one sample per line")->required();
  sim->add_option("--gain", opt.gain_theta, "Also report the steady-state gain at this angle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*design) return cmd_design(opt, path1);
    if (*zolo) return cmd_zolotarev(opt, n, k_text);
    if (*cert) return cmd_certify(opt, path1, path2);
    if (*cmp) return cmd_compare(opt, path1);
    if (*sim) return cmd_simulate(opt, path1, path2);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const InfeasibleAtCap& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NonConverged& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const ClassEmpty& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const PrecisionError& e) {
    std::cerr << "precision: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const Refused& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kRefusal;
  } catch (const Instability& e) {
    std::cerr << "unstable: " << e.what() << '\n';
    return kInstability;
  }
  return kInput;
}
