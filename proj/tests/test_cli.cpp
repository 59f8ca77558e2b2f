#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "multiband/band_model.hpp"
#include "multiband/zolotarev.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stderr is folded into out when merge is set.
Run run(const std::string& args, bool merge = false) {
  std::string cmd = std::string(MBFILTER_EXE) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(MBFILTER_DATA) + "/" + name; }

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("mbfilter_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::vector<std::string> lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

double as_double(const json& v) { return std::stod(v.get<std::string>()); }

}  // namespace

TEST_CASE("design matches the closed-form two-band deviation") {
  Run r = run("--no-timing design " + data("lowpass.json"));
  REQUIRE(r.code == 0);
  json rep = json::parse(r.out);
  CHECK(rep["mask_met"] == true);
  int n = rep["degree"];
  CHECK(rep["alternation"]["count"].get<int>() == 2 * n + 2);

  mb::ScopedPrecision guard(256);
  mb::Arc eplus(mb::ExtendedPoint(mb::Real(0)), mb::ExtendedPoint(mb::Real(1)));
  mb::Arc eminus(mb::ExtendedPoint(mb::Real("1.69")), mb::ExtendedPoint::infinity());
  mb::Real mu = mb::deviation(n, mb::modulus_for_segments(eplus, eminus)).mu;
  mb::Real got(rep["deviation"]["mu"].get<std::string>());
  CHECK((abs(got - mu) / mu).to_double() < 1e-12);

  mb::Real theta(rep["deviation"]["theta"].get<std::string>());
  mb::Real kappa(rep["deviation"]["kappa"].get<std::string>());
  CHECK(abs(1 / got - (theta + 1 / theta) / 2).to_double() < 1e-25);
  CHECK((abs(kappa - 1 / (got * got)) / kappa).to_double() < 1e-25);
  CHECK(rep["h"]["causal"] == true);
  CHECK(as_double(rep["diagnostics"]["factorization_residual"]) <= 1e-18);
}

TEST_CASE("design input errors") {
  Run r = run("design " + data("overlap.json"), true);
  CHECK(r.code == 2);
  CHECK(r.out.find("bands 1 and 2") != std::string::npos);

  r = run("design " + data("unknown_field.json"), true);
  CHECK(r.code == 2);
  CHECK(r.out.find("gain") != std::string::npos);

  CHECK(run("design " + data("does_not_exist.json")).code == 2);
  CHECK(run("design " + write("bad.json", "{ not json")).code == 2);
  CHECK(run("design --max-degree 4 " + data("zero_ripple.json")).code == 3);
}

TEST_CASE("fixed-degree mode reports a design that misses the mask") {
  std::string mask = write("fixed.json", R"({
    "schema_version": 1, "domain": "analogue", "degree": 3,
    "bands": [{"lo": 0, "hi": 1, "kind": "pass", "ripple": 0.5},
              {"lo": 1.3, "hi": "inf", "kind": "stop", "attenuation": 40}]})");
  Run r = run("--no-timing design " + mask);
  REQUIRE(r.code == 0);
  json rep = json::parse(r.out);
  CHECK(rep["mode"] == "fixed_degree");
  CHECK(rep["degree"] == 3);
  CHECK(rep["mask_met"] == false);
}

TEST_CASE("design CSV has one row per grid point") {
  std::string csv = (scratch() / "design.csv").string();
  Run r = run("--no-timing --grid 37 --csv " + csv + " design " + data("digital_lowpass.json"));
  REQUIRE(r.code == 0);
  auto rows = lines(csv);
  REQUIRE(rows.size() == 38);
  CHECK(rows[0] == "frequency,magnitude_square,delta");
}

TEST_CASE("zolotarev verb") {
  Run r = run("--no-timing --precision-bits 128 zolotarev 1 0.5");
  REQUIRE(r.code == 0);
  json z = json::parse(r.out);
  CHECK(as_double(z["numerator"][0]) == 0);
  CHECK(as_double(z["numerator"][1]) == 1);
  CHECK(as_double(z["denominator"][0]) == 1);
  CHECK(as_double(z["denominator"][1]) == 0);

  std::string csv = (scratch() / "z5.csv").string();
  r = run("--no-timing --grid 40 --csv " + csv + " zolotarev 5 0.6");
  REQUIRE(r.code == 0);
  z = json::parse(r.out);
  CHECK(z["alternation_points"].size() == 12);
  CHECK(as_double(z["identity_residual"]) < 1e-25);
  int grid = 0, alt = 0;
  for (const auto& l : lines(csv)) {
    grid += l.rfind("grid,", 0) == 0;
    alt += l.rfind("alternation,", 0) == 0;
  }
  CHECK(grid == 40);
  CHECK(alt == 12);

  CHECK(run("zolotarev 3 1.5").code == 2);
  CHECK(run("zolotarev 0 0.5").code == 2);
}

TEST_CASE("certify: round trip, perturbation and poles in bands") {
  Run d = run("--no-timing design " + data("lowpass.json"));
  REQUIRE(d.code == 0);
  std::string report = write("report.json", d.out);
  Run c = run("certify " + report);
  CHECK(c.code == 0);
  CHECK(json::parse(c.out)["certified"] == true);
  CHECK(run("certify " + report + " " + data("lowpass.json")).code == 0);

  json rep = json::parse(d.out);
  auto& num = rep["R"]["numerator"];
  size_t big = 0;
  for (size_t i = 0; i < num.size(); ++i)
    if (std::abs(as_double(num[i])) > std::abs(as_double(num[big]))) big = i;
  {
    mb::ScopedPrecision guard(256);
    num[big] = (mb::Real(num[big].get<std::string>()) * mb::Real("1.000001")).str(78);
  }
  c = run("certify " + write("perturbed.json", rep.dump()), true);
  CHECK(c.code == 5);
  CHECK(c.out.find("ripple heights unequal") != std::string::npos);

  // Pole at x = 0.5, inside the passband [0, 1].
  std::string pole = write("pole.json", R"({"numerator": [1], "denominator": [-0.5, 1]})");
  CHECK(run("certify " + pole + " " + data("lowpass.json")).code == 2);
}

TEST_CASE("compare verb") {
  Run r = run("--no-timing compare " + data("lowpass.json"));
  REQUIRE(r.code == 0);
  json c = json::parse(r.out);
  CHECK(c["optimal"]["degree"] == c["composite"]["degree"]);

  std::string csv = (scratch() / "cmp.csv").string();
  r = run("--no-timing --grid 25 --csv " + csv + " compare " + data("double_notch.json"));
  REQUIRE(r.code == 0);
  c = json::parse(r.out);
  CHECK(c["optimal"]["degree"].get<int>() < c["composite"]["degree"].get<int>());
  CHECK(c["composite"]["stages"].size() == 3);
  for (const char* which : {"optimal", "composite"}) {
    CHECK(c[which]["mask_met"] == true);
    for (const auto& m : c[which]["margins"]) CHECK(m["margin_db"].get<double>() >= 0);
  }
  CHECK(lines(csv).size() == 26);
}

TEST_CASE("simulate verb") {
  Run r = run("simulate " + data("identity_filter.json") + " " + data("signal.txt"));
  REQUIRE(r.code == 0);
  CHECK(r.out == "m,y\n0,1\n1,-2\n2,3.5\n3,0\n4,7\n5,0.25\n");

  std::string f = write("fir.json", R"({"p": [0.5, 0.25], "q": [0.3]})");
  Run a = run("simulate " + f + " " + data("signal.txt"));
  Run b = run("simulate " + f + " " + data("signal_delayed.txt"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::vector<std::string> ya, yb;
  std::istringstream sa(a.out), sb(b.out);
  for (std::string l; std::getline(sa, l);) ya.push_back(l.substr(l.find(',') + 1));
  for (std::string l; std::getline(sb, l);) yb.push_back(l.substr(l.find(',') + 1));
  REQUIRE(yb.size() == ya.size() + 3);
  for (size_t i = 1; i < ya.size(); ++i) CHECK(yb[i + 3] == ya[i]);
  for (size_t i = 1; i <= 3; ++i) CHECK(yb[i] == "0");

  Run d = run("--no-timing design " + data("digital_lowpass.json"));
  REQUIRE(d.code == 0);
  std::string report = write("digital.json", d.out);
  for (double th : {0.3, 1.1, 2.0}) {
    Run g = run("simulate --gain " + std::to_string(th) + " " + report + " " + data("signal.txt"));
    REQUIRE(g.code == 0);
    auto at = g.out.find("steady_state=");
    REQUIRE(at != std::string::npos);
    double ss = std::stod(g.out.substr(at + 13));
    double tf = std::stod(g.out.substr(g.out.find("transfer=") + 9));
    CHECK(std::abs(ss - tf) <= 1e-6);
  }

  std::string ones;
  for (int i = 0; i < 3000; ++i) ones += "1\n";
  ones = write("ones.txt", ones);
  CHECK(run("simulate " + data("unstable_filter.json") + " " + ones).code == 6);
}

TEST_CASE("reports are byte-identical without timing") {
  Run a = run("--no-timing design " + data("digital_lowpass.json"));
  Run b = run("--no-timing design " + data("digital_lowpass.json"));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  Run t = run("design " + data("digital_lowpass.json"));
  CHECK(t.out.find("timing_seconds") != std::string::npos);
  CHECK(a.out.find("timing_seconds") == std::string::npos);
}
