#pragma once

// Class-constrained rational Remez exchange for the best approximation of
// the band indicator S = +-1 on E, and the equiripple certifier.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "multiband/band_model.hpp"

namespace mb {

struct SolverConfig {
  Precision precision{256};
  int max_iterations = 60;
  /// Fraction of the move towards the exchanged reference, in (0,1].
  double exchange_damping = 1.0;
  /// Relative tolerance on ripple-height equality in certificates.
  double certificate_tolerance = 1e-10;
  /// Grid points per band for extremum search; 0 picks 16 (n + 2).
  int grid_density = 0;

  /// Defaults with the certificate tolerance scaled as 1e-10 * 2^((256 - bits)/4).
  static SolverConfig for_precision(int bits);
  void validate() const;
};

/// Band of E in the solver chart, where every band is a finite interval
/// and the bands together span [-1, 1].
struct ChartSegment {
  Real lo, hi;
  int band = 0;  // canonical index in E
  int sign = 1;  // value of S on the band
};

struct SolverChart {
  Mobius to_chart;
  std::vector<ChartSegment> segments;  // ascending
  int first_band = 0;                  // canonical index of segments[0]
};

SolverChart make_chart(const BandSystem& E);

/// delta = R - S restricted to E, expressed in a chart coordinate t.
class ErrorFunction {
 public:
  ErrorFunction(const RationalFunction& R, const BandSystem& E);
  /// Arbitrary function on finite segments. degree_hint sizes the default grid.
  ErrorFunction(std::function<Real(const Real&)> delta, std::vector<ChartSegment> segments,
                Mobius from_chart = Mobius::identity(), int degree_hint = 0);

  Real operator()(const Real& t) const { return delta_(t); }
  const std::vector<ChartSegment>& segments() const { return segments_; }
  ExtendedPoint to_original(const Real& t) const { return from_chart_(ExtendedPoint(t)); }
  int degree_hint() const { return degree_hint_; }

 private:
  std::function<Real(const Real&)> delta_;
  std::vector<ChartSegment> segments_;
  Mobius from_chart_;
  int degree_hint_ = 0;
};

struct Extremum {
  Real t;             // chart coordinate
  ExtendedPoint x;    // original coordinate
  Real value;         // delta at the point
  int segment = 0;    // index into ErrorFunction::segments()
  bool endpoint = false;
};

class GridTooCoarse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Band endpoints plus all interior local extrema of delta, ordered by t.
/// With expected > 0 the grid is doubled (at most four times) until the
/// longest alternating run reaches expected; GridTooCoarse after that.
std::vector<Extremum> local_extrema(const ErrorFunction& delta, const SolverConfig& cfg, int expected = 0);

/// Longest alternating subsequence (cyclic, even length) of the given
/// extrema, keeping the largest |value| within each same-sign run.
std::vector<Extremum> alternating_subsequence(const std::vector<Extremum>& ext);

struct AlternationCertificate {
  std::vector<ExtendedPoint> points;
  std::vector<int> signs;
  Real achieved_deviation;
  int count = 0;
  int degree = 0;
};

struct Certification {
  bool certified = false;
  std::string refusal;  // empty when certified
  AlternationCertificate certificate;
  int required = 0;
};

Certification certify(const RationalFunction& R, const BandSystem& E, const SolverConfig& cfg);

struct SolveResult {
  RationalFunction R;
  Real mu;
  AlternationCertificate certificate;
  SignClass sigma;
  /// Reference levelled error |lambda| of each accepted iteration.
  std::vector<Real> reference_trace;
  int iterations = 0;
};

class ClassEmpty : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConverged : public std::runtime_error {
 public:
  NonConverged(const std::string& what, RationalFunction best, Real best_deviation, std::vector<Real> trace)
      : std::runtime_error(what), best(std::move(best)), best_deviation(std::move(best_deviation)), trace(std::move(trace)) {}
  RationalFunction best;
  Real best_deviation;
  std::vector<Real> trace;
};

/// Sign-class consistent seed: a product of adapted Zolotarev factors over
/// pairs of pass/stop transitions, plus degree-one pole/zero pairs for the
/// remaining class bits. Throws ClassEmpty when n is too small.
RationalFunction initial_guess(const BandSystem& E, int n, const SignClass& sigma, Precision prec = {});

SolveResult solve(const BandSystem& E, int n, const SignClass& sigma, const SolverConfig& cfg);

struct ClassOutcome {
  SignClass sigma;
  std::optional<SolveResult> result;
  std::string failure;
};

/// Every parity-admissible class, in lexicographic bit order.
std::vector<ClassOutcome> solve_each_class(const BandSystem& E, int n, const SolverConfig& cfg);

/// Best over all classes. Throws ClassEmpty if no class converged.
SolveResult solve(const BandSystem& E, int n, const SolverConfig& cfg);

}  // namespace mb
