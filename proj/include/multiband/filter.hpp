#pragma once

// Filter masks, magnitude responses, causal spectral factorization,
// the digital recurrence, and degree search against a mask.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "multiband/minimax.hpp"

namespace mb {

enum class Domain { analogue, digital };

std::string to_string(Domain d);

/// Frequency band of a mask. Analogue frequencies are omega >= 0 (hi may be
/// infinite); digital ones are angles in [0, pi].
struct MaskBand {
  ExtendedPoint lo, hi;
  BandKind kind = BandKind::pass;
  /// Passbands: allowed dip of |h|^2 below 1, in dB.
  double ripple_db = 0;
  /// Stopbands: required suppression of |h|^2, in dB.
  double attenuation_db = 0;
};

struct FilterMask {
  Domain domain = Domain::analogue;
  std::vector<MaskBand> bands;  // ascending, disjoint

  /// Throws DomainError naming the offending band (1-based).
  void validate() const;
  /// Bands in the line variable x: omega^2 (analogue) or cos(theta) (digital).
  BandSystem line_bands() const;
  /// Ripple and attenuation targets aligned with line_bands().
  std::vector<double> line_targets() const;
};

/// Frequency to line variable and back.
ExtendedPoint to_line(Domain d, const ExtendedPoint& frequency);
ExtendedPoint from_line(Domain d, const ExtendedPoint& x);
/// Whether x belongs to the image of the real frequency axis.
bool is_physical(Domain d, const ExtendedPoint& x);

struct TransferFunction {
  Domain domain = Domain::analogue;
  std::vector<Complex> zeros, poles;
  Complex gain{1};

  /// h at a complex argument (omega or z).
  Complex operator()(const Complex& s) const;
  /// h on the frequency axis: omega, or z = exp(i theta).
  Complex response(const Real& frequency) const;
  int degree() const;
  /// Poles strictly in the lower half plane (analogue) or strictly outside the unit circle (digital).
  bool causal() const;
  /// Zero and pole sets closed under r -> -conj(r) (analogue) or r -> conj(r) (digital).
  bool real_symmetric(const Real& tol) const;
};

/// Series connection: the product of the stage responses.
TransferFunction cascade(const std::vector<TransferFunction>& stages);
/// Parallel connection: the sum of the stage responses over a common denominator.
TransferFunction parallel(const std::vector<TransferFunction>& stages);

/// |h|^2 as a rational function of the line variable.
RationalFunction magnitude_in_line(const TransferFunction& h);

/// |h|^2 at a real frequency. Throws PoleError on a pole.
Real magnitude_square(const TransferFunction& h, const Real& frequency);

class NotAMagnitude : public DomainError {
 public:
  using DomainError::DomainError;
};

/// h with |h(omega)|^2 = R(omega^2) (analogue) or |h(exp(i theta))|^2 = R(cos theta)
/// (digital); poles on the causal side, zeros on or inside it.
TransferFunction spectral_factorize(const RationalFunction& R, Domain domain, Precision prec = {});

/// Recurrence y(m) = sum p_j x(m - j) + sum_{j >= 1} q_j y(m - j).
struct DigitalFilter {
  std::vector<double> p;
  std::vector<double> q;  // q[0] is q_1
};

DigitalFilter to_digital_filter(const TransferFunction& h);
/// P(z) / (1 - sum q_j z^j) at z = exp(i theta), in double precision.
std::complex<double> filter_response(const DigitalFilter& f, double theta);

class Instability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input starts at index 0; output has the same length.
std::vector<double> simulate(const DigitalFilter& f, const std::vector<double>& input);

/// Gain for the input cos(theta k) after the transient: at least 20 periods
/// are run and the amplitude is fitted over the last 5.
double steady_state_gain(const DigitalFilter& f, double theta);

/// Arc of the unit circle, counterclockwise from start to end (angles in
/// radians). start = -pi, end = pi is the full circle.
struct CircleBand {
  Real start, end;
  BandKind kind = BandKind::pass;
};

/// Conjugate-symmetric arcs to segments of [-1, 1] via x = cos(theta).
/// An arc inside the upper half circle stands for itself and its mirror;
/// lower-half arcs need their mirror, arcs across the real axis must be
/// symmetric. Segments are returned ascending.
std::vector<Band> digital_line_map(const std::vector<CircleBand>& arcs);
/// Inverse: one representative arc per segment.
std::vector<CircleBand> digital_circle_map(const std::vector<Band>& segments);

/// Magnitude square beta(R) from a class minimizer R with values in
/// +-[1 - mu, 1 + mu] on E. beta is linear-fractional, sends the lowest value
/// of R on the physical line to 0 and 1 + mu to 1, and places -1 + mu so that
/// the stopband and passband margins (dB targets) come out equal. nullopt if
/// R has a pole on the physical line.
std::optional<RationalFunction> magnitude_from_minimizer(const RationalFunction& R, const Real& mu, Domain domain,
                                                         double stop_db, double ripple_db);

struct BandMargin {
  int band = 0;  // index into FilterMask::bands
  Real min_value, max_value;
  double achieved_db = 0;  // ripple (pass) or attenuation (stop)
  double target_db = 0;
  double margin_db = 0;    // >= 0 when met
};

struct MaskCheck {
  bool met = false;
  std::vector<BandMargin> bands;
  double worst_margin_db() const;
};

/// Evaluates a magnitude square M(x) on every band, on a grid refined near
/// the band edges plus the real critical points of M.
MaskCheck check_mask(const FilterMask& mask, const RationalFunction& M);

struct Design {
  int degree = 0;
  SignClass sigma;
  Real mu;
  RationalFunction R;          // class minimizer in the line variable
  RationalFunction magnitude;  // |h|^2 in the line variable
  TransferFunction h;
  MaskCheck check;
  AlternationCertificate certificate;
};

class InfeasibleAtCap : public std::runtime_error {
 public:
  InfeasibleAtCap(const std::string& what, std::optional<Design> best)
      : std::runtime_error(what), best(std::move(best)) {}
  std::optional<Design> best;  // largest worst-band margin seen
};

struct SearchConfig {
  SolverConfig solver;
  int max_degree = 20;
};

/// Smallest n with a class minimizer meeting the mask, classes tried in
/// lexicographic order for each n.
Design minimal_degree_search(const FilterMask& mask, const SearchConfig& cfg);

/// Best class at a fixed degree (largest worst-band margin), whether or not
/// it meets the mask. Throws NonConverged or ClassEmpty when no class yields
/// a magnitude response.
Design design_at_degree(const FilterMask& mask, int n, const SearchConfig& cfg);

struct CompositeDesign {
  int degree = 0;
  std::vector<Design> stages;  // one per passband
  RationalFunction magnitude;  // |sum of stage responses|^2
  TransferFunction h;
  MaskCheck check;
};

/// Battery of single-passband filters connected in parallel. Stage i passes
/// passband i and stops the arc from the next band around to the previous
/// one. Stage targets absorb the leakage of the other stages, so the sum
/// meets the mask. With one passband the single stage is the optimal design.
CompositeDesign composite_baseline(const FilterMask& mask, const SearchConfig& cfg);

}  // namespace mb
