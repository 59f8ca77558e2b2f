#pragma once

// Branching data of a real rational map on the Riemann sphere: critical
// points, the genus count against a 4-point exceptional set Q, and the
// branch points of the associated hyperelliptic curve.

#include <array>
#include <vector>

#include "multiband/band_model.hpp"
#include "multiband/errors.hpp"

namespace mb {

class ExceptionalSet {
 public:
  /// Four pairwise distinct extended reals.
  explicit ExceptionalSet(std::array<ExtendedPoint, 4> values);

  /// {+-theta, +-1/theta}.
  static ExceptionalSet from_theta(const Real& theta);
  /// {+-1 +- mu}.
  static ExceptionalSet from_mu(const Real& mu);
  /// The endpoints of F- and F+.
  static ExceptionalSet from_range(const RangeSystem& F);

  const std::array<ExtendedPoint, 4>& values() const { return values_; }

 private:
  std::array<ExtendedPoint, 4> values_;
};

/// A point of the Riemann sphere; x is ignored when infinite.
struct SpherePoint {
  Complex x;
  bool infinite = false;

  bool is_real(const Real& tol) const;
  std::string str(int digits = 17) const;
};

struct CriticalPoint {
  SpherePoint point;
  int branching = 0;
  SpherePoint value;
  bool in_q = false;
};

struct BranchingProfile {
  std::vector<CriticalPoint> entries;
  int degree = 0;
  int total() const;
};

struct CurveSpec {
  std::vector<SpherePoint> branch_points;
  int genus = 0;
};

/// A critical value close to Q without matching it.
class AmbiguityError : public PrecisionError {
 public:
  using PrecisionError::PrecisionError;
};

/// Local degree of R at x minus one.
int branching_number(const RationalFunction& R, const ExtendedPoint& x, Precision prec = {});

/// All critical points with their branching numbers; the sum is 2 deg R - 2.
BranchingProfile branching_profile(const RationalFunction& R, const ExceptionalSet& Q, Precision prec = {});

/// g from g - 1 = sum over R(x) not in Q of B + sum over R(x) in Q of floor(B / 2).
int genus_count(const RationalFunction& R, const ExceptionalSet& Q, Precision prec = {});

/// Points where R takes a value of Q with odd multiplicity. Throws
/// PrecisionError if their number is not 2 g + 2.
CurveSpec branch_points(const RationalFunction& R, const ExceptionalSet& Q, Precision prec = {});

}  // namespace mb
