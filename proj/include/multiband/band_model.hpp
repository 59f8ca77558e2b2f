#pragma once

// Band systems E, value ranges F, their cross-ratio, projective
// transforms, Amer sign classes and the four equivalent problem settings.

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "multiband/rational.hpp"

namespace mb {

enum class BandKind { pass, stop };

inline int kind_sign(BandKind k) { return k == BandKind::pass ? 1 : -1; }
std::string to_string(BandKind k);

/// Closed arc of the projective circle from lo to hi in the positive
/// direction. lo after hi in the cyclic order means the arc passes infinity.
struct Arc {
  ExtendedPoint lo, hi;

  Arc() = default;
  Arc(ExtendedPoint lo_, ExtendedPoint hi_);

  bool wraps() const;
  bool contains(const ExtendedPoint& x) const;
  /// Membership with a slack measured in circle position (radians of atan).
  bool contains_approx(const ExtendedPoint& x, const Real& slack) const;
  /// Circle-position length, in (0, pi).
  Real angular_length() const;
  /// Point halfway along the arc in circle position.
  ExtendedPoint midpoint() const;
  /// Point at fraction t in [0,1] along the arc in circle position.
  ExtendedPoint at_fraction(const Real& t) const;
};

struct Band : Arc {
  BandKind kind = BandKind::pass;

  Band() = default;
  Band(ExtendedPoint lo_, ExtendedPoint hi_, BandKind k) : Arc(std::move(lo_), std::move(hi_)), kind(k) {}
};

/// m >= 2 disjoint bands in canonical cyclic order: sorted by the lower
/// endpoint with infinity first.
class BandSystem {
 public:
  explicit BandSystem(std::vector<Band> bands);

  int size() const { return static_cast<int>(bands_.size()); }
  const Band& operator[](int i) const { return bands_[static_cast<size_t>(i)]; }
  const std::vector<Band>& bands() const { return bands_; }
  std::vector<ExtendedPoint> endpoints() const;
  /// Index of the band containing x, if any.
  std::optional<int> band_of(const ExtendedPoint& x) const;
  /// True if the gap after band j (towards band j+1, cyclically) contains infinity.
  bool gap_contains_infinity(int j) const;

 private:
  std::vector<Band> bands_;
};

/// Value ranges F- and F+ with endpoints a = lo(F-), b = hi(F-),
/// c = lo(F+), d = hi(F+) in this cyclic order.
struct RangeSystem {
  Arc minus, plus;

  RangeSystem(Arc minus_, Arc plus_);

  /// F+- = +-[1 - mu, 1 + mu], 0 < mu < 1.
  static RangeSystem from_mu(const Real& mu);
  /// F+ = [-theta, theta], F- = [1/theta, -1/theta] through infinity.
  static RangeSystem from_theta(const Real& theta);

  std::vector<ExtendedPoint> endpoints() const { return {minus.lo, minus.hi, plus.lo, plus.hi}; }
};

/// +1 on passbands, -1 on stopbands, nullopt in the gaps.
std::optional<int> indicator(const ExtendedPoint& x, const BandSystem& E);

Real cross_ratio(const RangeSystem& F);
Real kappa_from_theta(const Real& theta);
Real kappa_from_mu(const Real& mu);
Real theta_from_mu(const Real& mu);
Real mu_from_theta(const Real& theta);

class SignClass {
 public:
  /// Free bits for the first m-1 adjacent pairs; the closing pair's bit is
  /// fixed by the parity of the degree.
  SignClass(std::vector<int> bits, int degree_parity);
  /// All m bits given explicitly; throws DomainError if they violate the
  /// parity law.
  SignClass(std::vector<int> bits, int closing_bit, int degree_parity);

  /// Bits sigma(1..m-1).
  const std::vector<int>& bits() const { return bits_; }
  int closing_bit() const { return closing_; }
  int degree_parity() const { return parity_; }
  int band_count() const { return static_cast<int>(bits_.size()) + 1; }
  /// Bit for the pair (j, j+1), j in 0..m-1 (j = m-1 is the closing pair).
  int bit(int j) const;
  /// "0110|1" style string: free bits, then the closing bit.
  std::string str() const;

  /// Enumeration of all 2^(m-1) classes for m bands and the degree parity.
  static std::vector<SignClass> all(int m, int degree_parity);

  friend bool operator==(const SignClass&, const SignClass&) = default;
  friend auto operator<=>(const SignClass&, const SignClass&) = default;

 private:
  std::vector<int> bits_;
  int closing_ = 0;
  int parity_ = 0;
};

/// Thrown when a rational function does not map E+- into F+-.
class NotInClassError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExtendedPoint apply_projective(const Mobius& T, const ExtendedPoint& x);
Arc apply_projective(const Mobius& T, const Arc& a);
Band apply_projective(const Mobius& T, const Band& b);
BandSystem apply_projective(const Mobius& T, const BandSystem& E);
RangeSystem apply_projective(const Mobius& T, const RangeSystem& F);
/// Action of a value-space map beta on the class of R in R_n(E, F):
/// the class of beta o R in R_n(E, beta F).
SignClass apply_projective(const Mobius& beta, const SignClass& s, const BandSystem& E);

/// Sign class of R relative to (E, F) by lifting R to the double cover
/// over each pair of consecutive bands. The formal degree of R supplies
/// the parity. check_slack is the tolerance (circle position) for the
/// membership test R(E+-) in F+-.
SignClass sign_class_of(const RationalFunction& R, const BandSystem& E, const RangeSystem& F,
                        std::optional<Real> check_slack = std::nullopt);

/// Lifted winding bits for all m consecutive pairs, without the membership
/// check or the parity validation.
std::vector<int> lift_bits(const RationalFunction& R, const BandSystem& E, const RangeSystem& F);

enum class Setting { min_deviation = 1, modified_deviation = 2, zolotarev3 = 3, zolotarev4 = 4 };

/// A solution in one of the four settings. deviation holds theta^2 for
/// setting 1, theta for settings 2 and 3 and mu for setting 4.
struct SettingSolution {
  Setting setting = Setting::zolotarev4;
  RationalFunction R;
  Real deviation;

  Real theta() const;
  Real mu() const;
  Real kappa() const;
};

/// Range system whose membership defines the admissible class of a setting.
RangeSystem range_for(Setting s, const Real& deviation);
SettingSolution convert_setting(const SettingSolution& src, Setting target);
/// Solutions in the three settings other than the source one.
std::vector<SettingSolution> convert_setting(const SettingSolution& src);

}  // namespace mb
