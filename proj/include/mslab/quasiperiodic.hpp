#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mslab/lattice.hpp"

namespace mslab {

enum class Side { Right, Left };
std::string to_string(Side side);

// A real number or one of the signed infinities produced by unbounded
// potentials. Reading value() from an infinity, or doing arithmetic that
// mixes one with a finite number, throws SentinelArithmetic.
class ExtendedReal {
 public:
  enum class Kind { Finite, NegInf, PosInf };

  constexpr ExtendedReal(double v = 0.0) : kind_(Kind::Finite), v_(v) {}  // NOLINT
  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::NegInf); }
  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::PosInf); }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Finite; }
  double value() const;
  // Infinities map to +-inf doubles; for reporting only.
  double as_double() const;

  friend ExtendedReal operator-(const ExtendedReal& a, const ExtendedReal& b);
  friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b);
  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.v_ == b.v_);
  }

 private:
  constexpr explicit ExtendedReal(Kind k) : kind_(k), v_(0.0) {}
  Kind kind_;
  double v_;
};

// Phases closer than this to an integer or to a breakpoint are identified
// with it. Sums like frac(-x.w) + x.w round to within ~1e-13 of an integer.
inline constexpr double kPhaseSnap = 1e-11;

enum class Boundedness { BLM, UBLM };

class Potential {
 public:
  enum class Family { Sawtooth, Maryland, PiecewiseLinear, Tabulated };

  static Potential sawtooth();
  // -cot(pi t): increasing on (0,1), -inf at 0+, +inf at 1-.
  static Potential maryland();
  // Segment k covers [breakpoints[k], breakpoints[k+1]) with value
  // values[k] + slopes[k] (t - breakpoints[k]). breakpoints[0] must be 0.
  static Potential piecewise_linear(std::vector<double> breakpoints, std::vector<double> values,
                                    std::vector<double> slopes);
  // Linear interpolation of monotone samples (theta_i, v_i), theta_0 = 0 and
  // theta_last = 1.
  static Potential tabulated(std::vector<double> thetas, std::vector<double> values);

  Family family() const { return family_; }
  Boundedness boundedness() const { return bound_; }
  double lipschitz() const { return lipschitz_; }
  std::string name() const;

  ExtendedReal eval(double theta, Side side = Side::Right) const;

  // Discontinuity points in [0,1): always 0, plus interior breakpoints with a
  // positive jump for piecewise families.
  const std::vector<double>& breakpoints() const { return breaks_; }

  const std::vector<double>& table_x() const { return xs_; }
  const std::vector<double>& table_v() const { return vs_; }
  const std::vector<double>& table_slopes() const { return slopes_; }

 private:
  Potential() = default;
  // t in [0,1) after reduction; left selects the left limit at t.
  ExtendedReal eval_reduced(double t, bool left) const;

  Family family_ = Family::Sawtooth;
  Boundedness bound_ = Boundedness::BLM;
  double lipschitz_ = 1.0;
  std::vector<double> xs_, vs_, slopes_;
  std::vector<double> breaks_{0.0};
};

// theta - floor(theta), snapped to 0 within kPhaseSnap of an integer.
double reduce_phase(double theta);

struct Frequency {
  enum class Provenance { UserSupplied, EmpiricallyEstimated };

  std::vector<double> omega;
  double tau = 2.0;
  double gamma = 0.0;
  Provenance provenance = Provenance::UserSupplied;
  int estimate_radius = 0;

  int dim() const { return static_cast<int>(omega.size()); }
  double dot(const Point& x) const;

  static Frequency golden(int dim);
};

double torus_norm(const Point& x, const Frequency& freq);

// min over 0 < |x|_1 <= N of torus_norm(x) |x|_1^tau.
double estimate_dc_constant(const Frequency& freq, int N);

// Fills gamma by estimate_dc_constant and records the provenance.
Frequency with_estimated_gamma(Frequency freq, int N);

// torus_norm(x) |x|^tau >= gamma, evaluated in the same form as the estimate.
bool satisfies_dc(const Point& x, const Frequency& freq);

}  // namespace mslab
