#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mslab/exec.hpp"
#include "mslab/operator.hpp"
#include "mslab/schedule.hpp"
#include "mslab/schur.hpp"

namespace mslab {

struct ScaleStep {
  double value = 0.0;
  bool root_certified = true;   // window isolated exactly one eigenvalue
  long full_count = 0;
  long minor_count = 0;
  double second_distance = std::numeric_limits<double>::infinity();
  double step = 0.0;            // |E_k - E_{k-1}|
  bool step_ok = true;          // step <= e^{-l_{k-1}}
  double s_derivative = 1.0;
  bool derivative_ok = true;
};

struct RellichPoint {
  double theta = 0.0;
  Side side = Side::Right;
  int scale = 0;
  bool defined = true;          // false at poles of an unbounded potential
  bool in_regime = true;        // every scale certified
  double value = 0.0;
  std::vector<double> scale_values;  // E_0..E_scale
  std::vector<ScaleStep> steps;      // steps[k-1] describes scale k
  long branch_index = 0;             // nearest sorted eigenvalue of H_{B_scale}
  double branch_distance = 0.0;
  std::string note;
};

struct RellichOptions {
  // Out-of-regime samples take the eigenvalue nearest the previous-scale
  // value instead of failing.
  bool nearest_fallback = true;
};

// E_m(theta) on demand: E_0 = v, and E_k is the Schur root for B_k centred
// at E_{k-1} with window radius 10 delta_{k-1}.
class RellichEngine {
 public:
  RellichEngine(ModelPtr model, ScaleSchedule schedule, BlockHierarchy hierarchy, RellichOptions options = {});

  RellichPoint evaluate(int m, double theta, Side side = Side::Right) const;
  double value(int m, double theta, Side side = Side::Right) const { return evaluate(m, theta, side).value; }

  int max_scale() const { return hierarchy_.top(); }
  const Model& model() const { return *model_; }
  const ModelPtr& model_ptr() const { return model_; }
  const ScaleSchedule& schedule() const { return schedule_; }
  const BlockHierarchy& hierarchy() const { return hierarchy_; }

 private:
  ModelPtr model_;
  ScaleSchedule schedule_;
  BlockHierarchy hierarchy_;
  RellichOptions options_;
};

// Sorted frac(b - x.omega) over potential breakpoints b and x in block.
struct Discontinuity {
  double beta = 0.0;
  Point site;
};
std::vector<Discontinuity> discontinuities(const Model& model, const LatticeSet& block);

struct GridOptions {
  std::size_t samples = 4096;
  double offset = 1e-9;      // bounded potentials: beta - 2h, beta - h, beta, beta + h
  double pole_margin = 1e-8;  // unbounded: samples within this of beta are dropped
};

// Uniform samples j/samples in [0,1) plus the offsets around every beta.
std::vector<double> make_theta_grid(const Model& model, const LatticeSet& block, const GridOptions& options = {});

struct BranchFamily {
  LatticeSet block{1};
  std::vector<double> theta_grid;
  std::vector<linalg::Vector> lambdas;  // sorted eigenvalues per sample
};

BranchFamily branch_family(const LatticeSet& block, const std::vector<double>& theta_grid, const ModelPtr& model,
                           Exec exec = Exec::Parallel);

struct JumpRecord {
  double beta = 0.0;
  Point site;
  bool interior = true;  // beta != 0
  double right_value = 0.0;
  double left_assembled = 0.0;    // E at beta with all diagonals on the left side
  double left_extrapolated = 0.0;  // 2 E(beta - h) - E(beta - 2h)
  double left_agreement = 0.0;
  double jump = 0.0;               // right_value - left_extrapolated
  bool in_regime = true;
};

struct RellichCurve {
  int scale_n = 0;
  LatticeSet block{1};
  GridOptions grid_options;
  std::vector<double> theta_grid;
  std::vector<RellichPoint> samples;
  std::vector<double> values;
  std::vector<Discontinuity> discontinuities;
  std::vector<JumpRecord> jumps;  // bounded potentials only
  Boundedness boundedness = Boundedness::BLM;
  double lipschitz = 1.0;

  long out_of_regime_count() const;
  long step_budget_failures() const;
};

RellichCurve construct_curve(int n, const std::vector<double>& theta_grid, const RellichEngine& engine,
                             const GridOptions& grid_options = {}, Exec exec = Exec::Parallel);

struct IntervalQuotient {
  double alpha_begin = 0.0, alpha_end = 1.0;
  long samples = 0;
  double min_quotient = std::numeric_limits<double>::infinity();
  double worst_theta = 0.0;
  long branch_switches = 0;
};

struct MonotonicityReport {
  double L = 1.0;
  double quotient_slack = 1e-6;
  double min_spacing = 1e-7;
  std::vector<IntervalQuotient> intervals;
  double min_quotient = std::numeric_limits<double>::infinity();
  bool quotient_ok = true;
  bool grid_ok = true;  // every interval holds at least two usable samples
  double min_jump = std::numeric_limits<double>::infinity();
  bool jumps_ok = true;
  bool composite_ok = true;
  long branch_switches = 0;
  double max_branch_distance = 0.0;
  std::string first_violation;
};

// Difference quotients pair each sample with the next one in its interval at
// least min_spacing away, so the +-1e-9 offsets are not divided by rounding noise.
MonotonicityReport audit_monotonicity(const RellichCurve& curve, double L, double quotient_slack = 1e-6,
                                      double min_spacing = 1e-7);

struct PairCheck {
  long pairs = 0;
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_theta1 = 0.0, worst_theta2 = 0.0;
  bool ok() const { return violations == 0; }
};

// E(t2) - E(t1) >= L (t2 - t1) - slack for random 0 <= t1 < t2 < 1.
PairCheck lipschitz_pair_check(const RellichEngine& engine, int m, double L, long pairs, std::uint64_t seed,
                               double slack, Exec exec = Exec::Parallel);

struct ContinuityRecord {
  double beta = 0.0;
  Point site;
  double left_limit = 0.0, right_limit = 0.0;
  double discrepancy = 0.0;
  double cone_distance = 0.0;  // distance of the limit to Spec(H_{B minus x}(beta))
};

struct UblmReport {
  double cont_tol = 0.0;  // 10 * pole_margin * L
  std::vector<ContinuityRecord> records;
  double max_discrepancy = 0.0;
  double max_cone_distance = 0.0;
  bool ok = true;
};

UblmReport ublm_continuity_check(const RellichCurve& curve, const RellichEngine& engine);

}  // namespace mslab
