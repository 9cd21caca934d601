#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mslab/exec.hpp"
#include "mslab/rellich.hpp"

namespace mslab {

// S_m(theta, E) within a search region: |E_m(theta + p.omega) - E| < delta_m.
// Poles of an unbounded potential at m = 0 are listed separately (the value
// there is infinite, so such a p never belongs to S_0).
struct ResonanceScan {
  LatticeSet resonant{1};
  std::vector<Point> poles;
  std::vector<Point> out_of_regime;  // E_m evaluated through the nearest-eigenvalue fallback
};

ResonanceScan resonant_scan(const RellichEngine& engine, int m, double theta, Side side, linalg::Complex E,
                            const LatticeSet& search, Exec exec = Exec::Parallel);
LatticeSet resonant_set(const RellichEngine& engine, int m, double theta, Side side, linalg::Complex E,
                        const LatticeSet& search, Exec exec = Exec::Parallel);

// (k, region) -> S_k restricted to region. Tests substitute synthetic sets.
using ResonanceOracle = std::function<LatticeSet(int k, const LatticeSet& region)>;
ResonanceOracle engine_oracle(const RellichEngine& engine, double theta, Side side, linalg::Complex E,
                              Exec exec = Exec::Parallel);

struct SeparationReport {
  double min_distance = std::numeric_limits<double>::infinity();
  double required = 0.0;
  Point closest_a, closest_b;
  bool holds = true;
};

SeparationReport min_separation(const LatticeSet& S, double required);
// Against 100 l_{m+1}.
SeparationReport separation_check(const LatticeSet& S, int m, const ScaleSchedule& schedule);

// B u U{Q_L + x : x in X, (Q_L + x) meets B}. Points of X must be 10L apart.
LatticeSet extend_set(const LatticeSet& B, const LatticeSet& X, long L);

// Both extension bullets, checked by enumeration.
struct ExtensionCheck {
  bool contains_B = true;
  bool within_2L = true;
  bool closed = true;  // x in X with (Q_L + x) meeting Bt has Q_L + x inside Bt
  std::vector<Point> witnesses;
  bool ok() const { return contains_B && within_2L && closed; }
};
ExtensionCheck check_extension(const LatticeSet& B, const LatticeSet& X, long L, const LatticeSet& Bt);

struct BlockBuild {
  LatticeSet block{1};
  std::vector<Point> inflating_points;
  bool sandwich_ok = true;
};

// Q_{l_{n+1}} extended by (10 l_{n-k}, X_{n-k-1}) for k = 0..n-1; the oracle
// is queried on Q_{2 l_{n+1}}.
BlockBuild build_block(int n_plus_1, const ScaleSchedule& schedule, int dim, const ResonanceOracle& X);

struct ProbeOptions {
  std::size_t theta_samples = 64;  // family (theta, E), theta = (j + 1/2) / samples
};

// X_k as the union of S_k over the three families at scale n: E in
// D(E_n(0), 10 delta_n) at theta = 0 and at 1 - 0, and E in
// A_n(theta, 10 delta_n) for probe thetas at both sides. Membership of E_k in
// the delta_k-neighbourhood of A is tested by distance, with no E sampling.
struct ProbeFamilies {
  struct Centre {
    double theta;
    Side side;
    double lo, hi;  // segment of centres [E_n(theta - 0), E_n(theta)] ordered
  };
  std::vector<Centre> centres;
  double radius = 0.0;  // 10 delta_n
  long probe_count() const { return static_cast<long>(centres.size()); }
};

ProbeFamilies probe_families(const RellichEngine& engine, int n, const ProbeOptions& options = {},
                             Exec exec = Exec::Parallel);
LatticeSet probe_resonances(const RellichEngine& engine, const ProbeFamilies& families, int k,
                            const LatticeSet& region, Exec exec = Exec::Parallel);

// B_0..B_N with each B_{n+1} built from the probe resonances of the engine
// on B_0..B_n. A failed separation premise falls back to Q_{l_{n+1}} and is logged.
BlockHierarchy build_hierarchy(const ModelPtr& model, const ScaleSchedule& schedule,
                               const ProbeOptions& probes = {}, Exec exec = Exec::Parallel);

struct RegularityWitness {
  Point p;
  int block_scale = 0;  // B_{block_scale}(p) sticks out
  std::vector<Point> missing;
};

struct GoodnessReport {
  LatticeSet set{1};
  int m = 0;
  double theta = 0.0;
  Side side = Side::Right;
  linalg::Complex E;
  bool nonresonant = true;
  bool regular = true;
  bool good = true;
  std::vector<Point> resonant_points;  // set intersect S_m
  std::vector<RegularityWitness> witnesses;
};

GoodnessReport classify_with(const LatticeSet& set, int m, const BlockHierarchy& hierarchy,
                             const ResonanceOracle& S);
GoodnessReport classify(const LatticeSet& set, int m, double theta, Side side, linalg::Complex E,
                        const RellichEngine& engine, Exec exec = Exec::Parallel);

struct RegularizeResult {
  LatticeSet set{1};
  bool within_30ln = true;
  bool regular = true;
  std::vector<Point> inflating_points;
};

// The cascade B^{(k+1)} = extend(B^{(k)}, S_{n-k-1}, 10 l_{n-k}), k = 0..n-1.
RegularizeResult regularize_with(const LatticeSet& B, int n, const ScaleSchedule& schedule,
                                 const BlockHierarchy& hierarchy, const ResonanceOracle& S);
RegularizeResult regularize(const LatticeSet& B, int n, double theta, Side side, linalg::Complex E,
                            const RellichEngine& engine, Exec exec = Exec::Parallel);

// Smallest superset of B that contains B_{k+1}(p) for every p in S_k, k < n,
// met along the way. Produces small regular sets for Green's function sweeps.
LatticeSet regular_closure(const LatticeSet& B, int n, const BlockHierarchy& hierarchy, const ResonanceOracle& S);

struct GoodsetReport {
  GoodnessReport goodness;
  bool energy_close = false;  // |E - E*| < delta_m / 5
  bool premise_ok = false;
  double norm = 0.0;
  BoundCheck norm_check;   // 10 / delta_m - |G|
  BoundCheck decay_check;  // gamma_m for |x - y|_1 >= l_m^{5/6}
  DecayCheck decay;
  double dist_to_spectrum = 0.0;
};

GoodsetReport verify_goodset_greens(const LatticeSet& set, int m, double theta, Side side, linalg::Complex E,
                                    linalg::Complex E_star, const RellichEngine& engine,
                                    Exec exec = Exec::Parallel);

// Sign of the Schur jump at beta_x together with the nonresonance case split.
struct JumpSignAudit {
  JumpAnalysis analysis;
  double interval_lo = 0.0, interval_hi = 0.0;  // E_n(beta - 0) - 5 delta_n, E_n(beta) + 5 delta_n
  bool z_in_interval = false;
  std::string case_label;  // "nonresonant", "case1" or "case2"
  int resonant_scale = -1;
  Point resonant_point;
  // n = 0: E_0(beta) at least 20 delta_0 from v(0) and v(1 - 0).
  // n >= 1: 5 delta_n + eps + sum_{k=1}^{n-1} e^{-l_k} < delta_0 / 2.
  bool scale_premise = false;
  bool in_regime = false;
};

JumpSignAudit audit_jump_sign(const RellichEngine& engine, int n, const Point& x, double z);

// |E_k(theta) - E_m(theta)| <= delta_k - delta_m for k < m, on both sides.
struct NestingReport {
  bool premise_ok = true;  // delta strictly decreasing up to m
  long samples = 0;
  long violations = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_theta = 0.0;
  bool ok() const { return violations == 0; }
};
NestingReport nesting_check(const RellichEngine& engine, int m, const std::vector<double>& thetas,
                            Exec exec = Exec::Parallel);

// Regularity of B_{n+1} against the probe resonances X_k, k < n.
struct BlockRegularity {
  long probe_count = 0;
  long resonant_points = 0;
  std::vector<RegularityWitness> witnesses;
  bool ok() const { return witnesses.empty(); }
};
BlockRegularity check_block_regularity(const RellichEngine& engine, int n_plus_1, const ProbeOptions& options = {},
                                       Exec exec = Exec::Parallel);

// S_{m+1} within S_m on the given region.
struct ResonanceNesting {
  long checked = 0;
  std::vector<Point> escapes;
  bool ok() const { return escapes.empty(); }
};
ResonanceNesting resonance_nesting(const RellichEngine& engine, int m, double theta, Side side,
                                   linalg::Complex E, const LatticeSet& region, Exec exec = Exec::Parallel);

}  // namespace mslab
