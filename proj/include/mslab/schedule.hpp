#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mslab/lattice.hpp"

namespace mslab {

enum class Regime { Theoretical, Practical };
std::string to_string(Regime r);

struct ScaleSchedule {
  Regime regime = Regime::Practical;
  double epsilon = 0.0;
  double epsilon0 = 0.0;
  double delta0 = 0.0;
  int N = 1;
  std::vector<std::uint64_t> l;   // l[n-1] = l_n, n = 1..N
  std::vector<double> delta;      // delta[n] = delta_n, n = 0..N
  std::vector<double> gamma;      // gamma[n] = gamma_n, n = 0..N
  double gamma_inf = 0.0;
  std::vector<double> tolerance_budget;  // sum_{k<=m} delta_k, m = 0..N

  bool rate_ok = false;              // gamma_inf >= gamma_0 / 2 >= 10
  bool lengths_increasing = false;
  bool delta_decreasing = false;
  bool gamma_nonincreasing = false;

  // l_n for any n >= 1 (beyond N by the same recurrence); overflow throws.
  std::uint64_t length(int n) const;
  double delta_at(int n) const;  // any n >= 0
  double gamma_at(int n) const;  // any n >= 0
  // e^{-l_{m-1}} with e^{-l_0} read as epsilon.
  double step_budget(int m) const;
};

ScaleSchedule build_schedule_theoretical(double epsilon, double epsilon0, int N);
ScaleSchedule build_schedule_practical(double epsilon, std::uint64_t l1, double delta0, int N);

// Shared recurrences, exposed so tests can recompute them independently of
// the stored tables.
std::uint64_t schedule_length(std::uint64_t l1, int n);
double schedule_delta(std::uint64_t ln);
double schedule_gamma_factor(std::uint64_t lk);

struct HierarchyLogEntry {
  int scale = 0;
  bool extended = false;     // true when built by the extension cascade
  bool premise_ok = true;    // separation premises of every extension step
  std::string note;
  std::vector<Point> inflating_points;
};

struct BlockHierarchy {
  std::vector<LatticeSet> blocks;  // B_0 = {o}, ..., B_N
  std::vector<HierarchyLogEntry> log;

  int top() const { return static_cast<int>(blocks.size()) - 1; }
  const LatticeSet& block(int m) const;
  // B_m + p
  LatticeSet block_at(int m, const Point& p) const { return block(m).translated(p); }

  // B_0 = {o} and B_m = Q_{l_m}.
  static BlockHierarchy cubes(const ScaleSchedule& schedule, int dim);
};

// Q_{l_m} within B_m within Q_{l_m + 50 l_{m-1}} for m >= 1 (l_0 := 0).
bool sandwich_holds(const BlockHierarchy& h, const ScaleSchedule& schedule, int m);

}  // namespace mslab
