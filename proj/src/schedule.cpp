#include "mslab/schedule.hpp"

#include <cmath>
#include <limits>

#include "mslab/error.hpp"
#include "mslab/operator.hpp"

namespace mslab {

std::string to_string(Regime r) { return r == Regime::Theoretical ? "theoretical" : "practical"; }

std::uint64_t schedule_length(std::uint64_t l1, int n) {
  if (n < 1) fail(ErrorCode::Domain, "scale lengths start at n = 1");
  std::uint64_t l = l1;
  for (int k = 1; k < n; ++k) {
    if (l > std::numeric_limits<std::uint32_t>::max())
      fail(ErrorCode::DegenerateSchedule, "scale length l_" + std::to_string(k + 1) + " overflows 64 bits");
    l = l * l;
  }
  return l;
}

double schedule_delta(std::uint64_t ln) { return std::exp(-std::pow(static_cast<double>(ln), 2.0 / 3.0)); }

double schedule_gamma_factor(std::uint64_t lk) { return 1.0 - std::pow(static_cast<double>(lk), -1.0 / 80.0); }

namespace {

ScaleSchedule finish(ScaleSchedule s, std::uint64_t l1) {
  if (s.N < 1) fail(ErrorCode::Domain, "schedule depth N must be >= 1");
  s.l.clear();
  for (int n = 1; n <= s.N; ++n) s.l.push_back(schedule_length(l1, n));
  s.delta = {s.delta0};
  for (int n = 1; n <= s.N; ++n) s.delta.push_back(schedule_delta(s.l[static_cast<std::size_t>(n - 1)]));
  s.gamma = {gamma0(s.epsilon)};
  for (int n = 1; n <= s.N; ++n)
    s.gamma.push_back(s.gamma.back() * schedule_gamma_factor(s.l[static_cast<std::size_t>(n - 1)]));

  // gamma_inf: factors approach 1 doubly exponentially; stop once they are 1
  // in double precision. log l_k = 2^{k-1} log l_1.
  double prod = 1.0;
  const double log_l1 = std::log(static_cast<double>(l1));
  for (int k = 1; k < 64; ++k) {
    const double expo = std::ldexp(log_l1, k - 1) / 80.0;
    const double term = std::exp(-expo);
    if (term < 1e-17) break;
    prod *= 1.0 - term;
  }
  s.gamma_inf = s.gamma[0] * prod;
  s.rate_ok = s.gamma_inf >= 0.5 * s.gamma[0] && 0.5 * s.gamma[0] >= 10.0;

  s.tolerance_budget.clear();
  double acc = 0.0;
  for (double d : s.delta) s.tolerance_budget.push_back(acc += d);

  s.lengths_increasing = true;
  for (std::size_t i = 1; i < s.l.size(); ++i) s.lengths_increasing &= s.l[i] > s.l[i - 1];
  s.delta_decreasing = true;
  for (std::size_t i = 1; i < s.delta.size(); ++i) s.delta_decreasing &= s.delta[i] < s.delta[i - 1];
  s.gamma_nonincreasing = true;
  for (std::size_t i = 1; i < s.gamma.size(); ++i) s.gamma_nonincreasing &= s.gamma[i] <= s.gamma[i - 1];
  return s;
}

}  // namespace

ScaleSchedule build_schedule_theoretical(double epsilon, double epsilon0, int N) {
  if (!(epsilon >= 0.0)) fail(ErrorCode::Domain, "epsilon must be >= 0");
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) fail(ErrorCode::Domain, "epsilon0 must lie in (0,1)");
  ScaleSchedule s;
  s.regime = Regime::Theoretical;
  s.epsilon = epsilon;
  s.epsilon0 = epsilon0;
  s.N = N;
  s.delta0 = std::pow(epsilon0, 1.0 / 20.0);
  const double q = std::pow(std::abs(std::log(s.delta0)), 4.0);
  // floor with a relative slack of 1e-9.
  const double l1 = std::floor(q + 1e-9 * std::max(1.0, q));
  if (l1 < 2.0)
    fail(ErrorCode::DegenerateSchedule, "l_1 = floor(|ln delta_0|^4) = " + std::to_string(l1) + " < 2");
  return finish(s, static_cast<std::uint64_t>(l1));
}

ScaleSchedule build_schedule_practical(double epsilon, std::uint64_t l1, double delta0, int N) {
  if (!(epsilon >= 0.0)) fail(ErrorCode::Domain, "epsilon must be >= 0");
  if (l1 < 2) fail(ErrorCode::Domain, "practical schedule needs l_1 >= 2");
  if (!(delta0 > 0.0 && delta0 < 1.0)) fail(ErrorCode::Domain, "practical schedule needs 0 < delta_0 < 1");
  ScaleSchedule s;
  s.regime = Regime::Practical;
  s.epsilon = epsilon;
  s.delta0 = delta0;
  s.epsilon0 = std::pow(delta0, 20.0);
  s.N = N;
  return finish(s, l1);
}

std::uint64_t ScaleSchedule::length(int n) const {
  if (n >= 1 && n <= N) return l[static_cast<std::size_t>(n - 1)];
  return schedule_length(l.front(), n);
}

double ScaleSchedule::delta_at(int n) const {
  if (n < 0) fail(ErrorCode::Domain, "negative scale");
  if (n <= N) return delta[static_cast<std::size_t>(n)];
  return schedule_delta(length(n));
}

double ScaleSchedule::gamma_at(int n) const {
  if (n < 0) fail(ErrorCode::Domain, "negative scale");
  if (n <= N) return gamma[static_cast<std::size_t>(n)];
  double g = gamma.back();
  for (int k = N + 1; k <= n; ++k) g *= schedule_gamma_factor(length(k));
  return g;
}

double ScaleSchedule::step_budget(int m) const {
  if (m < 1) fail(ErrorCode::Domain, "step budget is defined for m >= 1");
  if (m == 1) return epsilon;
  return std::exp(-static_cast<double>(length(m - 1)));
}

const LatticeSet& BlockHierarchy::block(int m) const {
  if (m < 0 || m > top()) fail(ErrorCode::Domain, "block B_" + std::to_string(m) + " is not in the hierarchy");
  return blocks[static_cast<std::size_t>(m)];
}

BlockHierarchy BlockHierarchy::cubes(const ScaleSchedule& schedule, int dim) {
  BlockHierarchy h;
  h.blocks.push_back(cube(0, dim));
  h.log.push_back({0, false, true, "origin", {}});
  for (int m = 1; m <= schedule.N; ++m) {
    h.blocks.push_back(cube(static_cast<long>(schedule.length(m)), dim));
    h.log.push_back({m, false, true, "cube of radius l_m", {}});
  }
  return h;
}

bool sandwich_holds(const BlockHierarchy& h, const ScaleSchedule& schedule, int m) {
  if (m < 1) return true;
  const int d = h.block(m).dim();
  const long lm = static_cast<long>(schedule.length(m));
  const long lprev = m >= 2 ? static_cast<long>(schedule.length(m - 1)) : 0;
  if (!cube(lm, d).subset_of(h.block(m))) return false;
  for (const auto& p : h.block(m))
    if (p.norm1() > lm + 50 * lprev) return false;
  return true;
}

}  // namespace mslab
