#include <gtest/gtest.h>

#include <cstring>
#include <omp.h>

#include "mslab/localization.hpp"
#include "mslab/msa.hpp"
#include "mslab/rellich.hpp"

using namespace mslab;
using linalg::Complex;

namespace {

ModelPtr saw(int d, double eps) { return make_model(d, eps, Potential::sawtooth(), Frequency::golden(d)); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const linalg::Vector& a, const linalg::Vector& b) {
  if (a.size() != b.size()) return false;
  for (long i = 0; i < a.size(); ++i)
    if (!same_bits(a(i), b(i))) return false;
  return true;
}

class ParallelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(4);
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

RellichEngine engine(double eps) {
  const auto m = saw(1, eps);
  const auto s = build_schedule_practical(eps, 4, 0.01, 2);
  return RellichEngine(m, s, BlockHierarchy::cubes(s, 1));
}

}  // namespace

TEST_F(ParallelEquivalence, BranchFamily) {
  const auto m = saw(2, 0.1);
  std::vector<double> grid;
  for (int j = 0; j < 64; ++j) grid.push_back(j / 64.0);
  const auto a = branch_family(cube(2, 2), grid, m, Exec::Serial);
  const auto b = branch_family(cube(2, 2), grid, m, Exec::Parallel);
  ASSERT_EQ(a.lambdas.size(), b.lambdas.size());
  for (std::size_t i = 0; i < a.lambdas.size(); ++i) EXPECT_TRUE(same_bits(a.lambdas[i], b.lambdas[i]));
}

TEST_F(ParallelEquivalence, RellichCurve) {
  const auto e = engine(1e-3);
  GridOptions g;
  g.samples = 256;
  const auto grid = make_theta_grid(e.model(), e.hierarchy().block(1), g);
  const auto a = construct_curve(1, grid, e, g, Exec::Serial);
  const auto b = construct_curve(1, grid, e, g, Exec::Parallel);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_TRUE(same_bits(a.values[i], b.values[i]));
  ASSERT_EQ(a.jumps.size(), b.jumps.size());
  for (std::size_t i = 0; i < a.jumps.size(); ++i) EXPECT_TRUE(same_bits(a.jumps[i].jump, b.jumps[i].jump));
}

TEST_F(ParallelEquivalence, LipschitzPairs) {
  const auto e = engine(1e-3);
  const auto a = lipschitz_pair_check(e, 1, 1.0, 500, 7, 1e-6, Exec::Serial);
  const auto b = lipschitz_pair_check(e, 1, 1.0, 500, 7, 1e-6, Exec::Parallel);
  EXPECT_EQ(a.violations, b.violations);
  EXPECT_TRUE(same_bits(a.worst_margin, b.worst_margin));
}

TEST_F(ParallelEquivalence, ResonanceScanAndNesting) {
  const auto e = engine(1e-3);
  const auto a = resonant_scan(e, 1, 0.3, Side::Right, Complex(0.31), cube(200, 1), Exec::Serial);
  const auto b = resonant_scan(e, 1, 0.3, Side::Right, Complex(0.31), cube(200, 1), Exec::Parallel);
  EXPECT_EQ(a.resonant, b.resonant);
  EXPECT_EQ(a.out_of_regime, b.out_of_regime);
  std::vector<double> th;
  for (int j = 0; j < 100; ++j) th.push_back((j + 0.5) / 100.0);
  const auto na = nesting_check(e, 2, th, Exec::Serial);
  const auto nb = nesting_check(e, 2, th, Exec::Parallel);
  EXPECT_EQ(na.violations, nb.violations);
  EXPECT_TRUE(same_bits(na.worst_excess, nb.worst_excess));
  EXPECT_TRUE(same_bits(na.worst_theta, nb.worst_theta));
}

TEST_F(ParallelEquivalence, ProbeFamilies) {
  const auto e = engine(1e-3);
  ProbeOptions po;
  po.theta_samples = 16;
  const auto fa = probe_families(e, 1, po, Exec::Serial);
  const auto fb = probe_families(e, 1, po, Exec::Parallel);
  ASSERT_EQ(fa.centres.size(), fb.centres.size());
  for (std::size_t i = 0; i < fa.centres.size(); ++i) {
    EXPECT_TRUE(same_bits(fa.centres[i].lo, fb.centres[i].lo));
    EXPECT_TRUE(same_bits(fa.centres[i].hi, fb.centres[i].hi));
  }
  EXPECT_EQ(probe_resonances(e, fa, 0, cube(40, 1), Exec::Serial), probe_resonances(e, fb, 0, cube(40, 1), Exec::Parallel));
}

TEST_F(ParallelEquivalence, DecayProfilesAndEdl) {
  const auto sys = diagonalize(cube(60, 1), 0.3, saw(1, 0.05));
  const auto ra = decay_profiles(sys, {}, Exec::Serial);
  const auto rb = decay_profiles(sys, {}, Exec::Parallel);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].fitted, rb[i].fitted);
    EXPECT_TRUE(same_bits(ra[i].fit.rate, rb[i].fit.rate));
    EXPECT_TRUE(same_bits(ra[i].fit.prefactor, rb[i].fit.prefactor));
  }
  std::vector<std::pair<Point, Point>> pairs;
  for (long k = 0; k < 20; ++k) pairs.emplace_back(Point{-k}, Point{k});
  const auto ts = log_spaced_times(1e-2, 1e4, 16);
  const auto ea = edl_table(sys, pairs, ts, Exec::Serial);
  const auto eb = edl_table(sys, pairs, ts, Exec::Parallel);
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    EXPECT_TRUE(same_bits(ea[i].sup_sampled, eb[i].sup_sampled));
    EXPECT_TRUE(same_bits(ea[i].spectral_bound, eb[i].spectral_bound));
  }
}

TEST_F(ParallelEquivalence, LowestIndexExceptionWins) {
  for (Exec ex : {Exec::Serial, Exec::Parallel}) {
    try {
      for_each_index(64, ex, [](std::size_t i) {
        if (i == 5 || i == 40) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "5");
    }
  }
}
