#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "mslab/error.hpp"
#include "mslab/localization.hpp"
#include "oracles.hpp"

using namespace mslab;
using linalg::Complex;

namespace {

ModelPtr saw(int d, double eps) { return make_model(d, eps, Potential::sawtooth(), Frequency::golden(d)); }

bool throws_code(auto&& f, ErrorCode want) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == want;
  }
  return false;
}

}  // namespace

TEST(FitDecay, RecoversSyntheticExponential) {
  std::vector<double> dist, mag;
  for (int r = 0; r <= 40; ++r) {
    for (int copies = 0; copies < 2; ++copies) {
      dist.push_back(r);
      mag.push_back(3.0 * std::exp(-2.0 * r));
    }
  }
  const auto f = fit_decay(dist, mag, {.floor = 1e-300, .near_fraction = 0.1});
  EXPECT_NEAR(f.rate, 2.0, 1e-10);
  EXPECT_NEAR(f.prefactor, 3.0, 1e-8);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.samples_used + f.near_excluded, 82);
  EXPECT_EQ(f.near_excluded, 8);
}

TEST(FitDecay, FloorDropsTinyMagnitudes) {
  std::vector<double> dist, mag;
  for (int r = 0; r <= 40; ++r) {
    dist.push_back(r);
    mag.push_back(std::exp(-r));
  }
  const auto f = fit_decay(dist, mag);
  // e^{-r} > 1e-14 for r <= 32.
  EXPECT_EQ(f.samples_used + f.near_excluded, 33);
  EXPECT_NEAR(f.rate, 1.0, 1e-10);
}

TEST(FitDecay, TooFewSamples) {
  EXPECT_TRUE(throws_code([] { (void)fit_decay({0, 1, 2}, {1, 0.5, 0.25}); }, ErrorCode::InsufficientDecaySamples));
  EXPECT_TRUE(throws_code([] { (void)fit_decay({0, 1, 2, 3, 4}, {1, 1e-20, 1e-20, 1e-20, 1e-20}); },
                          ErrorCode::InsufficientDecaySamples));
}

TEST(DecayProfile, ExplicitVectorOnBox) {
  for (int d = 1; d <= 2; ++d) {
    const LatticeSet box = cube(d == 1 ? 30 : 10, d);
    Point c(d);
    c[0] = 2;
    linalg::Vector psi(static_cast<long>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) psi(static_cast<long>(i)) = -1.5 * std::exp(-0.7 * oracle::l1(box[i], c));
    const auto f = decay_profile(psi, box, c);
    EXPECT_NEAR(f.rate, 0.7, 1e-10);
    EXPECT_NEAR(f.prefactor, 1.5, 1e-9);
  }
}

TEST(EigenSystem, ResidualOrthonormalityAndOrder) {
  for (int d = 1; d <= 3; ++d) {
    const auto sys = diagonalize(cube(d == 3 ? 2 : 6, d), 0.37, saw(d, 0.2));
    const auto c = check_eigensystem(sys);
    EXPECT_TRUE(c.ok()) << c.orthonormality << " " << c.residual;
    for (long s = 1; s < sys.size(); ++s) EXPECT_LE(sys.values(s - 1), sys.values(s));
  }
}

TEST(EigenSystem, PeriodicInTheta) {
  const auto m = saw(2, 0.1);
  const auto a = diagonalize(cube(3, 2), 0.21, m);
  const auto b = diagonalize(cube(3, 2), 1.21, m);
  EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EigenSystem, ZeroHoppingCentresCarryTheirDiagonal) {
  const auto m = saw(1, 0.0);
  const auto sys = diagonalize(cube(10, 1), 0.42, m);
  for (long s = 0; s < sys.size(); ++s) {
    const double phase = reduce_phase(0.42 + m->freq.dot(sys.centre(s)));
    EXPECT_NEAR(sys.values(s), phase, 1e-14);
  }
}

TEST(DecayProfiles, SmallHoppingLocalizes) {
  const auto sys = diagonalize(cube(40, 1), 0.13, saw(1, 0.01));
  const auto rows = decay_profiles(sys);
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(sys.size()));
  std::vector<double> rates;
  for (const auto& r : rows)
    if (r.fitted) rates.push_back(r.fit.rate);
  ASSERT_GT(rates.size(), rows.size() / 2);
  std::nth_element(rates.begin(), rates.begin() + static_cast<long>(rates.size() / 2), rates.end());
  EXPECT_GT(rates[rates.size() / 2], 2.0);
}

TEST(Poisson, EigenvectorSatisfiesIdentity) {
  const auto m = saw(1, 0.1);
  const auto sys = diagonalize(cube(20, 1), 0.61, m);
  const LatticeSet U = cube(5, 1).translated(Point{3});
  for (long s : {0L, 10L, 20L, 40L}) {
    const linalg::Vector psi = sys.vectors.col(s);
    for (const auto& x : U) EXPECT_LE(poisson_residual(sys.op, psi, sys.values(s), U, x), 1e-9);
  }
}

TEST(Poisson, GenericVectorDoesNot) {
  const auto m = saw(1, 0.1);
  const auto sys = diagonalize(cube(20, 1), 0.61, m);
  const LatticeSet U = cube(5, 1);
  const linalg::Vector psi = linalg::Vector::Ones(sys.size());
  EXPECT_GT(poisson_residual(sys.op, psi, 0.3, U, Point{0}), 1e-3);
}

TEST(Poisson, MatchesExplicitBoundarySum) {
  const auto m = saw(2, 0.15);
  const auto sys = diagonalize(cube(3, 2), 0.2, m);
  const LatticeSet U = cube(1, 2);
  const double E = sys.values(7);
  const linalg::Vector psi = sys.vectors.col(7);
  const auto h = oracle::hamiltonian(U, 0.2, 0.15, m->freq.omega, &oracle::sawtooth);
  const long n = static_cast<long>(U.size());
  linalg::Matrix A(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) A(i, j) = (i == j ? E : 0.0) - h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  const linalg::Matrix G = A.inverse();
  for (std::size_t i = 0; i < U.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < U.size(); ++j)
      for (const auto& nb : oracle::ball_scan(1, U[j]))
        if (oracle::l1(nb, U[j]) == 1 && !U.contains(nb))
          sum += G(static_cast<long>(i), static_cast<long>(j)) * psi(sys.op.index(nb));
    const double want = std::abs(psi(sys.op.index(U[i])) - 0.15 * sum);
    EXPECT_NEAR(poisson_residual(sys.op, psi, E, U, U[i]), want, 1e-12);
    EXPECT_LE(want, 1e-10);
  }
}

TEST(Poisson, WholeDomainRejected) {
  const auto sys = diagonalize(cube(3, 1), 0.2, saw(1, 0.1));
  EXPECT_TRUE(throws_code([&] { (void)poisson_residual(sys.op, sys.vectors.col(0), sys.values(0), cube(3, 1), Point{0}); },
                          ErrorCode::DegenerateSubset));
  EXPECT_THROW((void)poisson_residual(sys.op, sys.vectors.col(0), sys.values(0), cube(1, 1), Point{3}), Error);
}

TEST(Propagator, IdentityAtTimeZero) {
  const auto sys = diagonalize(cube(5, 1), 0.3, saw(1, 0.2));
  const auto row = propagator_row(sys, Point{2}, 0.0);
  for (long i = 0; i < row.size(); ++i) EXPECT_EQ(row(i), Complex(i == sys.op.index(Point{2}) ? 1.0 : 0.0));
  const auto k = edl_kernel(sys, Point{2}, Point{-1}, {0.0});
  EXPECT_EQ(k.sup_sampled, 0.0);
  const auto kk = edl_kernel(sys, Point{2}, Point{2}, {0.0});
  EXPECT_EQ(kk.sup_sampled, 1.0);
}

TEST(Propagator, TwoSiteClosedForm) {
  const auto m = saw(1, 0.3);
  const LatticeSet box(1, {Point{0}, Point{1}});
  const auto sys = diagonalize(box, 0.1, m);
  const double a = sys.op.matrix()(0, 0), b = sys.op.matrix()(1, 1), e = sys.op.matrix()(0, 1);
  const double c = 0.5 * (a + b), r = std::hypot(0.5 * (a - b), e);
  for (double t : {0.3, 1.0, 7.5, 100.0}) {
    const Complex ph = std::polar(1.0, t * c);
    const Complex u00 = ph * (std::cos(t * r) + Complex(0, 1) * std::sin(t * r) / r * (a - c));
    const Complex u10 = ph * (Complex(0, 1) * std::sin(t * r) / r * e);
    const auto row = propagator_row(sys, Point{0}, t);
    EXPECT_NEAR(std::abs(row(0) - u00), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(row(1) - u10), 0.0, 1e-12);
  }
}

TEST(Propagator, Unitary) {
  const auto sys = diagonalize(cube(3, 2), 0.3, saw(2, 0.25));
  for (double t : {0.5, 3.0, 1e3}) EXPECT_NEAR(propagator_row(sys, Point{1, -1}, t).norm(), 1.0, 1e-12);
}

TEST(EdlKernel, BoundedBySpectralSums) {
  const auto sys = diagonalize(cube(30, 1), 0.77, saw(1, 0.05));
  const auto ts = log_spaced_times(0.1, 1e4, 64);
  for (long y : {0L, 1L, 3L, 8L, 20L}) {
    const auto k = edl_kernel(sys, Point{0}, Point{y}, ts);
    EXPECT_EQ(k.distance, y);
    EXPECT_LE(k.sup_sampled, k.abs_sum + 1e-12);
    EXPECT_LE(k.abs_sum, k.spectral_bound + 1e-12);
    EXPECT_LE(k.worst_pointwise, 1e-12);
  }
  const auto table = edl_table(sys, {{Point{0}, Point{1}}, {Point{-3}, Point{4}}}, ts);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[1].distance, 7);
}

TEST(LogSpacedTimes, EndpointsAndRatios) {
  const auto t = log_spaced_times(0.01, 100.0, 5);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t.front(), 0.01);
  EXPECT_DOUBLE_EQ(t.back(), 100.0);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i] / t[i - 1], 10.0, 1e-12);
  EXPECT_THROW((void)log_spaced_times(0.0, 1.0, 4), Error);
}

TEST(Annulus, FirstScaleProbeIsConsistent) {
  const auto m = saw(1, 1e-3);
  const auto s = build_schedule_practical(1e-3, 4, 0.01, 2);
  const RellichEngine e(m, s, BlockHierarchy::cubes(s, 1));
  const double theta = 0.3;
  const auto r = annulus_probe(1, theta, Complex(e.value(1, theta)), e);
  EXPECT_EQ(r.base, set_difference(cube(98 * 16, 1), cube(80 * 4, 1)));
  EXPECT_TRUE(r.base.subset_of(r.annulus));
  EXPECT_EQ(r.window_clear, r.window_resonances.empty());
  EXPECT_TRUE(r.centre_resonant);
  if (!r.separation_ok) {
    EXPECT_FALSE(r.regularize_ok);
    EXPECT_EQ(r.annulus, r.base);
  }
  if (r.window_clear) EXPECT_TRUE(r.goodness.nonresonant);
}

TEST(Annulus, ScaleRangeChecked) {
  const auto m = saw(1, 1e-3);
  const auto s = build_schedule_practical(1e-3, 4, 0.01, 1);
  const RellichEngine e(m, s, BlockHierarchy::cubes(s, 1));
  EXPECT_THROW((void)annulus_probe(0, 0.3, Complex(0.3), e), Error);
  EXPECT_THROW((void)annulus_probe(2, 0.3, Complex(0.3), e), Error);
}

TEST(DecayProfile, PlantedRatesRecovered) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> rate(0.1, 3.0);
  std::uniform_int_distribution<long> off(-20, 20);
  const LatticeSet box = cube(60, 1);
  for (int i = 0; i < 100; ++i) {
    const double rho = rate(rng);
    const Point c{off(rng)};
    linalg::Vector psi(static_cast<long>(box.size()));
    for (std::size_t k = 0; k < box.size(); ++k) psi(static_cast<long>(k)) = std::exp(-rho * oracle::l1(box[k], c));
    psi /= psi.norm();
    EXPECT_NEAR(decay_profile(psi, box, c).rate, rho, 1e-6);
  }
}

TEST(DecayProfile, ZeroHoppingHasNoTail) {
  const auto sys = diagonalize(cube(10, 1), 0.3, saw(1, 0.0));
  EXPECT_TRUE(throws_code([&] { (void)decay_profile(sys, 0); }, ErrorCode::InsufficientDecaySamples));
  const auto rows = decay_profiles(sys);
  for (const auto& r : rows) EXPECT_FALSE(r.fitted);
}

TEST(EigenSystem, CentreCovariance) {
  const auto m = saw(2, 0.2);
  const Point x0{3, -2};
  const double th = 0.17;
  const auto a = diagonalize(cube(3, 2), th, m);
  const auto b = diagonalize(cube(3, x0), th - m->freq.dot(x0), m);
  EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Poisson, ZeroHoppingOffSupportVector) {
  const auto sys = diagonalize(cube(6, 1), 0.3, saw(1, 0.0));
  const LatticeSet U = cube(2, 1);
  linalg::Vector psi = linalg::Vector::Zero(sys.size());
  psi(sys.op.index(Point{5})) = 1.0;
  for (const auto& x : U) EXPECT_EQ(poisson_residual(sys.op, psi, 0.123, U, x), 0.0);
}

TEST(EdlKernel, ZeroHoppingIsKronecker) {
  const auto sys = diagonalize(cube(8, 1), 0.3, saw(1, 0.0));
  const auto ts = log_spaced_times(1e-2, 1e6, 32);
  EXPECT_NEAR(edl_kernel(sys, Point{1}, Point{1}, ts).sup_sampled, 1.0, 1e-15);
  EXPECT_EQ(edl_kernel(sys, Point{1}, Point{2}, ts).sup_sampled, 0.0);
  EXPECT_EQ(edl_kernel(sys, Point{1}, Point{2}, ts).spectral_bound, 0.0);
}
