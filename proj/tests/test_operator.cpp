#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mslab/error.hpp"
#include "mslab/operator.hpp"
#include "oracles.hpp"

using namespace mslab;
using linalg::Complex;
using linalg::Matrix;

namespace {

ModelPtr sawtooth_model(int d, double eps) { return make_model(d, eps, Potential::sawtooth(), Frequency::golden(d)); }

bool throws_code(auto&& f, ErrorCode want) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == want;
  }
  return false;
}

// beta_x: the phase where theta + x.omega crosses an integer.
double beta(const Point& x, const Frequency& f) { return reduce_phase(-f.dot(x)); }

}  // namespace

TEST(Assemble, SingleSite) {
  const auto op = assemble(LatticeSet(1, {Point{0}}), 0.3, Side::Right, sawtooth_model(1, 0.0));
  ASSERT_EQ(op.size(), 1);
  EXPECT_EQ(op.matrix()(0, 0), 0.3);
}

TEST(Assemble, TwoSites) {
  const auto m = sawtooth_model(1, 0.1);
  const double theta = 0.2;
  const auto op = assemble(cube(1, Point{0}).without(Point{-1}), theta, Side::Right, m);
  const double w = m->freq.omega[0];
  EXPECT_EQ(op.matrix()(0, 1), 0.1);
  EXPECT_EQ(op.matrix()(1, 0), 0.1);
  EXPECT_DOUBLE_EQ(op.matrix()(0, 0), theta);
  EXPECT_DOUBLE_EQ(op.matrix()(1, 1), oracle::sawtooth(theta + w));
}

TEST(Assemble, MatchesPairScanOracle) {
  for (int d = 1; d <= 3; ++d) {
    const auto m = sawtooth_model(d, 0.07);
    const LatticeSet box = cube(d == 3 ? 2 : 4, d);
    const auto op = assemble(box, 0.123, Side::Right, m);
    const auto h = oracle::hamiltonian(box, 0.123, 0.07, m->freq.omega, &oracle::sawtooth);
    for (long i = 0; i < op.size(); ++i)
      for (long j = 0; j < op.size(); ++j)
        EXPECT_NEAR(op.matrix()(i, j), h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1e-15);
    EXPECT_EQ(op.matrix(), op.matrix().transpose());
  }
}

TEST(Assemble, RankOneJumpAtBeta) {
  std::mt19937_64 rng(4);
  for (int d = 1; d <= 2; ++d) {
    const auto m = sawtooth_model(d, 0.05);
    const LatticeSet B = cube(6, d);
    std::uniform_int_distribution<std::size_t> pick(0, B.size() - 1);
    int done = 0;
    while (done < 100) {
      const Point x = B[pick(rng)];
      if (x.norm1() == 0) continue;
      ++done;
      const double b = beta(x, m->freq);
      const Matrix diff = assemble(B, b, Side::Right, m).matrix() - assemble(B, b, Side::Left, m).matrix();
      Matrix want = Matrix::Zero(diff.rows(), diff.cols());
      const long ix = B.index_of(x);
      want(ix, ix) = -1.0;
      EXPECT_EQ(diff, want) << "x=" << x.str();
    }
  }
}

TEST(Assemble, MarylandPoleRejected) {
  const auto m = make_model(1, 0.1, Potential::maryland(), Frequency::golden(1));
  EXPECT_TRUE(throws_code([&] { (void)assemble(cube(2, 1), 0.0, Side::Right, m); }, ErrorCode::PoleOnLattice));
  const double b = beta(Point{2}, m->freq);
  EXPECT_TRUE(throws_code([&] { (void)assemble(cube(2, 1), b, Side::Right, m); }, ErrorCode::PoleOnLattice));
  EXPECT_NO_THROW((void)assemble(cube(2, 1), 0.37, Side::Right, m));
}

TEST(Spectrum, SingleSite) {
  const auto sp = spectrum(assemble(LatticeSet(1, {Point{0}}), 0.3, Side::Right, sawtooth_model(1, 0.0)));
  EXPECT_EQ(sp.values(0), 0.3);
  EXPECT_EQ(std::abs(sp.vectors(0, 0)), 1.0);
}

TEST(Spectrum, DiagonalWhenHoppingVanishes) {
  const auto op = assemble(cube(5, 2), 0.41, Side::Right, sawtooth_model(2, 0.0));
  std::vector<double> diag;
  for (long i = 0; i < op.size(); ++i) diag.push_back(op.matrix()(i, i));
  std::sort(diag.begin(), diag.end());
  const auto ev = eigenvalues(op);
  for (long i = 0; i < op.size(); ++i) EXPECT_EQ(ev(i), diag[static_cast<std::size_t>(i)]);
}

TEST(Spectrum, TwoByTwoClosedForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng), e = u(rng);
    Matrix H(2, 2);
    H << a, e, e, b;
    const auto ev = eigenvalues(H);
    const auto want = oracle::eig2(a, e, b);
    EXPECT_NEAR(ev(0), want[0], 1e-14);
    EXPECT_NEAR(ev(1), want[1], 1e-14);
  }
}

TEST(Spectrum, ThreeSiteCubicOracle) {
  const auto m = sawtooth_model(1, 0.2);
  const LatticeSet L(1, {Point{0}, Point{1}, Point{2}});
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double th = u(rng);
    const auto ev = eigenvalues(assemble(L, th, Side::Right, m));
    const auto want = oracle::eig3(oracle::hamiltonian(L, th, 0.2, m->freq.omega, &oracle::sawtooth));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(ev(k), want[static_cast<std::size_t>(k)], 1e-12);
  }
}

TEST(Spectrum, ResidualAndOrthonormality) {
  const auto op = assemble(cube(6, 2), 0.77, Side::Right, sawtooth_model(2, 0.15));
  const auto sp = spectrum(op);
  for (long i = 1; i < sp.values.size(); ++i) EXPECT_LE(sp.values(i - 1), sp.values(i));
  const double hn = op.matrix().norm();
  const Matrix r = op.matrix() * sp.vectors - sp.vectors * sp.values.asDiagonal();
  for (long s = 0; s < op.size(); ++s) EXPECT_LE(r.col(s).norm(), 1e-9 * hn);
  const Matrix g = sp.vectors.transpose() * sp.vectors - Matrix::Identity(op.size(), op.size());
  EXPECT_LE(g.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Spectrum, PeriodicInTheta) {
  const auto m = sawtooth_model(1, 0.1);
  const LatticeSet B = cube(5, 1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double th = u(rng);
    const auto a = eigenvalues(assemble(B, th, Side::Right, m));
    const auto b = eigenvalues(assemble(B, th + 1.0, Side::Right, m));
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Spectrum, MinMaxLipschitzInsideContinuityInterval) {
  const auto m = sawtooth_model(2, 0.1);
  const LatticeSet B = cube(3, 2);
  std::vector<double> betas;
  for (const auto& x : B) betas.push_back(beta(x, m->freq));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 300) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    bool split = false;
    for (double p : betas)
      if (p > a && p <= b) split = true;
    if (split) continue;
    ++tested;
    const auto la = eigenvalues(assemble(B, a, Side::Right, m));
    const auto lb = eigenvalues(assemble(B, b, Side::Right, m));
    for (long i = 0; i < la.size(); ++i) EXPECT_GE(lb(i) - la(i), (b - a) - 1e-9);
  }
}

TEST(Greens, SingleSite) {
  const auto op = assemble(LatticeSet(1, {Point{0}}), 0.3, Side::Right, sawtooth_model(1, 0.0));
  const auto g = greens(op, 0.0);
  EXPECT_DOUBLE_EQ(g.entries(0, 0), 1.0 / 0.3);
}

TEST(Greens, NormIsInverseDistance) {
  const auto op = assemble(cube(8, 1), 0.31, Side::Right, sawtooth_model(1, 0.2));
  const auto ev = eigenvalues(op);
  for (double E : {-0.3, 0.05, 0.5, 0.9, 1.4}) {
    const auto g = greens(op, E);
    const double dist = (ev.array() - E).abs().minCoeff();
    EXPECT_NEAR(g.op_norm * dist, 1.0, 1e-8);
    Matrix A = op.matrix();
    A.diagonal().array() -= E;
    const Matrix res = A * g.entries - Matrix::Identity(op.size(), op.size());
    EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-10 * (1.0 + g.op_norm));
  }
}

TEST(Greens, EntriesMatchCofactorOracle) {
  const auto m = sawtooth_model(2, 0.3);
  const LatticeSet L = cube(1, 2).without(Point{0, -1});
  const auto op = assemble(L, 0.6, Side::Right, m);
  const double E = 0.123;
  const auto h = oracle::hamiltonian(L, 0.6, 0.3, m->freq.omega, &oracle::sawtooth);
  oracle::Dense<double> a = h;
  for (std::size_t i = 0; i < a.size(); ++i) a[i][i] -= E;
  const auto adj = oracle::adjugate(a);
  const double det = oracle::det_laplace(a);
  const auto g = greens(op, E);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      EXPECT_NEAR(g.entries(static_cast<long>(i), static_cast<long>(j)), adj[i][j] / det, 1e-12);
}

TEST(Greens, ComplexEnergyResolvent) {
  const auto op = assemble(cube(4, 1), 0.2, Side::Right, sawtooth_model(1, 0.1));
  const Complex z(0.4, 0.05);
  const auto g = greens(op, z);
  linalg::CMatrix A = op.matrix().cast<Complex>();
  A.diagonal().array() -= z;
  EXPECT_LE((A * g.entries - linalg::CMatrix::Identity(op.size(), op.size())).cwiseAbs().maxCoeff(), 1e-12);
  const auto ev = eigenvalues(op);
  double dist = 1e9;
  for (long i = 0; i < ev.size(); ++i) dist = std::min(dist, std::abs(Complex(ev(i)) - z));
  EXPECT_NEAR(g.op_norm * dist, 1.0, 1e-8);
}

TEST(Greens, SingularEnergyRejected) {
  const auto op = assemble(cube(3, 1), 0.2, Side::Right, sawtooth_model(1, 0.1));
  const double lam = eigenvalues(op)(2);
  EXPECT_TRUE(throws_code([&] { (void)greens(op, lam); }, ErrorCode::SingularEnergy));
  const auto diag = assemble(cube(3, 1), 0.2, Side::Right, sawtooth_model(1, 0.0));
  EXPECT_TRUE(throws_code([&] { (void)greens(diag, diag.matrix()(1, 1)); }, ErrorCode::SingularEnergy));
}

TEST(Gamma0, HalfLogEpsilon) {
  EXPECT_DOUBLE_EQ(gamma0(1e-4), 0.5 * std::log(1e4));
  EXPECT_TRUE(std::isinf(gamma0(0.0)));
}

TEST(Nonresonant, DiagonalCaseHoldsTrivially) {
  const auto op = assemble(cube(8, 1), 0.31, Side::Right, sawtooth_model(1, 0.0));
  double E = -0.5;
  const auto r = check_nonresonant_bounds(op, E, E, 0.1, gamma0(0.0));
  EXPECT_TRUE(r.premise_ok());
  EXPECT_TRUE(r.norm_check.bound_ok);
  EXPECT_TRUE(r.decay_check.bound_ok);
  EXPECT_TRUE(std::isinf(r.decay.margin));
}

TEST(Nonresonant, SmallHoppingFarEnergy) {
  const double eps = 1e-4, delta0 = 1e-2;
  const auto op = assemble(cube(8, 1), 0.31, Side::Right, sawtooth_model(1, eps));
  std::vector<double> diag;
  for (long i = 0; i < op.size(); ++i) diag.push_back(op.matrix()(i, i));
  std::sort(diag.begin(), diag.end());
  // Midpoint of the widest gap between diagonal values.
  double E = 0.0, gap = 0.0;
  for (std::size_t i = 1; i < diag.size(); ++i)
    if (diag[i] - diag[i - 1] > gap) {
      gap = diag[i] - diag[i - 1];
      E = 0.5 * (diag[i] + diag[i - 1]);
    }
  ASSERT_GT(gap, 2 * delta0);
  const auto r = check_nonresonant_bounds(op, E, E + 0.001, delta0, gamma0(eps));
  EXPECT_TRUE(r.premise_ok());
  EXPECT_TRUE(r.norm_check.bound_ok) << r.norm;
  EXPECT_TRUE(r.decay_check.bound_ok) << r.decay.margin;

  // Direct-inversion oracle for the same quantities.
  const auto g = greens(op, E + 0.001);
  for (long i = 0; i < op.size(); ++i)
    for (long j = 0; j < op.size(); ++j)
      if (i != j)
        EXPECT_LE(std::abs(g.entries(i, j)), std::exp(-gamma0(eps) * std::labs(i - j)));
  EXPECT_LE(g.op_norm, 10.0 / delta0);
}

TEST(Nonresonant, ComplexEnergyOnDiskBoundary) {
  const double eps = 1e-4, delta0 = 1e-2;
  const auto op = assemble(cube(6, 1), 0.31, Side::Right, sawtooth_model(1, eps));
  const double E = 1.2;
  for (int k = 0; k < 16; ++k) {
    const Complex z = E + 0.999 * delta0 / 5.0 * std::polar(1.0, 2.0 * std::acos(-1.0) * k / 16.0);
    const auto r = check_nonresonant_bounds(op, E, z, delta0, gamma0(eps));
    EXPECT_TRUE(r.premise_ok());
    EXPECT_TRUE(r.norm_check.bound_ok);
    EXPECT_TRUE(r.decay_check.bound_ok);
  }
}

TEST(Nonresonant, LargeHoppingFlagsPremise) {
  const double eps = 0.05, delta0 = 0.1;
  const auto op = assemble(cube(8, 1), 0.31, Side::Right, sawtooth_model(1, eps));
  const auto r = check_nonresonant_bounds(op, 1.5, 1.5, delta0, gamma0(eps));
  EXPECT_GT(r.neumann_ratio, 0.5);
  EXPECT_FALSE(r.premise_ok());
  EXPECT_FALSE(r.norm_check.premise_ok);
  EXPECT_FALSE(r.decay_check.violated_with_premise());
  if (!r.decay_check.bound_ok) EXPECT_EQ(r.decay_check.status(), "premise_violated");
}

TEST(Nonresonant, ResonantSiteFlagsPremise) {
  const auto op = assemble(cube(4, 1), 0.31, Side::Right, sawtooth_model(1, 1e-4));
  const double E = op.matrix()(2, 2) + 1e-3;
  const auto r = check_nonresonant_bounds(op, E, E, 1e-2, gamma0(1e-4));
  EXPECT_FALSE(r.nonresonant);
  EXPECT_FALSE(r.premise_ok());
}

TEST(CheckDecay, MarginMatchesWorstEntry) {
  const LatticeSet L = cube(2, 1);
  Matrix G = Matrix::Zero(5, 5);
  G(0, 4) = std::exp(-1.0);  // distance 4
  G(1, 2) = std::exp(-3.0);  // distance 1
  const auto c = check_decay(G, L, 0.5, 1.0);
  EXPECT_NEAR(c.margin, 1.0 - 2.0, 1e-14);
  EXPECT_EQ(c.worst_x, L[0]);
  EXPECT_EQ(c.worst_y, L[4]);
  EXPECT_FALSE(c.holds());
}
