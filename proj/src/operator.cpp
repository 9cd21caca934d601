#include "mslab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "mslab/error.hpp"

namespace mslab {

using linalg::CMatrix;
using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

void Model::validate() const {
  check_dimension(dim);
  if (freq.dim() != dim) fail(ErrorCode::Domain, "frequency dimension differs from model dimension");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail(ErrorCode::Domain, "epsilon must be finite and >= 0");
}

ModelPtr make_model(int dim, double epsilon, Potential potential, Frequency freq) {
  auto m = std::make_shared<Model>();
  m->dim = dim;
  m->epsilon = epsilon;
  m->potential = std::move(potential);
  m->freq = std::move(freq);
  m->validate();
  return m;
}

ExtendedReal site_potential(const Model& model, double theta, const Point& x, Side side) {
  return model.potential.eval(theta + model.freq.dot(x), side);
}

DirichletOperator assemble(const LatticeSet& domain, double theta, Side side, const ModelPtr& model) {
  if (!model) fail(ErrorCode::Domain, "assemble: null model");
  if (domain.dim() != model->dim) fail(ErrorCode::Domain, "assemble: domain dimension differs from model");
  DirichletOperator op;
  op.domain_ = domain;
  op.theta_ = theta;
  op.side_ = side;
  op.model_ = model;
  const long n = static_cast<long>(domain.size());
  op.H_ = Matrix::Zero(n, n);

  std::string poles;
  for (long i = 0; i < n; ++i) {
    const Point& x = domain[static_cast<std::size_t>(i)];
    const ExtendedReal v = site_potential(*model, theta, x, side);
    if (!v.finite()) {
      poles += (poles.empty() ? "" : " ") + x.str();
      continue;
    }
    op.H_(i, i) = v.value();
  }
  if (!poles.empty()) fail(ErrorCode::PoleOnLattice, "potential pole at sites " + poles);

  const double eps = model->epsilon;
  if (eps != 0.0) {
    for (long i = 0; i < n; ++i) {
      const Point& x = domain[static_cast<std::size_t>(i)];
      for (const auto& y : neighbours(x)) {
        const std::ptrdiff_t j = domain.index_of(y);
        if (j >= 0) op.H_(i, j) = eps;
      }
    }
  }
  return op;
}

DirichletOperator DirichletOperator::restricted(const LatticeSet& sub) const {
  std::vector<long> idx;
  idx.reserve(sub.size());
  for (const auto& p : sub) {
    const std::ptrdiff_t k = domain_.index_of(p);
    if (k < 0) fail(ErrorCode::Domain, "restricted: " + p.str() + " is outside the domain");
    idx.push_back(static_cast<long>(k));
  }
  DirichletOperator r;
  r.domain_ = sub;
  r.theta_ = theta_;
  r.side_ = side_;
  r.model_ = model_;
  const long m = static_cast<long>(idx.size());
  r.H_.resize(m, m);
  for (long a = 0; a < m; ++a)
    for (long b = 0; b < m; ++b) r.H_(a, b) = H_(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return r;
}

namespace {

void normalize_signs(Matrix& V) {
  for (long j = 0; j < V.cols(); ++j) {
    long best = 0;
    for (long i = 1; i < V.rows(); ++i)
      if (std::abs(V(i, j)) > std::abs(V(best, j))) best = i;
    if (V(best, j) < 0) V.col(j) = -V.col(j);
  }
}

std::vector<long> sorted_diagonal_order(const Matrix& H) {
  std::vector<long> order(static_cast<std::size_t>(H.rows()));
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return H(a, a) < H(b, b); });
  return order;
}

}  // namespace

Spectrum spectrum(const DirichletOperator& op) {
  const Matrix& H = op.matrix();
  const long n = H.rows();
  Spectrum s;
  if (op.diagonal()) {
    const auto order = sorted_diagonal_order(H);
    s.values.resize(n);
    s.vectors = Matrix::Zero(n, n);
    for (long j = 0; j < n; ++j) {
      const long i = order[static_cast<std::size_t>(j)];
      s.values(j) = H(i, i);
      s.vectors(i, j) = 1.0;
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigensolver did not converge");
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  normalize_signs(s.vectors);
  return s;
}

Vector eigenvalues(const Matrix& H) {
  const long n = H.rows();
  if (linalg::is_diagonal(H)) {
    Vector v = H.diagonal();
    std::sort(v.data(), v.data() + n);
    return v;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigensolver did not converge");
  return solver.eigenvalues();
}

Vector eigenvalues(const DirichletOperator& op) { return eigenvalues(op.matrix()); }

namespace {

template <class E>
double distance_to_spectrum(const Vector& eig, E energy, double& norm) {
  double dist = std::numeric_limits<double>::infinity();
  norm = 0.0;
  for (long i = 0; i < eig.size(); ++i) {
    dist = std::min(dist, std::abs(Complex(eig(i)) - Complex(energy)));
    norm = std::max(norm, std::abs(eig(i)));
  }
  return dist;
}

template <class E>
void require_regular_energy(double dist, double norm, E energy) {
  if (dist <= 1e-12 * norm || dist == 0.0) {
    fail(ErrorCode::SingularEnergy, "energy " + std::to_string(std::real(Complex(energy))) +
                                        " lies on the spectrum (distance " + std::to_string(dist) + ")");
  }
}

}  // namespace

GreensFunction greens(const DirichletOperator& op, double E_star) {
  const Matrix& H = op.matrix();
  const long n = H.rows();
  GreensFunction g;
  g.energy = E_star;
  double norm = 0.0;
  g.dist_to_spectrum = distance_to_spectrum(eigenvalues(op), E_star, norm);
  require_regular_energy(g.dist_to_spectrum, norm, E_star);

  if (op.diagonal()) {
    g.entries = Matrix::Zero(n, n);
    for (long i = 0; i < n; ++i) {
      g.entries(i, i) = 1.0 / (H(i, i) - E_star);
      g.op_norm = std::max(g.op_norm, std::abs(g.entries(i, i)));
    }
    return g;
  }
  Matrix A = H;
  A.diagonal().array() -= E_star;
  linalg::SymmetricFactor<double> f(A);
  if (f.singular()) fail(ErrorCode::SingularEnergy, "H - E is numerically singular");
  g.entries = f.solve(Matrix(Matrix::Identity(n, n)));
  const Matrix sym = 0.5 * (g.entries + g.entries.transpose());
  const Vector ge = eigenvalues(sym);
  g.op_norm = n ? std::max(std::abs(ge(0)), std::abs(ge(n - 1))) : 0.0;
  return g;
}

ComplexGreensFunction greens(const DirichletOperator& op, Complex E_star) {
  const Matrix& H = op.matrix();
  const long n = H.rows();
  ComplexGreensFunction g;
  g.energy = E_star;
  double norm = 0.0;
  g.dist_to_spectrum = distance_to_spectrum(eigenvalues(op), E_star, norm);
  require_regular_energy(g.dist_to_spectrum, norm, E_star);

  if (op.diagonal()) {
    g.entries = CMatrix::Zero(n, n);
    for (long i = 0; i < n; ++i) {
      g.entries(i, i) = 1.0 / (Complex(H(i, i)) - E_star);
      g.op_norm = std::max(g.op_norm, std::abs(g.entries(i, i)));
    }
    return g;
  }
  CMatrix A = H.cast<Complex>();
  A.diagonal().array() -= E_star;
  linalg::SymmetricFactor<Complex> f(A);
  if (f.singular()) fail(ErrorCode::SingularEnergy, "H - E is numerically singular");
  g.entries = f.solve(CMatrix(CMatrix::Identity(n, n)));
  const CMatrix gram = g.entries.adjoint() * g.entries;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigensolver did not converge");
  g.op_norm = n ? std::sqrt(std::max(0.0, solver.eigenvalues()(n - 1))) : 0.0;
  return g;
}

double gamma0(double epsilon) {
  if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::abs(std::log(epsilon));
}

namespace {

template <class M>
DecayCheck decay_impl(const M& G, const LatticeSet& domain, double gamma, double min_dist) {
  DecayCheck out;
  out.margin = std::numeric_limits<double>::infinity();
  const long n = static_cast<long>(domain.size());
  out.worst_x = out.worst_y = Point(domain.dim());
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const Point& x = domain[static_cast<std::size_t>(i)];
      const Point& y = domain[static_cast<std::size_t>(j)];
      const long dxy = dist1(x, y);
      if (static_cast<double>(dxy) < min_dist || dxy == 0) continue;
      ++out.pairs_tested;
      const double a = std::abs(G(i, j));
      if (a == 0.0) continue;
      // With gamma = +inf every nonzero entry violates the bound.
      const double m = std::isinf(gamma) ? -std::numeric_limits<double>::infinity()
                                         : -(std::log(a) + gamma * static_cast<double>(dxy));
      if (m < out.margin) {
        out.margin = m;
        out.worst_x = x;
        out.worst_y = y;
      }
    }
  }
  return out;
}

template <class Energy>
NonresonantReport nonresonant_impl(const DirichletOperator& op, double E, Energy E_star, double delta0,
                                   double gamma0_value) {
  NonresonantReport r;
  r.nonresonant = true;
  for (long i = 0; i < op.size(); ++i)
    if (std::abs(op.matrix()(i, i) - E) < delta0) r.nonresonant = false;
  r.energy_close = std::abs(Complex(E_star) - Complex(E)) < delta0 / 5.0;
  r.neumann_ratio = 4.0 * op.model().dim * op.epsilon() / delta0;
  r.neumann_small = r.neumann_ratio <= 0.5;

  const auto g = greens(op, E_star);
  r.norm = g.op_norm;
  r.decay = decay_impl(g.entries, op.domain(), gamma0_value, 1.0);
  r.norm_check = {r.premise_ok(), r.norm <= 10.0 / delta0, 10.0 / delta0 - r.norm};
  r.decay_check = {r.premise_ok(), r.decay.holds(), r.decay.margin};
  return r;
}

}  // namespace

DecayCheck check_decay(const Matrix& G, const LatticeSet& domain, double gamma, double min_dist) {
  return decay_impl(G, domain, gamma, min_dist);
}
DecayCheck check_decay(const CMatrix& G, const LatticeSet& domain, double gamma, double min_dist) {
  return decay_impl(G, domain, gamma, min_dist);
}

NonresonantReport check_nonresonant_bounds(const DirichletOperator& op, double E, double E_star, double delta0,
                                           double gamma0_value) {
  return nonresonant_impl(op, E, E_star, delta0, gamma0_value);
}
NonresonantReport check_nonresonant_bounds(const DirichletOperator& op, double E, Complex E_star, double delta0,
                                           double gamma0_value) {
  return nonresonant_impl(op, E, E_star, delta0, gamma0_value);
}

}  // namespace mslab
