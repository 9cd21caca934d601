#include "mslab/schur.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "mslab/error.hpp"

namespace mslab {

using linalg::CMatrix;
using linalg::Complex;
using linalg::CVector;
using linalg::Matrix;
using linalg::Vector;

SchurSplit split_at(const DirichletOperator& op, const Point& pivot) {
  SchurSplit sp;
  sp.pivot_index = op.index(pivot);
  if (sp.pivot_index < 0) fail(ErrorCode::Domain, "pivot " + pivot.str() + " is outside the domain");
  const long n = op.size();
  const long p = sp.pivot_index;
  const Matrix& H = op.matrix();
  sp.pivot_diagonal = H(p, p);
  sp.minor.resize(n - 1, n - 1);
  sp.coupling.resize(n - 1);
  for (long i = 0, a = 0; i < n; ++i) {
    if (i == p) continue;
    sp.coupling(a) = H(i, p);
    for (long j = 0, b = 0; j < n; ++j) {
      if (j == p) continue;
      sp.minor(a, b++) = H(i, j);
    }
    ++a;
  }
  sp.minor_domain = op.domain().without(pivot);
  return sp;
}

SchurEvaluation schur_complement(const DirichletOperator& op, const Point& pivot, Complex z) {
  const SchurSplit sp = split_at(op, pivot);
  SchurEvaluation ev;
  ev.pivot = pivot;
  ev.z = z;
  const long m = sp.minor.rows();
  CMatrix A = -sp.minor.cast<Complex>();
  A.diagonal().array() += z;
  linalg::SymmetricFactor<Complex> f(A);
  if (f.singular()) fail(ErrorCode::SingularMinor, "pivot-deleted block is singular at z");
  if (sp.decoupled() || m == 0) {
    ev.r_value = 0.0;
    ev.s_derivative = 1.0;
  } else {
    const CVector c = sp.coupling.cast<Complex>();
    const CVector u = f.solve(c);
    ev.r_value = c.transpose() * u;
    ev.s_derivative = Complex(1.0) + Complex(u.transpose() * u);
  }
  ev.s_value = (z - sp.pivot_diagonal) - ev.r_value;
  return ev;
}

double schur_identity_residual(const DirichletOperator& op, const Point& pivot, Complex z) {
  const SchurEvaluation ev = schur_complement(op, pivot, z);
  const SchurSplit sp = split_at(op, pivot);
  CMatrix full = -op.matrix().cast<Complex>();
  full.diagonal().array() += z;
  CMatrix minor = -sp.minor.cast<Complex>();
  minor.diagonal().array() += z;
  const Complex lhs = linalg::SymmetricFactor<Complex>(full).det();
  const Complex rhs = ev.s_value * linalg::SymmetricFactor<Complex>(minor).det();
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

RealSchurFunction::RealSchurFunction(const DirichletOperator& op, const Point& pivot) {
  const SchurSplit sp = split_at(op, pivot);
  h_ = sp.pivot_diagonal;
  decoupled_ = sp.decoupled();
  const long m = sp.minor.rows();
  if (decoupled_ || linalg::is_diagonal(sp.minor)) {
    // Diagonal minor: eigenvectors are coordinate vectors.
    mu_ = sp.minor.diagonal();
    w_ = sp.coupling.array().square();
    std::vector<long> order(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return mu_(a) < mu_(b); });
    Vector mu(m), w(m);
    for (long i = 0; i < m; ++i) {
      mu(i) = mu_(order[static_cast<std::size_t>(i)]);
      w(i) = w_(order[static_cast<std::size_t>(i)]);
    }
    mu_ = mu;
    w_ = w;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sp.minor, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NumericalFailure, "eigensolver did not converge");
  mu_ = solver.eigenvalues();
  w_ = (solver.eigenvectors().transpose() * sp.coupling).array().square();
}

double RealSchurFunction::operator()(double z) const {
  double r = 0.0;
  if (!decoupled_)
    for (long k = 0; k < mu_.size(); ++k) r += w_(k) / (z - mu_(k));
  return (z - h_) - r;
}

double RealSchurFunction::derivative(double z) const {
  double d = 1.0;
  if (!decoupled_)
    for (long k = 0; k < mu_.size(); ++k) {
      const double q = z - mu_(k);
      d += w_(k) / (q * q);
    }
  return d;
}

namespace {

long count_closed(const Vector& sorted, double a, double b) {
  const double* lo = std::lower_bound(sorted.data(), sorted.data() + sorted.size(), a);
  const double* hi = std::upper_bound(sorted.data(), sorted.data() + sorted.size(), b);
  return static_cast<long>(hi - lo);
}

double second_distance(const Vector& eig, double center) {
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  for (long i = 0; i < eig.size(); ++i) {
    const double d = std::abs(eig(i) - center);
    if (d < d1) {
      d2 = d1;
      d1 = d;
    } else if (d < d2) {
      d2 = d;
    }
  }
  return d2;
}

}  // namespace

RootAttempt try_rellich_root(const DirichletOperator& op, const Point& pivot, double center, double radius,
                             const RootOptions& options) {
  if (!(radius > 0.0)) fail(ErrorCode::Domain, "root window radius must be positive");
  RootAttempt at;
  const RealSchurFunction s(op, pivot);
  const double a = center - radius;
  const double b = center + radius;
  RellichRoot& res = at.result;
  res.minor_count = count_closed(s.minor_eigenvalues(), a, b);
  at.full_eigenvalues = eigenvalues(op);
  res.full_count = count_closed(at.full_eigenvalues, a, b);
  res.second_distance = second_distance(at.full_eigenvalues, center);
  // s(z) = z - h has the single root h and no poles.
  if (s.decoupled() && s.pivot_diagonal() >= a && s.pivot_diagonal() <= b) {
    res.root = s.pivot_diagonal();
    res.s_value = 0.0;
    res.s_derivative = 1.0;
    res.derivative_ok = true;
    return at;
  }
  if (res.minor_count > 0) {
    at.status = RootStatus::MinorResonant;
    at.message = "pivot-deleted block has " + std::to_string(res.minor_count) + " eigenvalue(s) in the window";
    return at;
  }
  if (res.full_count != 1) {
    at.status = RootStatus::CountMismatch;
    at.message = std::to_string(res.full_count) + " eigenvalues of the full block in the window";
    return at;
  }

  const double tol = 1e-12 * std::max(1.0, std::abs(center));

  const double h = 1e-6 * radius;
  double lo = a;
  double hi = b;
  double x = center;
  double fx = s(x);
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it + 1;
    if (std::abs(fx) <= tol) {
      converged = true;
      break;
    }
    if (fx < 0) lo = x; else hi = x;
    const double slope = (s(x + h) - s(x - h)) / (2.0 * h);
    double next = x - fx / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
      ++res.bisection_steps;
    }
    if (next == x) {
      converged = std::abs(fx) <= tol;
      break;
    }
    x = next;
    fx = s(x);
  }
  if (!converged) {
    if (std::abs(fx) <= tol) {
      converged = true;
    } else {
      fail(ErrorCode::NumericalFailure, "Newton iteration did not reach tolerance at center " +
                                            std::to_string(center));
    }
  }
  // A few exact-derivative steps push the residual to rounding level.
  for (int k = 0; k < 3 && fx != 0.0; ++k) {
    const double next = x - fx / s.derivative(x);
    if (!(next > a && next < b)) break;
    const double fn = s(next);
    if (!(std::abs(fn) < std::abs(fx))) break;
    x = next;
    fx = fn;
  }
  res.root = x;
  res.s_value = fx;
  res.s_derivative = s.derivative(x);
  res.derivative_ok = std::abs(res.s_derivative - 1.0) <= options.derivative_budget;
  return at;
}

RellichRoot find_rellich_root(const DirichletOperator& op, const Point& pivot, double center, double radius,
                              const RootOptions& options) {
  RootAttempt at = try_rellich_root(op, pivot, center, radius, options);
  if (at.status != RootStatus::Ok) fail(ErrorCode::RootCountMismatch, at.message);
  return at.result;
}

JumpAnalysis jump_analysis(const LatticeSet& block, const Point& pivot, const Point& x, double z,
                           const ModelPtr& model) {
  if (model->potential.boundedness() != Boundedness::BLM)
    fail(ErrorCode::UnsupportedRegime, "jump analysis needs a bounded potential");
  if (x == pivot) fail(ErrorCode::Domain, "jump site must differ from the pivot");
  if (!block.contains(x) || !block.contains(pivot)) fail(ErrorCode::Domain, "jump site or pivot outside block");

  JumpAnalysis ja;
  ja.site_x = x;
  ja.z = z;
  ja.beta = reduce_phase(-model->freq.dot(x));
  const DirichletOperator right = assemble(block, ja.beta, Side::Right, model);
  const DirichletOperator left = assemble(block, ja.beta, Side::Left, model);
  const SchurSplit sr = split_at(right, pivot);
  const SchurSplit sl = split_at(left, pivot);

  Matrix AL = -sl.minor;
  AL.diagonal().array() += z;
  Matrix AR = -sr.minor;
  AR.diagonal().array() += z;
  const linalg::SymmetricFactor<double> fl(AL);
  const linalg::SymmetricFactor<double> fr(AR);
  if (fl.singular() || fr.singular()) fail(ErrorCode::SingularMinor, "deleted block singular at z");

  ja.log_abs_det_left = fl.log_abs_det();
  ja.log_abs_det_right = fr.log_abs_det();
  ja.sign_left = fl.det_phase() < 0 ? -1 : 1;
  ja.sign_right = fr.det_phase() < 0 ? -1 : 1;
  ja.det_left = fl.det();
  ja.det_right = fr.det();

  const std::ptrdiff_t ix = sl.minor_domain.index_of(x);
  Vector ex = Vector::Zero(AL.rows());
  ex(ix) = 1.0;
  const Vector uL = fl.solve(ex);
  ja.b_vector = ja.det_left * uL;
  const Vector& c = sl.coupling;
  const double ctu = c.dot(uL);
  ja.ctb = ja.det_left * ctu;

  // J (c^T b)^2 / (dL dR) evaluated as J (c^T u_L)^2 dL / dR in log-determinant form.
  // J = v(1-0) - v(0) is the diagonal drop at the pivot.
  const double J = sl.minor(ix, ix) - sr.minor(ix, ix);
  const double ratio = ja.sign_left * ja.sign_right * std::exp(ja.log_abs_det_left - ja.log_abs_det_right);
  ja.s_diff_formula = J * ctu * ctu * ratio;

  ja.s_left = std::real(schur_complement(left, pivot, z).s_value);
  ja.s_right = std::real(schur_complement(right, pivot, z).s_value);
  ja.s_diff_direct = ja.s_right - ja.s_left;
  ja.formula_error = std::abs(ja.s_diff_direct - ja.s_diff_formula) / std::max(1.0, std::abs(ja.s_diff_formula));
  if (std::abs(ja.s_diff_direct) > 1e-12 && std::abs(ja.s_diff_formula) > 1e-12)
    ja.signs_agree = (ja.s_diff_direct > 0) == (ja.s_diff_formula > 0);
  return ja;
}

double scale_tail(const DirichletOperator& opfull, const DirichletOperator& opsub, const Point& pivot, Complex z) {
  const Complex a = schur_complement(opfull, pivot, z).s_value;
  const Complex b = schur_complement(opsub, pivot, z).s_value;
  return std::abs(a - b);
}

}  // namespace mslab
