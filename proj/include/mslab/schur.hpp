#pragma once

#include <limits>

#include "mslab/operator.hpp"

namespace mslab {

// s(z) = z - H(o,o) - r(z),  r(z) = c^T (z - H_minor)^{-1} c.
struct SchurEvaluation {
  Point pivot;
  linalg::Complex z;
  linalg::Complex s_value;
  linalg::Complex r_value;
  linalg::Complex s_derivative;  // 1 + u^T u with u = (z - H_minor)^{-1} c
  double tail_estimate = std::numeric_limits<double>::quiet_NaN();
};

// Splits op into pivot diagonal, coupling column c and pivot-deleted minor.
struct SchurSplit {
  std::ptrdiff_t pivot_index = -1;
  double pivot_diagonal = 0.0;
  linalg::Vector coupling;
  linalg::Matrix minor;
  LatticeSet minor_domain{1};
  bool decoupled() const { return coupling.isZero(0.0); }
};
SchurSplit split_at(const DirichletOperator& op, const Point& pivot);

SchurEvaluation schur_complement(const DirichletOperator& op, const Point& pivot, linalg::Complex z);

// |det(z - H) - s(z) det(z - H_minor)| / max(|det(z - H)|, |s det|).
double schur_identity_residual(const DirichletOperator& op, const Point& pivot, linalg::Complex z);

// s restricted to the real line, evaluated through the minor's spectral
// decomposition: r(z) = sum_k w_k / (z - mu_k).
class RealSchurFunction {
 public:
  RealSchurFunction(const DirichletOperator& op, const Point& pivot);
  double operator()(double z) const;
  double derivative(double z) const;  // 1 + sum_k w_k / (z - mu_k)^2
  const linalg::Vector& minor_eigenvalues() const { return mu_; }
  double pivot_diagonal() const { return h_; }
  bool decoupled() const { return decoupled_; }

 private:
  double h_ = 0.0;
  linalg::Vector mu_, w_;
  bool decoupled_ = true;
};

struct RootOptions {
  double derivative_budget = std::numeric_limits<double>::infinity();
  int max_iterations = 100;
};

struct RellichRoot {
  double root = 0.0;
  double s_value = 0.0;
  double s_derivative = 1.0;
  bool derivative_ok = true;
  int iterations = 0;
  int bisection_steps = 0;
  long minor_count = 0;
  long full_count = 0;
  // Distance from the center to the second closest eigenvalue of the full matrix.
  double second_distance = std::numeric_limits<double>::infinity();
};

enum class RootStatus { Ok, MinorResonant, CountMismatch };

struct RootAttempt {
  RootStatus status = RootStatus::Ok;
  RellichRoot result;
  linalg::Vector full_eigenvalues;
  std::string message;
};

// Non-throwing core of find_rellich_root. Newton failures still throw.
RootAttempt try_rellich_root(const DirichletOperator& op, const Point& pivot, double center, double radius,
                             const RootOptions& options = {});

// Unique root of s in [center - radius, center + radius]; throws
// RootCountMismatch when the window does not isolate exactly one eigenvalue.
RellichRoot find_rellich_root(const DirichletOperator& op, const Point& pivot, double center, double radius,
                              const RootOptions& options = {});

struct JumpAnalysis {
  Point site_x;
  double z = 0.0;
  double beta = 0.0;  // frac(-x.omega)
  double det_left = 0.0, det_right = 0.0;
  double log_abs_det_left = 0.0, log_abs_det_right = 0.0;
  int sign_left = 1, sign_right = 1;
  linalg::Vector b_vector;  // adj(z - H_minor) e_x, shared by both sides
  double ctb = 0.0;
  double s_left = 0.0, s_right = 0.0;
  double s_diff_direct = 0.0;
  double s_diff_formula = 0.0;
  bool signs_agree = true;  // vacuous when either magnitude is <= 1e-12
  double formula_error = 0.0;  // |direct - formula| / max(1, |formula|)
  int det_product_sign() const { return sign_left * sign_right; }
};

// Compares s at theta = beta_x on the right and left sides for the block
// with pivot o. Bounded potentials only.
JumpAnalysis jump_analysis(const LatticeSet& block, const Point& pivot, const Point& x, double z,
                           const ModelPtr& model);

// |s_full(z) - s_sub(z)| at a common pivot.
double scale_tail(const DirichletOperator& opfull, const DirichletOperator& opsub, const Point& pivot,
                  linalg::Complex z);

}  // namespace mslab
