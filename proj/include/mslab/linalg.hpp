#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mslab::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct Inertia {
  long negative = 0;
  long zero = 0;
  long positive = 0;
};

// Bunch-Kaufman LDL^T of a symmetric matrix (complex-symmetric, not
// Hermitian, when Scalar is complex). Only the lower triangle is read.
template <class Scalar>
class SymmetricFactor {
 public:
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit SymmetricFactor(const Mat& A);

  long size() const { return n_; }
  // An exactly zero pivot, or a pivot block below 1e-14 of the entry scale.
  bool singular() const { return singular_; }
  double min_pivot() const { return min_pivot_; }

  Vec solve(const Vec& b) const;
  Mat solve(const Mat& B) const;

  // log|det| and the unit-modulus phase (the sign, for real matrices).
  double log_abs_det() const { return log_abs_det_; }
  Scalar det_phase() const { return det_phase_; }
  Scalar det() const;

  // Sylvester inertia; meaningful for real Scalar only.
  Inertia inertia() const { return inertia_; }

 private:
  long n_;
  Mat lu_;
  std::vector<int> ipiv_;
  bool singular_ = false;
  double min_pivot_ = 0.0;
  double log_abs_det_ = 0.0;
  Scalar det_phase_{1};
  Inertia inertia_;
};

extern template class SymmetricFactor<double>;
extern template class SymmetricFactor<Complex>;

// Number of eigenvalues of symmetric A that are < x.
long count_below(const Matrix& A, double x);
// Number of eigenvalues of symmetric A in the closed interval [a, b].
long count_in_interval(const Matrix& A, double a, double b);

// A is diagonal when every off-diagonal entry is exactly zero.
bool is_diagonal(const Matrix& A);

}  // namespace mslab::linalg
