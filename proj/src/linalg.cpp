#include "mslab/linalg.hpp"

#include <cmath>
#include <complex>
#include <limits>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "mslab/error.hpp"

namespace mslab::linalg {

namespace {

int sytrf(long n, double* a, int* ipiv) {
  return LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n), a,
                        static_cast<lapack_int>(n), ipiv);
}
int sytrf(long n, Complex* a, int* ipiv) {
  return LAPACKE_zsytrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n), a,
                        static_cast<lapack_int>(n), ipiv);
}
int sytrs(long n, long nrhs, const double* a, const int* ipiv, double* b) {
  return LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n),
                        static_cast<lapack_int>(nrhs), a, static_cast<lapack_int>(n), ipiv, b,
                        static_cast<lapack_int>(n));
}
int sytrs(long n, long nrhs, const Complex* a, const int* ipiv, Complex* b) {
  return LAPACKE_zsytrs(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n),
                        static_cast<lapack_int>(nrhs), a, static_cast<lapack_int>(n), ipiv, b,
                        static_cast<lapack_int>(n));
}

double phase_of(double x) { return x < 0 ? -1.0 : 1.0; }
Complex phase_of(Complex z) { return z / std::abs(z); }

constexpr double kPivotFloor = 1e-14;

}  // namespace

template <class Scalar>
SymmetricFactor<Scalar>::SymmetricFactor(const Mat& A) : n_(A.rows()), lu_(A) {
  if (A.rows() != A.cols()) fail(ErrorCode::Domain, "SymmetricFactor: matrix must be square");
  ipiv_.assign(static_cast<std::size_t>(n_), 0);
  if (n_ == 0) return;

  double scale = 0.0;
  for (long j = 0; j < n_; ++j)
    for (long i = j; i < n_; ++i) scale = std::max(scale, std::abs(A(i, j)));

  const int info = sytrf(n_, lu_.data(), ipiv_.data());
  if (info < 0) fail(ErrorCode::NumericalFailure, "sytrf rejected argument " + std::to_string(-info));

  min_pivot_ = std::numeric_limits<double>::infinity();
  for (long k = 0; k < n_;) {
    const std::size_t kk = static_cast<std::size_t>(k);
    if (ipiv_[kk] > 0) {
      const Scalar d = lu_(k, k);
      const double m = std::abs(d);
      min_pivot_ = std::min(min_pivot_, m);
      if (m == 0.0) {
        singular_ = true;
        ++inertia_.zero;
      } else {
        log_abs_det_ += std::log(m);
        det_phase_ *= phase_of(d);
        if constexpr (std::is_same_v<Scalar, double>) {
          if (d < 0) ++inertia_.negative; else ++inertia_.positive;
        }
      }
      k += 1;
    } else {
      const Scalar a = lu_(k, k);
      const Scalar b = lu_(k + 1, k);
      const Scalar c = lu_(k + 1, k + 1);
      const Scalar det2 = a * c - b * b;
      // Pivot block eigenvalue magnitudes bound the local conditioning.
      const Scalar half_tr = (a + c) / Scalar(2);
      const Scalar disc = std::sqrt(half_tr * half_tr - det2);
      const double m = std::min(std::abs(half_tr + disc), std::abs(half_tr - disc));
      min_pivot_ = std::min(min_pivot_, m);
      if (std::abs(det2) == 0.0) {
        singular_ = true;
      } else {
        log_abs_det_ += std::log(std::abs(det2));
        det_phase_ *= phase_of(det2);
      }
      if constexpr (std::is_same_v<Scalar, double>) {
        // Bunch-Kaufman 2x2 blocks are indefinite.
        ++inertia_.negative;
        ++inertia_.positive;
      }
      k += 2;
    }
  }
  if (info > 0) singular_ = true;
  if (min_pivot_ <= kPivotFloor * std::max(scale, std::numeric_limits<double>::min()))
    singular_ = true;
}

template <class Scalar>
typename SymmetricFactor<Scalar>::Vec SymmetricFactor<Scalar>::solve(const Vec& b) const {
  if (singular_) fail(ErrorCode::NumericalFailure, "solve with a singular factorization");
  Vec x = b;
  if (n_ == 0) return x;
  const int info = sytrs(n_, 1, lu_.data(), ipiv_.data(), x.data());
  if (info != 0) fail(ErrorCode::NumericalFailure, "sytrs failed");
  return x;
}

template <class Scalar>
typename SymmetricFactor<Scalar>::Mat SymmetricFactor<Scalar>::solve(const Mat& B) const {
  if (singular_) fail(ErrorCode::NumericalFailure, "solve with a singular factorization");
  Mat X = B;
  if (n_ == 0) return X;
  const int info = sytrs(n_, X.cols(), lu_.data(), ipiv_.data(), X.data());
  if (info != 0) fail(ErrorCode::NumericalFailure, "sytrs failed");
  return X;
}

template <class Scalar>
Scalar SymmetricFactor<Scalar>::det() const {
  if (singular_ && min_pivot_ == 0.0) return Scalar(0);
  return det_phase_ * std::exp(log_abs_det_);
}

template class SymmetricFactor<double>;
template class SymmetricFactor<Complex>;

bool is_diagonal(const Matrix& A) {
  for (long j = 0; j < A.cols(); ++j)
    for (long i = 0; i < A.rows(); ++i)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

long count_below(const Matrix& A, double x) {
  const long n = A.rows();
  if (is_diagonal(A)) {
    long c = 0;
    for (long i = 0; i < n; ++i) c += A(i, i) < x ? 1 : 0;
    return c;
  }
  Matrix shifted = A;
  shifted.diagonal().array() -= x;
  SymmetricFactor<double> f(shifted);
  return f.inertia().negative;
}

long count_in_interval(const Matrix& A, double a, double b) {
  if (b < a) return 0;
  const long n = A.rows();
  if (is_diagonal(A)) {
    long c = 0;
    for (long i = 0; i < n; ++i) c += (A(i, i) >= a && A(i, i) <= b) ? 1 : 0;
    return c;
  }
  Matrix hi = A;
  hi.diagonal().array() -= b;
  const long not_above_b = n - SymmetricFactor<double>(hi).inertia().positive;
  return not_above_b - count_below(A, a);
}

}  // namespace mslab::linalg
