#pragma once

// Reference computations written independently of the library code paths:
// textbook elimination, Laplace expansion, closed-form characteristic roots
// and brute-force enumeration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "mslab/lattice.hpp"
#include "mslab/quasiperiodic.hpp"

namespace oracle {

using cd = std::complex<double>;
template <class T>
using Dense = std::vector<std::vector<T>>;

// Gaussian elimination with partial pivoting.
template <class T>
T det_gauss(Dense<T> a) {
  const std::size_t n = a.size();
  T det = T(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) == 0.0) return T(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const T f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

template <class T>
Dense<T> minor_of(const Dense<T>& a, std::size_t row, std::size_t col) {
  Dense<T> m;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (r == row) continue;
    std::vector<T> line;
    for (std::size_t c = 0; c < a.size(); ++c)
      if (c != col) line.push_back(a[r][c]);
    m.push_back(line);
  }
  return m;
}

// Laplace expansion along the first row; use for n <= 8.
template <class T>
T det_laplace(const Dense<T>& a) {
  const std::size_t n = a.size();
  if (n == 0) return T(1);
  if (n == 1) return a[0][0];
  T s = T(0);
  for (std::size_t c = 0; c < n; ++c) {
    const T term = a[0][c] * det_laplace(minor_of(a, 0, c));
    s += (c % 2 == 0) ? term : -term;
  }
  return s;
}

// adj(A)(i, j) = (-1)^{i+j} det(minor(A, j, i)).
template <class T>
Dense<T> adjugate(const Dense<T>& a) {
  const std::size_t n = a.size();
  Dense<T> adj(n, std::vector<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const T d = det_laplace(minor_of(a, j, i));
      adj[i][j] = ((i + j) % 2 == 0) ? d : -d;
    }
  return adj;
}

// eps * adjacency + diag(v(theta + x.omega)), built by scanning all pairs.
inline Dense<double> hamiltonian(const mslab::LatticeSet& sites, double theta, double eps,
                                 const std::vector<double>& omega, double (*v)(double)) {
  const std::size_t n = sites.size();
  Dense<double> h(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double phase = theta;
    for (int k = 0; k < sites.dim(); ++k) phase += omega[static_cast<std::size_t>(k)] * static_cast<double>(sites[i][k]);
    h[i][i] = v(phase);
    for (std::size_t j = 0; j < n; ++j) {
      long d = 0;
      for (int k = 0; k < sites.dim(); ++k) d += std::labs(sites[i][k] - sites[j][k]);
      if (d == 1) h[i][j] = eps;
    }
  }
  return h;
}

inline double sawtooth(double t) { return t - std::floor(t); }

inline Dense<cd> z_minus(const Dense<double>& h, cd z) {
  Dense<cd> a(h.size(), std::vector<cd>(h.size()));
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j) a[i][j] = (i == j ? z : cd(0)) - h[i][j];
  return a;
}

// Eigenvalues of [[a, b], [b, c]], ascending.
inline std::vector<double> eig2(double a, double b, double c) {
  const double m = 0.5 * (a + c), r = std::hypot(0.5 * (a - c), b);
  return {m - r, m + r};
}

// Roots of the characteristic polynomial of a symmetric 3x3 matrix (cubic
// solved trigonometrically), ascending.
inline std::vector<double> eig3(const Dense<double>& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::vector<double> e{a[0][0], a[1][1], a[2][2]};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Dense<double> b(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  double r = det_laplace(b) / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = std::acos(-1.0);
  std::vector<double> e{q + 2 * p * std::cos(phi), q + 2 * p * std::cos(phi + 2 * pi / 3), 0.0};
  e[2] = 3 * q - e[0] - e[1];
  std::sort(e.begin(), e.end());
  return e;
}

// All points of [-R, R]^d with |p - c|_1 <= R, by scanning the bounding box.
inline std::vector<mslab::Point> ball_scan(long R, const mslab::Point& c) {
  std::vector<mslab::Point> out;
  const int d = c.dim();
  std::vector<long> idx(static_cast<std::size_t>(d), -R);
  while (true) {
    long s = 0;
    for (auto v : idx) s += std::labs(v);
    if (s <= R) {
      mslab::Point p(d);
      for (int k = 0; k < d; ++k) p[k] = c[k] + idx[static_cast<std::size_t>(k)];
      out.push_back(p);
    }
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] > R) idx[static_cast<std::size_t>(k++)] = -R;
    if (k == d) break;
  }
  return out;
}

inline long l1(const mslab::Point& a, const mslab::Point& b) {
  long s = 0;
  for (int k = 0; k < a.dim(); ++k) s += std::labs(a[k] - b[k]);
  return s;
}

inline long l1_to_set(const mslab::Point& p, const mslab::LatticeSet& S) {
  long best = -1;
  for (const auto& q : S) {
    const long d = l1(p, q);
    if (best < 0 || d < best) best = d;
  }
  return best;
}

}  // namespace oracle
