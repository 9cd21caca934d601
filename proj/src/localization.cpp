#include "mslab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mslab/error.hpp"

namespace mslab {

using linalg::Complex;
using linalg::CVector;
using linalg::Matrix;
using linalg::Vector;

EigenSystem diagonalize(const LatticeSet& box, double theta, const ModelPtr& model, Side side) {
  EigenSystem sys;
  sys.op = assemble(box, theta, side, model);
  Spectrum sp = spectrum(sys.op);
  sys.values = std::move(sp.values);
  sys.vectors = std::move(sp.vectors);
  if (!sys.values.allFinite() || !sys.vectors.allFinite())
    fail(ErrorCode::NumericalFailure, "diagonalize: non-finite eigendecomposition");
  const long n = sys.op.size();
  sys.centre_index.resize(static_cast<std::size_t>(n));
  for (long s = 0; s < n; ++s) {
    long best = 0;
    double bv = -1.0;
    for (long i = 0; i < n; ++i) {
      const double a = std::abs(sys.vectors(i, s));
      if (a > bv) {
        bv = a;
        best = i;
      }
    }
    sys.centre_index[static_cast<std::size_t>(s)] = best;
  }
  return sys;
}

EigenSystemCheck check_eigensystem(const EigenSystem& sys) {
  EigenSystemCheck c;
  const long n = sys.size();
  if (n == 0) return c;
  const Matrix gram = sys.vectors.transpose() * sys.vectors - Matrix::Identity(n, n);
  c.orthonormality = gram.cwiseAbs().maxCoeff();
  const Matrix& H = sys.op.matrix();
  const double hnorm = std::max(1.0, H.cwiseAbs().rowwise().sum().maxCoeff());
  const Matrix R = H * sys.vectors - sys.vectors * sys.values.asDiagonal();
  c.residual = R.colwise().norm().maxCoeff() / hnorm;
  return c;
}

DecayFit fit_decay(const std::vector<double>& distance, const std::vector<double>& magnitude,
                   const DecayOptions& options) {
  if (distance.size() != magnitude.size()) fail(ErrorCode::Domain, "fit_decay: size mismatch");
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < distance.size(); ++i)
    if (magnitude[i] > options.floor) usable.push_back(i);
  std::stable_sort(usable.begin(), usable.end(),
                   [&](std::size_t a, std::size_t b) { return distance[a] < distance[b]; });
  DecayFit f;
  f.near_excluded = static_cast<long>(std::floor(options.near_fraction * static_cast<double>(usable.size())));
  const std::size_t start = static_cast<std::size_t>(f.near_excluded);
  const std::size_t count = usable.size() - start;
  if (count < 4)
    fail(ErrorCode::InsufficientDecaySamples,
         "decay fit has " + std::to_string(count) + " usable samples above " + std::to_string(options.floor));

  double mx = 0.0, my = 0.0;
  for (std::size_t k = start; k < usable.size(); ++k) {
    mx += distance[usable[k]];
    my += std::log(magnitude[usable[k]]);
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = start; k < usable.size(); ++k) {
    const double dx = distance[usable[k]] - mx;
    const double dy = std::log(magnitude[usable[k]]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) fail(ErrorCode::InsufficientDecaySamples, "decay fit samples share a single distance");
  const double slope = sxy / sxx;
  f.rate = -slope;
  f.prefactor = std::exp(my - slope * mx);
  double ssr = 0.0;
  for (std::size_t k = start; k < usable.size(); ++k) {
    const double pred = my + slope * (distance[usable[k]] - mx);
    const double e = std::log(magnitude[usable[k]]) - pred;
    ssr += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  f.samples_used = static_cast<long>(count);
  return f;
}

DecayFit decay_profile(const Vector& psi, const LatticeSet& box, const Point& centre, const DecayOptions& options) {
  if (psi.size() != static_cast<long>(box.size())) fail(ErrorCode::Domain, "decay_profile: size mismatch");
  std::vector<double> d(box.size()), a(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    d[i] = static_cast<double>(dist1(box[i], centre));
    a[i] = std::abs(psi(static_cast<long>(i)));
  }
  return fit_decay(d, a, options);
}

DecayFit decay_profile(const EigenSystem& sys, long s, const DecayOptions& options) {
  if (s < 0 || s >= sys.size()) fail(ErrorCode::Domain, "decay_profile: eigenvector index out of range");
  return decay_profile(sys.vectors.col(s), sys.box(), sys.centre(s), options);
}

std::vector<ProfileRow> decay_profiles(const EigenSystem& sys, const DecayOptions& options, Exec exec) {
  const std::size_t n = static_cast<std::size_t>(sys.size());
  std::vector<ProfileRow> rows(n);
  for_each_index(n, exec, [&](std::size_t i) {
    ProfileRow& r = rows[i];
    r.s = static_cast<long>(i);
    r.mu = sys.values(r.s);
    r.centre = sys.centre(r.s);
    try {
      r.fit = decay_profile(sys, r.s, options);
      r.fitted = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientDecaySamples) throw;
    }
  });
  return rows;
}

double poisson_residual(const DirichletOperator& op, const Vector& psi, double E, const LatticeSet& U,
                        const Point& x) {
  const LatticeSet& dom = op.domain();
  if (!U.contains(x)) fail(ErrorCode::Domain, "poisson_residual: x must lie in U");
  if (!U.subset_of(dom)) fail(ErrorCode::Domain, "poisson_residual: U must lie in the domain");
  if (U == dom) fail(ErrorCode::DegenerateSubset, "poisson_residual: U equals the whole domain");
  if (psi.size() != op.size()) fail(ErrorCode::Domain, "poisson_residual: vector size mismatch");

  const DirichletOperator sub = op.restricted(U);
  const GreensFunction G = greens(sub, E);
  const Boundaries bd = boundaries(U, dom);
  const long ix = sub.index(x);
  double sum = 0.0;
  for (const auto& pr : bd.pairs) sum += G.entries(ix, sub.index(pr.inner)) * psi(op.index(pr.outer));
  return std::abs(psi(op.index(x)) + op.epsilon() * sum);
}

CVector propagator_row(const EigenSystem& sys, const Point& x, double t) {
  const long ix = sys.op.index(x);
  if (ix < 0) fail(ErrorCode::Domain, "propagator_row: site outside the box");
  const long n = sys.size();
  if (t == 0.0) {
    CVector e = CVector::Zero(n);
    e(ix) = 1.0;
    return e;
  }
  CVector coeff(n);
  for (long s = 0; s < n; ++s)
    coeff(s) = std::polar(1.0, t * sys.values(s)) * sys.vectors(ix, s);
  return sys.vectors.cast<Complex>() * coeff;
}

EdlValue edl_kernel(const EigenSystem& sys, const Point& x, const Point& y, const std::vector<double>& t_samples) {
  const long ix = sys.op.index(x), iy = sys.op.index(y);
  if (ix < 0 || iy < 0) fail(ErrorCode::Domain, "edl_kernel: site outside the box");
  const long n = sys.size();
  EdlValue v;
  v.x = x;
  v.y = y;
  v.distance = dist1(x, y);

  std::vector<double> ax(static_cast<std::size_t>(n), 0.0), ay(static_cast<std::size_t>(n), 0.0);
  for (long s = 0; s < n; ++s) {
    const double px = sys.vectors(ix, s), py = sys.vectors(iy, s);
    v.abs_sum += std::abs(px) * std::abs(py);
    const std::size_t c = static_cast<std::size_t>(sys.centre_index[static_cast<std::size_t>(s)]);
    ax[c] += px * px;
    ay[c] += py * py;
  }
  for (std::size_t p = 0; p < ax.size(); ++p) v.spectral_bound += std::sqrt(ax[p] * ay[p]);

  v.worst_pointwise = -std::numeric_limits<double>::infinity();
  for (double t : t_samples) {
    double mag;
    if (t == 0.0) {
      mag = ix == iy ? 1.0 : 0.0;
    } else {
      Complex acc(0.0, 0.0);
      for (long s = 0; s < n; ++s) acc += std::polar(1.0, t * sys.values(s)) * (sys.vectors(ix, s) * sys.vectors(iy, s));
      mag = std::abs(acc);
    }
    v.sup_sampled = std::max(v.sup_sampled, mag);
    v.worst_pointwise = std::max(v.worst_pointwise, mag - v.abs_sum);
  }
  return v;
}

std::vector<EdlValue> edl_table(const EigenSystem& sys, const std::vector<std::pair<Point, Point>>& pairs,
                                const std::vector<double>& t_samples, Exec exec) {
  std::vector<EdlValue> out(pairs.size());
  for_each_index(pairs.size(), exec,
                 [&](std::size_t i) { out[i] = edl_kernel(sys, pairs[i].first, pairs[i].second, t_samples); });
  return out;
}

std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t n) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || n < 2) fail(ErrorCode::Domain, "log_spaced_times: bad range");
  std::vector<double> t(n);
  const double a = std::log(t_min), b = std::log(t_max);
  for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  t.front() = t_min;
  t.back() = t_max;
  return t;
}

AnnulusReport annulus_probe(int n, double theta, Complex E, const RellichEngine& engine, Exec exec) {
  if (n < 1 || n > engine.max_scale()) fail(ErrorCode::Domain, "annulus_probe: scale out of range");
  const ScaleSchedule& sch = engine.schedule();
  const int d = engine.model().dim;
  const long ln = static_cast<long>(sch.length(n));
  const long ln1 = static_cast<long>(sch.length(n + 1));

  AnnulusReport r;
  r.base = set_difference(cube(98 * ln1, d), cube(80 * ln, d));
  const LatticeSet outer = set_difference(cube(99 * ln1, d), cube(50 * ln, d));

  const ResonanceScan window = resonant_scan(engine, n, theta, Side::Right, E, outer, exec);
  r.window_resonances = window.resonant.points();
  r.window_clear = window.resonant.empty();
  r.centre_resonant = !resonant_set(engine, n, theta, Side::Right, E, cube(50 * ln, d), exec).empty();

  try {
    const RegularizeResult reg = regularize(r.base, n, theta, Side::Right, E, engine, exec);
    r.annulus = reg.set;
    r.regularize_ok = reg.within_30ln && reg.regular;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PremiseViolated) throw;
    r.separation_ok = false;
    r.regularize_ok = false;
    r.annulus = r.base;
  }
  r.sandwich_ok = r.base.subset_of(r.annulus) && r.annulus.subset_of(outer);
  r.goodness = classify(r.annulus, n, theta, Side::Right, E, engine, exec);
  return r;
}

}  // namespace mslab
