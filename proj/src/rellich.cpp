#include "mslab/rellich.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mslab/error.hpp"

namespace mslab {

using linalg::Vector;

RellichEngine::RellichEngine(ModelPtr model, ScaleSchedule schedule, BlockHierarchy hierarchy,
                             RellichOptions options)
    : model_(std::move(model)),
      schedule_(std::move(schedule)),
      hierarchy_(std::move(hierarchy)),
      options_(options) {
  if (!model_) fail(ErrorCode::Domain, "RellichEngine: null model");
  if (hierarchy_.blocks.empty()) fail(ErrorCode::Domain, "RellichEngine: empty hierarchy");
  if (hierarchy_.top() > schedule_.N)
    fail(ErrorCode::Domain, "RellichEngine: hierarchy deeper than the schedule");
}

namespace {

std::pair<long, double> nearest_index(const Vector& sorted, double x) {
  long best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (long i = 0; i < sorted.size(); ++i) {
    const double d = std::abs(sorted(i) - x);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return {best, dist};
}

}  // namespace

RellichPoint RellichEngine::evaluate(int m, double theta, Side side) const {
  if (m < 0 || m > max_scale()) fail(ErrorCode::Domain, "scale " + std::to_string(m) + " is not available");
  RellichPoint p;
  p.theta = theta;
  p.side = side;
  p.scale = m;
  const Point o(model_->dim);
  const ExtendedReal v = site_potential(*model_, theta, o, side);
  if (!v.finite()) {
    p.defined = false;
    p.in_regime = false;
    p.value = v.as_double();
    p.note = "pole of the potential at the pivot";
    return p;
  }
  double prev = v.value();
  p.scale_values.push_back(prev);
  Vector top_spectrum = Vector::Constant(1, prev);

  for (int k = 1; k <= m; ++k) {
    DirichletOperator op;
    try {
      op = assemble(hierarchy_.block(k), theta, side, model_);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PoleOnLattice) throw;
      p.defined = false;
      p.in_regime = false;
      p.value = std::numeric_limits<double>::quiet_NaN();
      p.note = e.what();
      return p;
    }
    RootOptions ro;
    ro.derivative_budget = schedule_.tolerance_budget[static_cast<std::size_t>(k - 1)];
    const double radius = 10.0 * schedule_.delta_at(k - 1);
    RootAttempt at = try_rellich_root(op, o, prev, radius, ro);

    ScaleStep st;
    st.full_count = at.result.full_count;
    st.minor_count = at.result.minor_count;
    st.second_distance = at.result.second_distance;
    if (at.status == RootStatus::Ok) {
      st.value = at.result.root;
      st.s_derivative = at.result.s_derivative;
      st.derivative_ok = at.result.derivative_ok;
    } else {
      st.root_certified = false;
      p.in_regime = false;
      if (!p.note.empty()) p.note += "; ";
      p.note += "scale " + std::to_string(k) + ": " + at.message;
      if (!options_.nearest_fallback) {
        p.defined = false;
        p.value = std::numeric_limits<double>::quiet_NaN();
        p.steps.push_back(st);
        return p;
      }
      st.value = at.full_eigenvalues(nearest_index(at.full_eigenvalues, prev).first);
      st.derivative_ok = false;
    }
    st.step = std::abs(st.value - prev);
    st.step_ok = st.step <= schedule_.step_budget(k);
    prev = st.value;
    p.scale_values.push_back(prev);
    p.steps.push_back(st);
    top_spectrum = std::move(at.full_eigenvalues);
  }
  p.value = prev;
  const auto [idx, dist] = nearest_index(top_spectrum, prev);
  p.branch_index = idx;
  p.branch_distance = dist;
  return p;
}

std::vector<Discontinuity> discontinuities(const Model& model, const LatticeSet& block) {
  std::vector<Discontinuity> out;
  for (double b : model.potential.breakpoints())
    for (const auto& x : block) out.push_back({reduce_phase(b - model.freq.dot(x)), x});
  std::sort(out.begin(), out.end(), [](const Discontinuity& a, const Discontinuity& b) {
    return a.beta < b.beta || (a.beta == b.beta && a.site < b.site);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Discontinuity& a, const Discontinuity& b) { return a.beta == b.beta; }),
            out.end());
  return out;
}

std::vector<double> make_theta_grid(const Model& model, const LatticeSet& block, const GridOptions& options) {
  if (options.samples < 2) fail(ErrorCode::Domain, "theta grid needs at least two samples");
  const auto discs = discontinuities(model, block);
  const bool unbounded = model.potential.boundedness() == Boundedness::UBLM;
  std::vector<double> grid;
  grid.reserve(options.samples + 5 * discs.size());
  for (std::size_t j = 0; j < options.samples; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(options.samples);
    if (unbounded) {
      bool near_pole = false;
      for (const auto& d : discs) {
        const double gap = std::abs(t - d.beta);
        if (std::min(gap, 1.0 - gap) < 2.5 * options.pole_margin) near_pole = true;
      }
      if (near_pole) continue;
    }
    grid.push_back(t);
  }
  for (const auto& d : discs) {
    if (unbounded) {
      const double h = options.pole_margin;
      for (double off : {-2.0 * h, -h, h, 2.0 * h}) grid.push_back(reduce_phase(d.beta + off));
    } else {
      const double h = options.offset;
      for (double off : {-2.0 * h, -h, 0.0, h}) grid.push_back(reduce_phase(d.beta + off));
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

BranchFamily branch_family(const LatticeSet& block, const std::vector<double>& theta_grid, const ModelPtr& model,
                           Exec exec) {
  BranchFamily fam;
  fam.block = block;
  fam.theta_grid = theta_grid;
  fam.lambdas.resize(theta_grid.size());
  for_each_index(theta_grid.size(), exec, [&](std::size_t i) {
    fam.lambdas[i] = eigenvalues(assemble(block, theta_grid[i], Side::Right, model));
  });
  return fam;
}

long RellichCurve::out_of_regime_count() const {
  long c = 0;
  for (const auto& s : samples) c += s.in_regime ? 0 : 1;
  return c;
}

long RellichCurve::step_budget_failures() const {
  long c = 0;
  for (const auto& s : samples)
    for (const auto& st : s.steps) c += st.step_ok ? 0 : 1;
  return c;
}

namespace {

// Value at theta from the curve samples when theta is a grid point, else
// evaluated directly.
const RellichPoint* find_sample(const RellichCurve& c, double theta) {
  auto it = std::lower_bound(c.theta_grid.begin(), c.theta_grid.end(), theta);
  if (it == c.theta_grid.end() || *it != theta) return nullptr;
  return &c.samples[static_cast<std::size_t>(it - c.theta_grid.begin())];
}

RellichPoint sample_or_eval(const RellichCurve& c, const RellichEngine& e, double theta) {
  if (const RellichPoint* p = find_sample(c, theta)) return *p;
  return e.evaluate(c.scale_n, theta, Side::Right);
}

}  // namespace

RellichCurve construct_curve(int n, const std::vector<double>& theta_grid, const RellichEngine& engine,
                             const GridOptions& grid_options, Exec exec) {
  RellichCurve c;
  c.scale_n = n;
  c.block = engine.hierarchy().block(n);
  c.grid_options = grid_options;
  c.theta_grid = theta_grid;
  std::sort(c.theta_grid.begin(), c.theta_grid.end());
  c.boundedness = engine.model().potential.boundedness();
  c.lipschitz = engine.model().potential.lipschitz();
  c.samples.resize(c.theta_grid.size());
  for_each_index(c.theta_grid.size(), exec,
                 [&](std::size_t i) { c.samples[i] = engine.evaluate(n, c.theta_grid[i], Side::Right); });
  c.values.reserve(c.samples.size());
  for (const auto& s : c.samples) c.values.push_back(s.value);
  c.discontinuities = discontinuities(engine.model(), c.block);

  if (c.boundedness == Boundedness::BLM) {
    c.jumps.resize(c.discontinuities.size());
    const double h = grid_options.offset;
    for_each_index(c.discontinuities.size(), exec, [&](std::size_t i) {
      const Discontinuity& d = c.discontinuities[i];
      JumpRecord& r = c.jumps[i];
      r.beta = d.beta;
      r.site = d.site;
      r.interior = d.beta != 0.0;
      const RellichPoint right = sample_or_eval(c, engine, d.beta);
      const RellichPoint left = engine.evaluate(n, d.beta, Side::Left);
      const RellichPoint m1 = sample_or_eval(c, engine, reduce_phase(d.beta - h));
      const RellichPoint m2 = sample_or_eval(c, engine, reduce_phase(d.beta - 2.0 * h));
      r.right_value = right.value;
      r.left_assembled = left.value;
      r.left_extrapolated = 2.0 * m1.value - m2.value;
      r.left_agreement = std::abs(r.left_assembled - r.left_extrapolated);
      r.jump = r.right_value - r.left_extrapolated;
      r.in_regime = right.in_regime && left.in_regime && m1.in_regime && m2.in_regime;
    });
  }
  return c;
}

MonotonicityReport audit_monotonicity(const RellichCurve& curve, double L, double quotient_slack,
                                      double min_spacing) {
  MonotonicityReport rep;
  rep.L = L;
  rep.quotient_slack = quotient_slack;
  rep.min_spacing = min_spacing;
  std::vector<double> alphas;
  for (const auto& d : curve.discontinuities) alphas.push_back(d.beta);
  if (alphas.empty() || alphas.front() != 0.0) alphas.insert(alphas.begin(), 0.0);

  std::vector<std::vector<std::size_t>> members(alphas.size());
  for (std::size_t j = 0; j < curve.theta_grid.size(); ++j) {
    if (!curve.samples[j].defined) continue;
    const double t = curve.theta_grid[j];
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(alphas.begin(), alphas.end(), t) - alphas.begin()) - 1;
    members[k].push_back(j);
  }

  for (std::size_t k = 0; k < alphas.size(); ++k) {
    IntervalQuotient iq;
    iq.alpha_begin = alphas[k];
    iq.alpha_end = k + 1 < alphas.size() ? alphas[k + 1] : 1.0;
    const auto& idx = members[k];
    iq.samples = static_cast<long>(idx.size());
    std::size_t next = 0;
    long pairs = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const double ta = curve.theta_grid[idx[a]];
      if (next <= a) next = a + 1;
      while (next < idx.size() && curve.theta_grid[idx[next]] - ta < min_spacing) ++next;
      if (next >= idx.size()) break;
      const double tb = curve.theta_grid[idx[next]];
      const double q = (curve.values[idx[next]] - curve.values[idx[a]]) / (tb - ta);
      ++pairs;
      if (q < iq.min_quotient) {
        iq.min_quotient = q;
        iq.worst_theta = ta;
      }
    }
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
      if (curve.samples[idx[a]].branch_index != curve.samples[idx[a + 1]].branch_index) ++iq.branch_switches;
    }
    for (std::size_t a : idx) rep.max_branch_distance = std::max(rep.max_branch_distance, curve.samples[a].branch_distance);
    if (pairs == 0) {
      rep.grid_ok = false;
      if (rep.first_violation.empty())
        rep.first_violation = "interval starting at " + std::to_string(iq.alpha_begin) + " has no sample pair";
    }
    rep.branch_switches += iq.branch_switches;
    if (iq.min_quotient < rep.min_quotient) rep.min_quotient = iq.min_quotient;
    if (iq.min_quotient < L - quotient_slack) {
      rep.quotient_ok = false;
      if (rep.first_violation.empty())
        rep.first_violation = "difference quotient " + std::to_string(iq.min_quotient) + " at theta " +
                              std::to_string(iq.worst_theta);
    }
    rep.intervals.push_back(iq);
  }

  for (const auto& j : curve.jumps) {
    if (!j.interior) continue;
    rep.min_jump = std::min(rep.min_jump, j.jump);
    const double tol = 1e-10 * std::max(1.0, std::abs(j.right_value));
    if (j.jump < -tol) {
      rep.jumps_ok = false;
      if (rep.first_violation.empty())
        rep.first_violation = "jump " + std::to_string(j.jump) + " at beta " + std::to_string(j.beta);
    }
  }
  rep.composite_ok = rep.quotient_ok && rep.jumps_ok && rep.grid_ok;
  return rep;
}

PairCheck lipschitz_pair_check(const RellichEngine& engine, int m, double L, long pairs, std::uint64_t seed,
                               double slack, Exec exec) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, double>> ts(static_cast<std::size_t>(pairs));
  for (auto& t : ts) {
    double a = unif(rng), b = unif(rng);
    if (b < a) std::swap(a, b);
    t = {a, b};
  }
  std::vector<double> margins(ts.size());
  for_each_index(ts.size(), exec, [&](std::size_t i) {
    const double e1 = engine.value(m, ts[i].first);
    const double e2 = engine.value(m, ts[i].second);
    margins[i] = (e2 - e1) - L * (ts[i].second - ts[i].first) + slack;
  });
  PairCheck pc;
  pc.pairs = pairs;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(margins[i] >= 0.0)) ++pc.violations;
    if (margins[i] < pc.worst_margin || std::isnan(margins[i])) {
      pc.worst_margin = margins[i];
      pc.worst_theta1 = ts[i].first;
      pc.worst_theta2 = ts[i].second;
    }
  }
  return pc;
}

UblmReport ublm_continuity_check(const RellichCurve& curve, const RellichEngine& engine) {
  if (curve.boundedness != Boundedness::UBLM)
    fail(ErrorCode::UnsupportedRegime, "continuity check applies to unbounded potentials only");
  UblmReport rep;
  const double h = curve.grid_options.pole_margin;
  rep.cont_tol = 10.0 * h * curve.lipschitz;
  for (const auto& d : curve.discontinuities) {
    if (d.beta == 0.0) continue;
    ContinuityRecord r;
    r.beta = d.beta;
    r.site = d.site;
    const double lm1 = sample_or_eval(curve, engine, reduce_phase(d.beta - h)).value;
    const double lm2 = sample_or_eval(curve, engine, reduce_phase(d.beta - 2.0 * h)).value;
    const double rp1 = sample_or_eval(curve, engine, reduce_phase(d.beta + h)).value;
    const double rp2 = sample_or_eval(curve, engine, reduce_phase(d.beta + 2.0 * h)).value;
    r.left_limit = 2.0 * lm1 - lm2;
    r.right_limit = 2.0 * rp1 - rp2;
    r.discrepancy = std::abs(r.right_limit - r.left_limit);
    const LatticeSet cut = curve.block.without(d.site);
    if (!cut.empty()) {
      const Vector ev = eigenvalues(assemble(cut, d.beta, Side::Right, engine.model_ptr()));
      const double mid = 0.5 * (r.left_limit + r.right_limit);
      double best = std::numeric_limits<double>::infinity();
      for (long i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - mid));
      r.cone_distance = best;
    }
    rep.max_discrepancy = std::max(rep.max_discrepancy, r.discrepancy);
    rep.max_cone_distance = std::max(rep.max_cone_distance, r.cone_distance);
    rep.records.push_back(r);
  }
  rep.ok = rep.max_discrepancy <= rep.cont_tol;
  return rep;
}

}  // namespace mslab
