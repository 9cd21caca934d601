#include "mslab/msa.hpp"

#include <algorithm>
#include <cmath>

#include "mslab/error.hpp"

namespace mslab {

using linalg::Complex;

namespace {

constexpr std::size_t kMaxMissingListed = 16;

double phase_of(const Model& model, double theta, const Point& p) { return theta + model.freq.dot(p); }

// Distance from a real value to [lo, hi].
double dist_to_segment(double v, double lo, double hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

std::vector<Point> missing_points(const LatticeSet& sub, const LatticeSet& set) {
  std::vector<Point> out;
  for (const auto& q : sub) {
    if (!set.contains(q)) {
      out.push_back(q);
      if (out.size() >= kMaxMissingListed) break;
    }
  }
  return out;
}

}  // namespace

ResonanceScan resonant_scan(const RellichEngine& engine, int m, double theta, Side side, Complex E,
                            const LatticeSet& search, Exec exec) {
  const double dm = engine.schedule().delta_at(m);
  const std::size_t n = search.size();
  std::vector<RellichPoint> pts(n);
  for_each_index(n, exec, [&](std::size_t i) {
    pts[i] = engine.evaluate(m, phase_of(engine.model(), theta, search[i]), side);
  });
  ResonanceScan scan;
  scan.resonant = LatticeSet(search.dim());
  std::vector<Point> hits;
  for (std::size_t i = 0; i < n; ++i) {
    const RellichPoint& r = pts[i];
    if (!r.defined) {
      scan.poles.push_back(search[i]);
      continue;
    }
    if (!r.in_regime) scan.out_of_regime.push_back(search[i]);
    if (std::abs(Complex(r.value, 0.0) - E) < dm) hits.push_back(search[i]);
  }
  scan.resonant = LatticeSet(search.dim(), std::move(hits));
  return scan;
}

LatticeSet resonant_set(const RellichEngine& engine, int m, double theta, Side side, Complex E,
                        const LatticeSet& search, Exec exec) {
  return resonant_scan(engine, m, theta, side, E, search, exec).resonant;
}

ResonanceOracle engine_oracle(const RellichEngine& engine, double theta, Side side, Complex E, Exec exec) {
  return [&engine, theta, side, E, exec](int k, const LatticeSet& region) {
    return resonant_set(engine, k, theta, side, E, region, exec);
  };
}

SeparationReport min_separation(const LatticeSet& S, double required) {
  SeparationReport r;
  r.required = required;
  for (std::size_t i = 0; i < S.size(); ++i) {
    for (std::size_t j = i + 1; j < S.size(); ++j) {
      const double d = static_cast<double>(dist1(S[i], S[j]));
      if (d < r.min_distance) {
        r.min_distance = d;
        r.closest_a = S[i];
        r.closest_b = S[j];
      }
    }
  }
  r.holds = r.min_distance >= required;
  return r;
}

SeparationReport separation_check(const LatticeSet& S, int m, const ScaleSchedule& schedule) {
  return min_separation(S, 100.0 * static_cast<double>(schedule.length(m + 1)));
}

LatticeSet extend_set(const LatticeSet& B, const LatticeSet& X, long L) {
  if (L < 0) fail(ErrorCode::Domain, "extend_set: negative L");
  const SeparationReport sep = min_separation(X, 10.0 * static_cast<double>(L));
  if (!sep.holds)
    fail(ErrorCode::PremiseViolated, "extend_set: points " + sep.closest_a.str() + " and " + sep.closest_b.str() +
                                         " are at distance " + std::to_string(static_cast<long>(sep.min_distance)) +
                                         " < 10L = " + std::to_string(10 * L));
  LatticeSet out = B;
  if (B.empty()) return out;
  for (const auto& x : X)
    if (dist1(x, B) <= L) out = set_union(out, cube(L, x));
  return out;
}

ExtensionCheck check_extension(const LatticeSet& B, const LatticeSet& X, long L, const LatticeSet& Bt) {
  ExtensionCheck c;
  for (const auto& p : B) {
    if (!Bt.contains(p)) {
      c.contains_B = false;
      c.witnesses.push_back(p);
    }
  }
  for (const auto& p : Bt) {
    bool near = false;
    for (const auto& b : B) {
      if (dist1(p, b) <= 2 * L) {
        near = true;
        break;
      }
    }
    if (!near) {
      c.within_2L = false;
      c.witnesses.push_back(p);
    }
  }
  for (const auto& x : X) {
    const LatticeSet q = cube(L, x);
    bool meets = false, inside = true;
    for (const auto& p : q) {
      if (Bt.contains(p))
        meets = true;
      else
        inside = false;
    }
    if (meets && !inside) {
      c.closed = false;
      c.witnesses.push_back(x);
    }
  }
  return c;
}

BlockBuild build_block(int n_plus_1, const ScaleSchedule& schedule, int dim, const ResonanceOracle& X) {
  const int n = n_plus_1 - 1;
  if (n < 1) fail(ErrorCode::Domain, "build_block needs n + 1 >= 2");
  BlockBuild out;
  const long top = static_cast<long>(schedule.length(n_plus_1));
  const LatticeSet region = cube(2 * top, dim);
  LatticeSet B = cube(top, dim);
  for (int k = 0; k <= n - 1; ++k) {
    const long L = 10 * static_cast<long>(schedule.length(n - k));
    const LatticeSet Xk = X(n - k - 1, region);
    const LatticeSet next = extend_set(B, Xk, L);
    if (next.size() != B.size()) {
      for (const auto& x : Xk)
        if (dist1(x, B) <= L && !cube(L, x).subset_of(B)) out.inflating_points.push_back(x);
    }
    B = next;
  }
  out.block = B;
  const long bound = top + 50 * static_cast<long>(schedule.length(n));
  out.sandwich_ok = cube(top, dim).subset_of(B) &&
                    std::all_of(B.begin(), B.end(), [&](const Point& p) { return p.norm1() <= bound; });
  return out;
}

ProbeFamilies probe_families(const RellichEngine& engine, int n, const ProbeOptions& options, Exec exec) {
  if (options.theta_samples == 0) fail(ErrorCode::Domain, "probe family needs at least one theta sample");
  ProbeFamilies f;
  f.radius = 10.0 * engine.schedule().delta_at(n);
  const std::size_t T = options.theta_samples;
  std::vector<double> right(T), left(T);
  for_each_index(2 * T, exec, [&](std::size_t i) {
    const double th = (static_cast<double>(i % T) + 0.5) / static_cast<double>(T);
    if (i < T)
      right[i] = engine.value(n, th, Side::Right);
    else
      left[i - T] = engine.value(n, th, Side::Left);
  });
  const double a0 = engine.value(n, 0.0, Side::Right);
  const double a1 = engine.value(n, 0.0, Side::Left);
  f.centres.push_back({0.0, Side::Right, a0, a0});
  f.centres.push_back({0.0, Side::Left, a1, a1});
  for (std::size_t j = 0; j < T; ++j) {
    const double th = (static_cast<double>(j) + 0.5) / static_cast<double>(T);
    const double lo = std::min(left[j], right[j]);
    const double hi = std::max(left[j], right[j]);
    f.centres.push_back({th, Side::Right, lo, hi});
    f.centres.push_back({th, Side::Left, lo, hi});
  }
  return f;
}

LatticeSet probe_resonances(const RellichEngine& engine, const ProbeFamilies& families, int k,
                            const LatticeSet& region, Exec exec) {
  const double dk = engine.schedule().delta_at(k);
  const std::size_t C = families.centres.size();
  const std::size_t P = region.size();
  std::vector<char> hit(C * P, 0);
  for_each_index(C * P, exec, [&](std::size_t i) {
    const auto& c = families.centres[i / P];
    const Point& p = region[i % P];
    const double v = engine.value(k, phase_of(engine.model(), c.theta, p), c.side);
    if (std::isfinite(v) && dist_to_segment(v, c.lo, c.hi) < families.radius + dk) hit[i] = 1;
  });
  std::vector<Point> pts;
  for (std::size_t j = 0; j < P; ++j) {
    for (std::size_t c = 0; c < C; ++c) {
      if (hit[c * P + j]) {
        pts.push_back(region[j]);
        break;
      }
    }
  }
  return LatticeSet(region.dim(), std::move(pts));
}

BlockHierarchy build_hierarchy(const ModelPtr& model, const ScaleSchedule& schedule, const ProbeOptions& probes,
                               Exec exec) {
  const int d = model->dim;
  BlockHierarchy h;
  h.blocks.push_back(cube(0, d));
  h.log.push_back({0, false, true, "origin", {}});
  h.blocks.push_back(cube(static_cast<long>(schedule.length(1)), d));
  h.log.push_back({1, false, true, "cube of radius l_1", {}});
  for (int n = 1; n + 1 <= schedule.N; ++n) {
    const long top = static_cast<long>(schedule.length(n + 1));
    HierarchyLogEntry entry{n + 1, true, true, "", {}};
    RellichEngine engine(model, schedule, h);
    const ProbeFamilies fam = probe_families(engine, n, probes, exec);
    const ResonanceOracle X = [&](int k, const LatticeSet& region) {
      return probe_resonances(engine, fam, k, region, exec);
    };
    try {
      BlockBuild b = build_block(n + 1, schedule, d, X);
      entry.inflating_points = b.inflating_points;
      entry.note = "extension cascade over " + std::to_string(fam.probe_count()) + " probes";
      if (!b.sandwich_ok) entry.note += "; sandwich failed";
      h.blocks.push_back(std::move(b.block));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PremiseViolated) throw;
      entry.extended = false;
      entry.premise_ok = false;
      entry.note = std::string("fell back to Q_{l_{n+1}}: ") + e.what();
      h.blocks.push_back(cube(top, d));
    }
    h.log.push_back(std::move(entry));
  }
  return h;
}

GoodnessReport classify_with(const LatticeSet& set, int m, const BlockHierarchy& hierarchy,
                             const ResonanceOracle& S) {
  GoodnessReport g;
  g.set = set;
  g.m = m;
  const LatticeSet top = S(m, set);
  g.resonant_points = top.points();
  g.nonresonant = top.empty();
  for (int k = 0; k < m; ++k) {
    for (const auto& p : S(k, set)) {
      const LatticeSet blk = hierarchy.block_at(k + 1, p);
      if (!blk.subset_of(set)) {
        g.regular = false;
        g.witnesses.push_back({p, k + 1, missing_points(blk, set)});
      }
    }
  }
  g.good = g.nonresonant && g.regular;
  return g;
}

GoodnessReport classify(const LatticeSet& set, int m, double theta, Side side, Complex E,
                        const RellichEngine& engine, Exec exec) {
  GoodnessReport g = classify_with(set, m, engine.hierarchy(), engine_oracle(engine, theta, side, E, exec));
  g.theta = theta;
  g.side = side;
  g.E = E;
  return g;
}

RegularizeResult regularize_with(const LatticeSet& B, int n, const ScaleSchedule& schedule,
                                 const BlockHierarchy& hierarchy, const ResonanceOracle& S) {
  RegularizeResult r;
  LatticeSet cur = B;
  for (int k = 0; k <= n - 1; ++k) {
    const long L = 10 * static_cast<long>(schedule.length(n - k));
    const LatticeSet X = S(n - k - 1, dilate(cur, 3 * L));
    const LatticeSet next = extend_set(cur, X, L);
    if (next.size() != cur.size()) {
      for (const auto& x : X)
        if (!cur.empty() && dist1(x, cur) <= L && !cube(L, x).subset_of(cur)) r.inflating_points.push_back(x);
    }
    cur = next;
  }
  r.set = cur;
  if (n >= 1) {
    const long bound = 30 * static_cast<long>(schedule.length(n));
    const LatticeSet added = set_difference(cur, B);
    r.within_30ln = std::all_of(added.begin(), added.end(), [&](const Point& p) { return dist1(p, B) <= bound; });
  } else {
    r.within_30ln = cur == B;
  }
  GoodnessReport g = classify_with(cur, n, hierarchy, S);
  r.regular = g.regular;
  return r;
}

RegularizeResult regularize(const LatticeSet& B, int n, double theta, Side side, Complex E,
                            const RellichEngine& engine, Exec exec) {
  return regularize_with(B, n, engine.schedule(), engine.hierarchy(), engine_oracle(engine, theta, side, E, exec));
}

LatticeSet regular_closure(const LatticeSet& B, int n, const BlockHierarchy& hierarchy, const ResonanceOracle& S) {
  LatticeSet cur = B;
  for (int iter = 0; iter < 10000; ++iter) {
    LatticeSet next = cur;
    for (int k = 0; k < n; ++k)
      for (const auto& p : S(k, cur)) next = set_union(next, hierarchy.block_at(k + 1, p));
    if (next.size() == cur.size()) return cur;
    cur = std::move(next);
  }
  fail(ErrorCode::NumericalFailure, "regular_closure did not stabilize");
}

GoodsetReport verify_goodset_greens(const LatticeSet& set, int m, double theta, Side side, Complex E,
                                    Complex E_star, const RellichEngine& engine, Exec exec) {
  const ScaleSchedule& sch = engine.schedule();
  const double dm = sch.delta_at(m);
  GoodsetReport r;
  r.goodness = classify(set, m, theta, side, E, engine, exec);
  r.energy_close = std::abs(E - E_star) < dm / 5.0;
  const DirichletOperator op = assemble(set, theta, side, engine.model_ptr());

  if (m == 0) {
    const NonresonantReport nr = E_star.imag() == 0.0
                                     ? check_nonresonant_bounds(op, E.real(), E_star.real(), dm, sch.gamma_at(0))
                                     : check_nonresonant_bounds(op, E.real(), E_star, dm, sch.gamma_at(0));
    r.premise_ok = nr.premise_ok() && r.goodness.good && E.imag() == 0.0;
    r.norm = nr.norm;
    r.norm_check = nr.norm_check;
    r.norm_check.premise_ok = r.premise_ok;
    r.decay_check = nr.decay_check;
    r.decay_check.premise_ok = r.premise_ok;
    r.decay = nr.decay;
    r.dist_to_spectrum = 1.0 / std::max(nr.norm, 1e-300);
    return r;
  }

  r.premise_ok = r.energy_close && r.goodness.good;
  const double min_dist = std::pow(static_cast<double>(sch.length(m)), 5.0 / 6.0);
  const double gm = sch.gamma_at(m);
  if (E_star.imag() == 0.0) {
    const GreensFunction G = greens(op, E_star.real());
    r.norm = G.op_norm;
    r.dist_to_spectrum = G.dist_to_spectrum;
    r.decay = check_decay(G.entries, set, gm, min_dist);
  } else {
    const ComplexGreensFunction G = greens(op, E_star);
    r.norm = G.op_norm;
    r.dist_to_spectrum = G.dist_to_spectrum;
    r.decay = check_decay(G.entries, set, gm, min_dist);
  }
  const double cap = 10.0 / dm;
  r.norm_check = {r.premise_ok, r.norm <= cap, cap - r.norm};
  r.decay_check = {r.premise_ok, r.decay.holds(), r.decay.margin};
  return r;
}

JumpSignAudit audit_jump_sign(const RellichEngine& engine, int n, const Point& x, double z) {
  if (n < 0 || n + 1 > engine.max_scale())
    fail(ErrorCode::Domain, "audit_jump_sign needs B_{n+1} in the hierarchy");
  const Model& model = engine.model();
  const Point o(model.dim);
  const LatticeSet& block = engine.hierarchy().block(n + 1);
  if (x == o || !block.contains(x)) fail(ErrorCode::Domain, "audit_jump_sign: x must be a non-origin block site");

  JumpSignAudit a;
  const double beta = reduce_phase(-model.freq.dot(x));
  const double dn = engine.schedule().delta_at(n);
  const RellichPoint left = engine.evaluate(n, beta, Side::Left);
  const RellichPoint right = engine.evaluate(n, beta, Side::Right);
  a.interval_lo = left.value - 5.0 * dn;
  a.interval_hi = right.value + 5.0 * dn;
  a.z_in_interval = a.interval_lo < z && z < a.interval_hi;
  a.analysis = jump_analysis(block, o, x, z, engine.model_ptr());

  const LatticeSet Bo = block.without(o);
  a.case_label = "nonresonant";
  for (int m = n; m >= 0; --m) {
    const LatticeSet S = set_union(resonant_set(engine, m, beta, Side::Right, Complex(z, 0.0), Bo),
                                   resonant_set(engine, m, beta, Side::Left, Complex(z, 0.0), Bo));
    if (!S.empty()) {
      a.resonant_scale = m;
      a.resonant_point = S.contains(x) ? x : S[0];
      a.case_label = S.contains(x) ? "case1" : "case2";
      break;
    }
  }
  const ScaleSchedule& sch = engine.schedule();
  const double d0 = sch.delta_at(0);
  if (n == 0) {
    const double v0 = model.potential.eval(0.0, Side::Right).value();
    const double v1 = model.potential.eval(0.0, Side::Left).value();
    a.scale_premise = std::abs(right.value - v0) >= 20.0 * d0 && std::abs(right.value - v1) >= 20.0 * d0;
  } else {
    double drift = 5.0 * dn + model.epsilon;
    for (int k = 1; k <= n - 1; ++k) drift += std::exp(-static_cast<double>(sch.length(k)));
    a.scale_premise = drift < 0.5 * d0;
  }
  a.in_regime = a.case_label == "nonresonant" && a.z_in_interval && a.scale_premise && left.in_regime &&
                right.in_regime;
  return a;
}

NestingReport nesting_check(const RellichEngine& engine, int m, const std::vector<double>& thetas, Exec exec) {
  const ScaleSchedule& sch = engine.schedule();
  NestingReport r;
  for (int k = 1; k <= m; ++k)
    if (!(sch.delta_at(k) < sch.delta_at(k - 1))) r.premise_ok = false;
  const std::size_t n = thetas.size();
  std::vector<RellichPoint> pts(2 * n);
  for_each_index(2 * n, exec, [&](std::size_t i) {
    pts[i] = engine.evaluate(m, thetas[i % n], i < n ? Side::Right : Side::Left);
  });
  for (const auto& p : pts) {
    if (!p.defined) continue;
    ++r.samples;
    bool bad = false;
    for (int k = 0; k < m; ++k) {
      const double excess = std::abs(p.scale_values[static_cast<std::size_t>(k)] - p.value) -
                            (sch.delta_at(k) - sch.delta_at(m));
      if (excess > r.worst_excess) {
        r.worst_excess = excess;
        r.worst_theta = p.theta;
      }
      if (excess > 0.0) bad = true;
    }
    if (bad) ++r.violations;
  }
  return r;
}

BlockRegularity check_block_regularity(const RellichEngine& engine, int n_plus_1, const ProbeOptions& options,
                                       Exec exec) {
  const int n = n_plus_1 - 1;
  if (n < 1 || n_plus_1 > engine.max_scale()) fail(ErrorCode::Domain, "check_block_regularity: scale out of range");
  const LatticeSet& block = engine.hierarchy().block(n_plus_1);
  const ProbeFamilies fam = probe_families(engine, n, options, exec);
  BlockRegularity r;
  r.probe_count = fam.probe_count();
  for (int k = 0; k < n; ++k) {
    const LatticeSet X = probe_resonances(engine, fam, k, block, exec);
    r.resonant_points += static_cast<long>(X.size());
    for (const auto& p : X) {
      const LatticeSet blk = engine.hierarchy().block_at(k + 1, p);
      if (!blk.subset_of(block)) r.witnesses.push_back({p, k + 1, missing_points(blk, block)});
    }
  }
  return r;
}

ResonanceNesting resonance_nesting(const RellichEngine& engine, int m, double theta, Side side, Complex E,
                                   const LatticeSet& region, Exec exec) {
  ResonanceNesting r;
  const LatticeSet upper = resonant_set(engine, m + 1, theta, side, E, region, exec);
  const LatticeSet lower = resonant_set(engine, m, theta, side, E, region, exec);
  r.checked = static_cast<long>(region.size());
  for (const auto& p : upper)
    if (!lower.contains(p)) r.escapes.push_back(p);
  return r;
}

}  // namespace mslab
