#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/LU>

#include "mslab/cli.hpp"
#include "mslab/error.hpp"
#include "mslab/localization.hpp"
#include "mslab/msa.hpp"
#include "mslab/schur.hpp"

namespace mslab::cli {

using linalg::CMatrix;
using linalg::Complex;
using linalg::Matrix;
using linalg::Vector;

namespace {

ScaleSchedule practical_schedule(const ExperimentConfig& cfg, const std::string& suite) {
  if (cfg.schedule.regime != Regime::Practical)
    fail(ErrorCode::UnsupportedRegime,
         suite + " needs a practical schedule; theoretical schedules are arithmetic only (see `mslab schedule`)");
  return cfg.build_schedule();
}

BlockHierarchy hierarchy_for(const ExperimentConfig& cfg, const std::string& suite, const ScaleSchedule& sch) {
  const std::string kind = cfg.param<std::string>(suite, "hierarchy", "probe");
  if (kind == "cubes") return BlockHierarchy::cubes(sch, cfg.dim);
  if (kind != "probe") fail(ErrorCode::Config, "params." + suite + ".hierarchy must be 'cubes' or 'probe'");
  ProbeOptions po;
  po.theta_samples = cfg.param<std::size_t>(suite, "probe_theta_samples", 64);
  return build_hierarchy(cfg.model, sch, po);
}

// L * min over x in B minus o of |x.omega|_T.
double block_spacing(const Model& model, const LatticeSet& block) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : block)
    if (x.norm1() > 0) best = std::min(best, torus_norm(x, model.freq));
  return model.potential.lipschitz() * best;
}

BoundCheck bound(bool premise, bool ok, double margin) { return BoundCheck{premise, ok, margin}; }

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Random lattice animal of the given size containing the origin.
LatticeSet random_animal(int dim, std::size_t size, std::mt19937_64& rng) {
  std::vector<Point> pts{Point(dim)};
  LatticeSet cur(dim, pts);
  while (cur.size() < size) {
    std::uniform_int_distribution<std::size_t> pick(0, cur.size() - 1);
    const auto nb = neighbours(cur[pick(rng)]);
    std::uniform_int_distribution<std::size_t> dir(0, nb.size() - 1);
    const Point q = nb[dir(rng)];
    if (!cur.contains(q)) {
      pts.push_back(q);
      cur = LatticeSet(dim, pts);
    }
  }
  return cur;
}

}  // namespace

SuiteResult suite_rellich_scan(const ExperimentConfig& cfg) {
  const std::string S = "rellich_scan";
  SuiteResult res;
  res.suite = S;
  const ScaleSchedule sch = practical_schedule(cfg, S);
  const BlockHierarchy h = hierarchy_for(cfg, S, sch);
  const RellichEngine engine(cfg.model, sch, h);
  const Model& model = *cfg.model;
  const int top = std::min(cfg.param<int>(S, "scale", sch.N), h.top());
  const long pairs = cfg.param<long>(S, "pairs", 10000);
  const double slack = cfg.param<double>(S, "slack", 1e-6);
  const double L = model.potential.lipschitz();
  const bool blm = model.potential.boundedness() == Boundedness::BLM;
  res.summary["schedule"] = schedule_json(sch);
  res.summary["scales"] = json::array();

  for (int n = 1; n <= top; ++n) {
    const std::string tag = "n" + std::to_string(n);
    const std::vector<double> grid = make_theta_grid(model, h.block(n), cfg.grid);
    const RellichCurve curve = construct_curve(n, grid, engine, cfg.grid);
    const double spacing = block_spacing(model, h.block(n));
    const bool separated = spacing >= 20.0 * sch.delta_at(n - 1);
    const bool in_regime = curve.out_of_regime_count() == 0;

    Table t{"curve_" + tag, {"theta", "E", "v", "E_minus_v", "in_regime", "second_distance", "step", "step_ok"}, {}};
    double worst_step = -std::numeric_limits<double>::infinity();
    double min_second = std::numeric_limits<double>::infinity();
    double max_dev_v = 0.0;
    bool steps_ok = true;
    for (const auto& p : curve.samples) {
      const double v = site_potential(model, p.theta, Point(model.dim), Side::Right).as_double();
      const ScaleStep& st = p.steps.back();
      worst_step = std::max(worst_step, st.step - sch.step_budget(n));
      min_second = std::min(min_second, st.second_distance);
      steps_ok = steps_ok && st.step_ok;
      if (p.defined) max_dev_v = std::max(max_dev_v, std::abs(p.value - v));
      t.rows.push_back({fmt(p.theta), fmt(p.value), fmt(v), fmt(p.value - v), p.in_regime ? "1" : "0",
                        fmt(st.second_distance), fmt(st.step), st.step_ok ? "1" : "0"});
    }
    res.tables.push_back(std::move(t));
    res.add(tag + ".step_budget", bound(in_regime, steps_ok, -worst_step),
            "|E_n - E_{n-1}| <= budget " + fmt(sch.step_budget(n)));
    const double window = 10.0 * sch.delta_at(n - 1);
    res.add(tag + ".root_isolation", bound(separated, min_second > window, min_second - window),
            "second-nearest eigenvalue beyond 10 delta_{n-1}; block spacing L|x.w| = " + fmt(spacing));
    if (model.epsilon == 0.0) res.add(tag + ".degenerate", bound(true, max_dev_v <= 1e-14, 1e-14 - max_dev_v));

    json sc{{"scale", n},
            {"samples", curve.samples.size()},
            {"block_size", h.block(n).size()},
            {"out_of_regime", curve.out_of_regime_count()},
            {"step_budget_failures", curve.step_budget_failures()},
            {"max_E_minus_v", max_dev_v},
            {"min_second_distance", min_second},
            {"block_spacing", spacing}};

    if (blm) {
      Table jt{"jumps_" + tag, {"beta", "site", "interior", "right", "left_assembled", "left_extrapolated", "jump", "in_regime"}, {}};
      for (const auto& j : curve.jumps)
        jt.rows.push_back({fmt(j.beta), fmt(j.site), j.interior ? "1" : "0", fmt(j.right_value), fmt(j.left_assembled),
                           fmt(j.left_extrapolated), fmt(j.jump), j.in_regime ? "1" : "0"});
      res.tables.push_back(std::move(jt));
      const MonotonicityReport mr = audit_monotonicity(curve, L, slack);
      res.add(tag + ".quotient", bound(in_regime, mr.quotient_ok, mr.min_quotient - (L - slack)), mr.first_violation);
      res.add(tag + ".jumps", bound(in_regime, mr.jumps_ok, mr.min_jump + 1e-10));
      res.add(tag + ".grid_coverage", bound(true, mr.grid_ok, mr.grid_ok ? 1.0 : -1.0));
      sc["min_quotient"] = mr.min_quotient;
      sc["min_jump"] = mr.min_jump;
      sc["branch_switches"] = mr.branch_switches;
      if (pairs > 0) {
        const PairCheck pc = lipschitz_pair_check(engine, n, L, pairs, cfg.seed, slack);
        res.add(tag + ".lipschitz_pairs", bound(in_regime, pc.ok(), pc.worst_margin),
                std::to_string(pc.violations) + " of " + std::to_string(pc.pairs) + " pairs below L(t2 - t1)");
        sc["pair_violations"] = pc.violations;
      }
    } else {
      const UblmReport ur = ublm_continuity_check(curve, engine);
      Table ct{"continuity_" + tag, {"beta", "site", "left_limit", "right_limit", "discrepancy", "cone_distance"}, {}};
      for (const auto& r : ur.records)
        ct.rows.push_back({fmt(r.beta), fmt(r.site), fmt(r.left_limit), fmt(r.right_limit), fmt(r.discrepancy),
                           fmt(r.cone_distance)});
      res.tables.push_back(std::move(ct));
      res.add(tag + ".continuity", bound(in_regime, ur.ok, ur.cont_tol - ur.max_discrepancy),
              "two-sided limits at every beta_x, tolerance " + fmt(ur.cont_tol));
      sc["max_discrepancy"] = ur.max_discrepancy;
      sc["max_cone_distance"] = ur.max_cone_distance;
    }
    res.summary["scales"].push_back(sc);
  }
  return res;
}

SuiteResult suite_msa_verify(const ExperimentConfig& cfg) {
  const std::string S = "msa_verify";
  SuiteResult res;
  res.suite = S;
  const ScaleSchedule sch = practical_schedule(cfg, S);
  const Model& model = *cfg.model;
  ProbeOptions po;
  po.theta_samples = cfg.param<std::size_t>(S, "probe_theta_samples", 64);
  const BlockHierarchy h = build_hierarchy(cfg.model, sch, po);
  const RellichEngine engine(cfg.model, sch, h);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  res.summary["schedule"] = schedule_json(sch);
  res.summary["probe_count"] = 2 + 2 * static_cast<long>(po.theta_samples);

  Table ht{"hierarchy", {"scale", "size", "extended", "premise_ok", "sandwich", "inflating_points", "note"}, {}};
  for (int m = 0; m <= h.top(); ++m) {
    const auto& lg = h.log[static_cast<std::size_t>(m)];
    const bool sw = sandwich_holds(h, sch, m);
    ht.rows.push_back({std::to_string(m), std::to_string(h.block(m).size()), lg.extended ? "1" : "0",
                       lg.premise_ok ? "1" : "0", sw ? "1" : "0", std::to_string(lg.inflating_points.size()), lg.note});
    if (m >= 1) res.add("B" + std::to_string(m) + ".sandwich", bound(lg.premise_ok, sw, sw ? 1.0 : -1.0), lg.note);
  }
  res.tables.push_back(std::move(ht));

  for (int m = 2; m <= h.top(); ++m) {
    const BlockRegularity br = check_block_regularity(engine, m, po);
    const bool premise = h.log[static_cast<std::size_t>(m)].premise_ok;
    res.add("B" + std::to_string(m) + ".regularity",
            bound(premise, br.ok(), -static_cast<double>(br.witnesses.size())),
            std::to_string(br.resonant_points) + " probe resonances over " + std::to_string(br.probe_count) + " probes");
  }

  const std::size_t nest_samples = cfg.param<std::size_t>(S, "nesting_samples", 512);
  std::vector<double> thetas(nest_samples);
  for (std::size_t i = 0; i < nest_samples; ++i) thetas[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(nest_samples);
  for (int m = 1; m <= h.top(); ++m) {
    const NestingReport nr = nesting_check(engine, m, thetas);
    res.add("nesting.m" + std::to_string(m), bound(nr.premise_ok, nr.ok(), -nr.worst_excess),
            std::to_string(nr.violations) + " of " + std::to_string(nr.samples) + " samples");
  }

  // Separation of S_m(theta, E) at E = E_m(theta) on Q_{2 l_{m+1}}.
  const int sep_instances = cfg.param<int>(S, "separation_instances", 8);
  Table st{"separation", {"m", "theta", "E", "points", "min_distance", "required", "holds"}, {}};
  for (int m = 0; m + 1 <= h.top(); ++m) {
    const double dm = sch.delta_at(m);
    const double need = 100.0 * static_cast<double>(sch.length(m + 1));
    const double gamma = model.freq.gamma;
    const bool premise =
        std::pow(model.potential.lipschitz() * gamma / 2.0, 1.0 / model.freq.tau) * std::pow(dm, -1.0 / model.freq.tau) >= need;
    double worst = std::numeric_limits<double>::infinity();
    bool all = true;
    const LatticeSet region = cube(2 * static_cast<long>(sch.length(m + 1)), model.dim);
    for (int i = 0; i < sep_instances; ++i) {
      const double th = unit(rng);
      const double E = engine.value(m, th);
      const SeparationReport sr = separation_check(resonant_set(engine, m, th, Side::Right, E, region), m, sch);
      const long count = static_cast<long>(resonant_set(engine, m, th, Side::Right, E, region).size());
      all = all && sr.holds;
      worst = std::min(worst, sr.min_distance - need);
      st.rows.push_back({std::to_string(m), fmt(th), fmt(E), std::to_string(count), fmt(sr.min_distance), fmt(need),
                         sr.holds ? "1" : "0"});
    }
    res.add("separation.m" + std::to_string(m), bound(premise, all, worst));
  }
  res.tables.push_back(std::move(st));

  // Good-set Green's function sweep with premise-verified instances.
  const int gm = std::min(cfg.param<int>(S, "goodset_scale", 1), h.top());
  const long wanted = cfg.param<long>(S, "goodset_samples", 200);
  const long max_attempts = cfg.param<long>(S, "goodset_max_attempts", 20000);
  const long seed_radius = cfg.param<long>(S, "goodset_seed_radius", 4);
  const double dgm = sch.delta_at(gm);
  Table gt{"goodset", {"theta", "E", "E_star", "size", "norm", "norm_margin", "decay_margin", "status"}, {}};
  long accepted = 0, attempts = 0, passed = 0;
  double worst_norm = std::numeric_limits<double>::infinity(), worst_decay = std::numeric_limits<double>::infinity();
  while (accepted < wanted && attempts < max_attempts) {
    ++attempts;
    const double th = unit(rng);
    const double E = unit(rng);
    const double Es = E + (2.0 * unit(rng) - 1.0) * 0.99 * dgm / 5.0;
    const ResonanceOracle orc = engine_oracle(engine, th, Side::Right, E);
    LatticeSet set = regular_closure(cube(seed_radius, model.dim), gm, h, orc);
    GoodsetReport gr;
    try {
      gr = verify_goodset_greens(set, gm, th, Side::Right, E, Es, engine);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularEnergy) throw;
      continue;
    }
    if (!gr.premise_ok) continue;
    ++accepted;
    const bool ok = gr.norm_check.bound_ok && gr.decay_check.bound_ok;
    passed += ok ? 1 : 0;
    worst_norm = std::min(worst_norm, gr.norm_check.margin);
    worst_decay = std::min(worst_decay, gr.decay_check.margin);
    gt.rows.push_back({fmt(th), fmt(E), fmt(Es), std::to_string(set.size()), fmt(gr.norm), fmt(gr.norm_check.margin),
                       fmt(gr.decay_check.margin), ok ? "ok" : "bound_violated"});
  }
  res.tables.push_back(std::move(gt));
  const double rate = accepted > 0 ? static_cast<double>(passed) / static_cast<double>(accepted) : 0.0;
  res.add("goodset.pass_rate", bound(accepted == wanted, accepted > 0 && rate >= 0.99, rate - 0.99),
          std::to_string(passed) + " of " + std::to_string(accepted) + " premise-verified instances (" +
              std::to_string(attempts) + " attempts) at m = " + std::to_string(gm));
  res.summary["goodset"] = {{"scale", gm}, {"accepted", accepted}, {"attempts", attempts}, {"passed", passed},
                            {"worst_norm_margin", worst_norm}, {"worst_decay_margin", worst_decay}};

  // Sign of the Schur jump on B_{n+1}.
  const int jn = cfg.param<int>(S, "jump_scale", 0);
  const long jumps = cfg.param<long>(S, "jump_instances", 50);
  if (model.potential.boundedness() == Boundedness::BLM && jn + 1 <= h.top() && jumps > 0) {
    const LatticeSet Bo = h.block(jn + 1).without(Point(model.dim));
    Table jt{"jump_audit", {"x", "beta", "z", "case", "in_regime", "det_left", "det_right", "s_diff_direct",
                            "s_diff_formula", "signs_agree"}, {}};
    long in_regime = 0, negative = 0, disagree = 0;
    double worst_product = -std::numeric_limits<double>::infinity();
    for (long i = 0; i < jumps; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, Bo.size() - 1);
      const Point x = Bo[pick(rng)];
      const double beta = reduce_phase(-model.freq.dot(x));
      const double lo = engine.value(jn, beta, Side::Left) - 5.0 * sch.delta_at(jn);
      const double hi = engine.value(jn, beta, Side::Right) + 5.0 * sch.delta_at(jn);
      const double z = lo + (hi - lo) * unit(rng);
      JumpSignAudit a;
      try {
        a = audit_jump_sign(engine, jn, x, z);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMinor) throw;
        continue;
      }
      const auto& ja = a.analysis;
      if (!ja.signs_agree) ++disagree;
      if (a.in_regime) {
        ++in_regime;
        if (ja.det_product_sign() < 0) ++negative;
        worst_product = std::max(worst_product, static_cast<double>(ja.det_product_sign()));
      }
      jt.rows.push_back({fmt(x), fmt(ja.beta), fmt(z), a.case_label, a.in_regime ? "1" : "0", fmt(ja.det_left),
                         fmt(ja.det_right), fmt(ja.s_diff_direct), fmt(ja.s_diff_formula), ja.signs_agree ? "1" : "0"});
    }
    res.tables.push_back(std::move(jt));
    res.add("jump.sign_agreement", bound(true, disagree == 0, -static_cast<double>(disagree)));
    res.add("jump.det_product_negative", bound(in_regime > 0, negative == in_regime, static_cast<double>(negative - in_regime)),
            std::to_string(negative) + " of " + std::to_string(in_regime) + " in-regime instances");
  }
  return res;
}

SuiteResult suite_localize(const ExperimentConfig& cfg) {
  const std::string S = "localize";
  SuiteResult res;
  res.suite = S;
  const Model& model = *cfg.model;
  const long L = cfg.param<long>(S, "L", 500);
  const double theta = cfg.param<double>(S, "theta", 0.3);
  DecayOptions dopt;
  dopt.near_fraction = cfg.param<double>(S, "near_fraction", 0.1);
  const EigenSystem sys = diagonalize_box(L, theta, cfg.model);
  const EigenSystemCheck ec = check_eigensystem(sys);
  res.add("eigensystem.orthonormality", bound(true, ec.orthonormality <= 1e-9, 1e-9 - ec.orthonormality));
  res.add("eigensystem.residual", bound(true, ec.residual <= 1e-9, 1e-9 - ec.residual));

  const std::vector<ProfileRow> rows = decay_profiles(sys, dopt);
  Table t{"decay", {"s", "mu", "centre", "fitted", "rho", "C", "r_squared", "samples_used"}, {}};
  const double lne = model.epsilon > 0 ? std::abs(std::log(model.epsilon)) : std::numeric_limits<double>::infinity();
  const double floor_rate = lne / 400.0;
  long above = 0, fitted = 0;
  std::vector<double> rates;
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.s), fmt(r.mu), fmt(r.centre), r.fitted ? "1" : "0", fmt(r.fitted ? r.fit.rate : NAN),
                      fmt(r.fitted ? r.fit.prefactor : NAN), fmt(r.fitted ? r.fit.r_squared : NAN),
                      std::to_string(r.fitted ? r.fit.samples_used : 0)});
    if (!r.fitted) continue;
    ++fitted;
    rates.push_back(r.fit.rate);
    if (r.fit.rate >= floor_rate) ++above;
  }
  res.tables.push_back(std::move(t));
  const bool eps_ok = model.epsilon > 0.0 && std::isfinite(lne);
  const double frac = rows.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(rows.size());
  const double med = median(rates);
  res.add("decay.floor_fraction", bound(eps_ok, eps_ok && frac >= 0.95, frac - 0.95),
          "share of eigenfunctions with rho >= |ln eps| / 400 = " + fmt(floor_rate));
  res.add("decay.median", bound(eps_ok, eps_ok && med >= 0.5 * lne, med - 0.5 * lne),
          "median rho against |ln eps| / 2");

  // Poisson formula with exact eigenpairs on cubes U whose outer boundary
  // passes through the localization centre of psi_s.
  std::mt19937_64 rng(cfg.seed);
  const int instances = cfg.param<int>(S, "poisson_instances", 20);
  Table pt{"poisson", {"s", "x", "U_centre", "U_radius", "residual", "psi_inf"}, {}};
  double worst = -std::numeric_limits<double>::infinity();
  long skipped = 0;
  for (int i = 0; i < instances && sys.size() > 1; ++i) {
    std::uniform_int_distribution<long> pick_s(0, sys.size() - 1);
    const long s = pick_s(rng);
    const Point c = sys.centre(s);
    std::uniform_int_distribution<long> rad(1, std::max(1L, L / 4));
    const long r = rad(rng);
    Point uc = c;
    uc[0] += (rng() & 1U) ? r + 1 : -(r + 1);
    const LatticeSet U = set_intersection(cube(r, uc), sys.box());
    if (U.empty() || U == sys.box()) {
      ++skipped;
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick_x(0, U.size() - 1);
    const Point x = U[pick_x(rng)];
    const Vector psi = sys.vectors.col(s);
    double resid;
    try {
      resid = poisson_residual(sys.op, psi, sys.values(s), U, x);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularEnergy) throw;
      ++skipped;
      continue;
    }
    const double inf = psi.cwiseAbs().maxCoeff();
    worst = std::max(worst, resid - 1e-8 * inf);
    pt.rows.push_back({std::to_string(s), fmt(x), fmt(c), std::to_string(r), fmt(resid), fmt(inf)});
  }
  const long evaluated = static_cast<long>(pt.rows.size());
  res.tables.push_back(std::move(pt));
  res.add("poisson.residual", bound(evaluated > 0, evaluated > 0 && worst <= 0.0, evaluated > 0 ? -worst : 0.0),
          std::to_string(evaluated) + " evaluated, " + std::to_string(skipped) + " skipped");
  res.summary = {{"L", L}, {"theta", theta}, {"sites", sys.size()}, {"fitted", fitted}, {"above_floor", above},
                 {"floor_rate", floor_rate}, {"median_rate", med}, {"orthonormality", ec.orthonormality},
                 {"residual", ec.residual}};
  return res;
}

SuiteResult suite_edl(const ExperimentConfig& cfg) {
  const std::string S = "edl";
  SuiteResult res;
  res.suite = S;
  const Model& model = *cfg.model;
  const long L = cfg.param<long>(S, "L", 500);
  const double theta = cfg.param<double>(S, "theta", 0.3);
  const long npairs = cfg.param<long>(S, "pairs", 50);
  const long max_dist = cfg.param<long>(S, "max_dist", 100);
  const std::size_t t_count = cfg.param<std::size_t>(S, "t_samples", 64);
  const double t_max = cfg.param<double>(S, "t_max", 1e6);
  const EigenSystem sys = diagonalize_box(L, theta, cfg.model);

  std::vector<double> ts{0.0};
  if (t_count > 2) {
    const auto tail = log_spaced_times(1e-2, t_max, t_count - 1);
    ts.insert(ts.end(), tail.begin(), tail.end());
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::pair<Point, Point>> pairs;
  const long inner = std::max(0L, L / 2);
  const LatticeSet core = cube(inner, model.dim);
  for (long i = 0; i < npairs; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, core.size() - 1);
    const Point x = core[pick(rng)];
    const long dist = npairs > 1 ? (i * std::min(max_dist, L - inner)) / (npairs - 1) : 0;
    // Each step moves one coordinate away from x, so |y|_1 <= |x|_1 + dist <= L.
    Point y = x;
    std::uniform_int_distribution<int> axis(0, model.dim - 1);
    std::bernoulli_distribution sign(0.5);
    for (long k = 0; k < dist; ++k) {
      const int a = axis(rng);
      const long step = y[a] > x[a] ? 1 : y[a] < x[a] ? -1 : (sign(rng) ? 1 : -1);
      y[a] += step;
    }
    pairs.emplace_back(x, y);
  }
  const std::vector<EdlValue> vals = edl_table(sys, pairs, ts);
  Table t{"kernel", {"x", "y", "dist", "sup_sampled", "abs_sum", "spectral_bound"}, {}};
  double worst_point = -std::numeric_limits<double>::infinity(), worst_chain = -std::numeric_limits<double>::infinity();
  std::vector<double> dx, ly;
  for (const auto& v : vals) {
    t.rows.push_back({fmt(v.x), fmt(v.y), std::to_string(v.distance), fmt(v.sup_sampled), fmt(v.abs_sum),
                      fmt(v.spectral_bound)});
    worst_point = std::max(worst_point, v.worst_pointwise);
    worst_chain = std::max(worst_chain, v.abs_sum - v.spectral_bound);
    if (v.distance > 0 && v.spectral_bound > 0) {
      dx.push_back(static_cast<double>(v.distance));
      ly.push_back(std::log(v.spectral_bound));
    }
  }
  res.tables.push_back(std::move(t));
  res.add("edl.pointwise", bound(true, worst_point <= 1e-10, 1e-10 - worst_point),
          "|<e^{itH} e_x, e_y>| <= sum_s |psi_s(x)||psi_s(y)| at every sampled t");
  res.add("edl.chain", bound(true, worst_chain <= 1e-10, 1e-10 - worst_chain),
          "sum_s |psi_s(x)||psi_s(y)| <= spectral bound");
  const double lne = model.epsilon > 0 ? std::abs(std::log(model.epsilon)) : std::numeric_limits<double>::infinity();
  const double rate = dx.size() >= 2 ? -ls_slope(dx, ly) : std::numeric_limits<double>::quiet_NaN();
  const bool eps_ok = model.epsilon > 0.0 && dx.size() >= 2;
  res.add("edl.decay_rate", bound(eps_ok, eps_ok && rate >= lne / 800.0, rate - lne / 800.0),
          "least-squares rate of ln(spectral bound) against |x - y|_1");

  const int usamples = cfg.param<int>(S, "unitarity_samples", 10);
  double worst_unit = 0.0;
  for (int i = 0; i < usamples; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, sys.box().size() - 1);
    std::uniform_real_distribution<double> tt(0.0, t_max);
    const double tval = tt(rng);
    const auto row = propagator_row(sys, sys.box()[pick(rng)], tval);
    worst_unit = std::max(worst_unit, std::abs(row.squaredNorm() - 1.0));
  }
  res.add("edl.unitarity", bound(true, worst_unit <= 1e-9, 1e-9 - worst_unit));
  res.summary = {{"L", L}, {"theta", theta}, {"pairs", vals.size()}, {"t_samples", ts.size()}, {"rate", rate},
                 {"rate_floor", lne / 800.0}, {"unitarity", worst_unit}};
  return res;
}

SuiteResult suite_schur_identities(const ExperimentConfig& cfg) {
  const std::string S = "schur_identities";
  SuiteResult res;
  res.suite = S;
  const long instances = cfg.param<long>(S, "instances", 500);
  const long jumps = cfg.param<long>(S, "jump_instances", 50);
  const int max_sites = cfg.param<int>(S, "max_sites", 12);
  const std::vector<int> dims = cfg.param<std::vector<int>>(S, "dims", {1, 2});
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size_d(2, std::max(2, max_sites));
  std::uniform_int_distribution<std::size_t> dim_pick(0, dims.size() - 1);

  auto random_model = [&](int d) {
    Frequency f = Frequency::golden(d);
    const double eps = cfg.model->epsilon > 0 ? cfg.model->epsilon * (0.5 + unit(rng)) : 0.05 + 0.45 * unit(rng);
    return make_model(d, eps, cfg.model->potential, f);
  };

  Table t{"identity", {"instance", "dim", "sites", "theta", "z_re", "z_im", "relative_residual"}, {}};
  double worst = 0.0;
  for (long i = 0; i < instances; ++i) {
    const int d = dims[dim_pick(rng)];
    const ModelPtr m = random_model(d);
    const LatticeSet box = random_animal(d, static_cast<std::size_t>(size_d(rng)), rng);
    const double theta = unit(rng);
    DirichletOperator op;
    try {
      op = assemble(box, theta, Side::Right, m);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PoleOnLattice) throw;
      --i;
      continue;
    }
    const Vector ev = eigenvalues(op);
    Complex z;
    double gap = 0.0;
    do {
      z = Complex(ev.minCoeff() - 0.5 + (ev.maxCoeff() - ev.minCoeff() + 1.0) * unit(rng),
                  (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.01 + unit(rng)));
      gap = (ev.cast<Complex>().array() - z).abs().minCoeff();
    } while (gap < 1e-3);
    const Point o(d);
    const SchurEvaluation se = schur_complement(op, o, z);
    const SchurSplit sp = split_at(op, o);
    CMatrix A = -op.matrix().cast<Complex>();
    A.diagonal().array() += z;
    CMatrix M = -sp.minor.cast<Complex>();
    M.diagonal().array() += z;
    const Complex dA = A.partialPivLu().determinant();
    const Complex dM = M.rows() > 0 ? M.partialPivLu().determinant() : Complex(1.0);
    const double rel = std::abs(dA - se.s_value * dM) / std::max(std::abs(dA), std::abs(se.s_value * dM));
    worst = std::max(worst, rel);
    t.rows.push_back({std::to_string(i), std::to_string(d), std::to_string(box.size()), fmt(theta), fmt(z.real()),
                      fmt(z.imag()), fmt(rel)});
  }
  res.tables.push_back(std::move(t));
  res.add("schur.determinant_identity", bound(true, worst <= 1e-9, 1e-9 - worst),
          "det(z - H) = s(z) det(z - H_minor) against an LU determinant");

  if (cfg.model->potential.boundedness() == Boundedness::BLM && jumps > 0) {
    Table jt{"jump", {"instance", "dim", "sites", "x", "z", "column_error", "formula_error", "signs_agree",
                      "det_product_sign"}, {}};
    double worst_col = 0.0, worst_formula = 0.0;
    long disagree = 0;
    for (long i = 0; i < jumps; ++i) {
      const int d = dims[dim_pick(rng)];
      const ModelPtr m = random_model(d);
      const LatticeSet box = random_animal(d, static_cast<std::size_t>(std::max(3, size_d(rng))), rng);
      const LatticeSet Bo = box.without(Point(d));
      std::uniform_int_distribution<std::size_t> pick(0, Bo.size() - 1);
      const Point x = Bo[pick(rng)];
      const double z = -0.5 + 2.0 * unit(rng);
      JumpAnalysis ja;
      try {
        ja = jump_analysis(box, Point(d), x, z, m);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMinor) throw;
        --i;
        continue;
      }
      // adj(z - M_R) e_x from an LU solve on the right-limit minor.
      const DirichletOperator right = assemble(box, ja.beta, Side::Right, m);
      const SchurSplit sr = split_at(right, Point(d));
      Matrix AR = -sr.minor;
      AR.diagonal().array() += z;
      const auto lu = AR.partialPivLu();
      Vector ex = Vector::Zero(AR.rows());
      ex(sr.minor_domain.index_of(x)) = 1.0;
      const Vector bR = lu.determinant() * lu.solve(ex);
      const double col = (bR - ja.b_vector).norm() / std::max(1.0, ja.b_vector.norm());
      worst_col = std::max(worst_col, col);
      worst_formula = std::max(worst_formula, ja.formula_error);
      if (!ja.signs_agree) ++disagree;
      jt.rows.push_back({std::to_string(i), std::to_string(d), std::to_string(box.size()), fmt(x), fmt(z), fmt(col),
                         fmt(ja.formula_error), ja.signs_agree ? "1" : "0", std::to_string(ja.det_product_sign())});
    }
    res.tables.push_back(std::move(jt));
    res.add("jump.shared_column", bound(true, worst_col <= 1e-9, 1e-9 - worst_col));
    res.add("jump.formula", bound(true, worst_formula <= 1e-9, 1e-9 - worst_formula));
    res.add("jump.sign_agreement", bound(true, disagree == 0, -static_cast<double>(disagree)));
  }
  res.summary = {{"instances", instances}, {"worst_relative_residual", worst}};
  return res;
}

SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "rellich_scan") return suite_rellich_scan(cfg);
  if (name == "msa_verify") return suite_msa_verify(cfg);
  if (name == "localize") return suite_localize(cfg);
  if (name == "edl") return suite_edl(cfg);
  if (name == "schur_identities") return suite_schur_identities(cfg);
  fail(ErrorCode::Config, "unknown suite '" + name + "'");
}

int run(const std::string& config_path, const RunOptions& options, std::vector<SuiteResult>* results) {
  ExperimentConfig cfg = load_config(config_path);
  if (!options.output_dir.empty()) cfg.output_dir = options.output_dir;
  if (options.jobs >= 0) cfg.jobs = options.jobs;
  if (options.has_seed) cfg.seed = options.seed;
  set_parallel_width(cfg.jobs);
  std::vector<std::string> names = cfg.suites;
  if (!options.suite.empty()) {
    if (std::find(known_suites().begin(), known_suites().end(), options.suite) == known_suites().end())
      fail(ErrorCode::Config, "unknown suite '" + options.suite + "'");
    names = {options.suite};
  }
  std::vector<SuiteResult> out;
  for (const auto& n : names) {
    SuiteResult r;
    try {
      r = run_suite(n, cfg);
    } catch (const std::exception& e) {
      r = SuiteResult{};
      r.suite = n;
      r.error = e.what();
    }
    write_outputs(r, cfg, cfg.output_dir);
    out.push_back(std::move(r));
  }
  const int code = exit_code(out);
  if (results) *results = std::move(out);
  return code;
}

}  // namespace mslab::cli
