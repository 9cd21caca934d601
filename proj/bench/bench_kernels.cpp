#include <benchmark/benchmark.h>

#include "mslab/localization.hpp"
#include "mslab/msa.hpp"
#include "mslab/rellich.hpp"
#include "mslab/schur.hpp"

using namespace mslab;

namespace {

ModelPtr saw(int d, double eps) { return make_model(d, eps, Potential::sawtooth(), Frequency::golden(d)); }

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

RellichEngine engine(double eps) {
  const auto m = saw(1, eps);
  const auto s = build_schedule_practical(eps, 4, 0.01, 2);
  return RellichEngine(m, s, BlockHierarchy::cubes(s, 1));
}

void BM_AssembleSpectrum(benchmark::State& state) {
  const auto m = saw(2, 0.1);
  const auto dom = cube(static_cast<long>(state.range(0)), 2);
  for (auto _ : state) {
    const auto sp = spectrum(assemble(dom, 0.37, Side::Right, m));
    benchmark::DoNotOptimize(sp);
  }
  state.SetLabel(std::to_string(dom.size()) + " sites");
}
BENCHMARK(BM_AssembleSpectrum)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SchurRoot(benchmark::State& state) {
  const auto m = saw(1, 1e-3);
  const auto op = assemble(cube(static_cast<long>(state.range(0)), 1), 0.3, Side::Right, m);
  for (auto _ : state) {
    const auto r = try_rellich_root(op, Point{0}, 0.3, 0.05);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SchurRoot)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ConstructCurve(benchmark::State& state) {
  const auto e = engine(1e-3);
  GridOptions g;
  g.samples = 1024;
  const auto grid = make_theta_grid(e.model(), e.hierarchy().block(1), g);
  for (auto _ : state) {
    const auto c = construct_curve(1, grid, e, g, exec_of(state));
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_ConstructCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ResonantScan(benchmark::State& state) {
  const auto e = engine(1e-3);
  const auto region = cube(400, 1);
  for (auto _ : state) {
    const auto r = resonant_scan(e, 1, 0.3, Side::Right, linalg::Complex(0.31), region, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ResonantScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DecayProfiles(benchmark::State& state) {
  const auto sys = diagonalize(cube(200, 1), 0.3, saw(1, 0.05));
  for (auto _ : state) {
    const auto r = decay_profiles(sys, {}, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_DecayProfiles)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EdlTable(benchmark::State& state) {
  const auto sys = diagonalize(cube(200, 1), 0.3, saw(1, 0.05));
  std::vector<std::pair<Point, Point>> pairs;
  for (long k = 0; k < 50; ++k) pairs.emplace_back(Point{-k}, Point{k});
  const auto ts = log_spaced_times(1e-2, 1e4, 32);
  for (auto _ : state) {
    const auto t = edl_table(sys, pairs, ts, exec_of(state));
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_EdlTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
