#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mslab/cli.hpp"
#include "mslab/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mslab: desk-scale multiscale localization experiments"};
  app.require_subcommand(1);

  std::string config;
  mslab::cli::RunOptions opts;
  long long seed = -1;
  CLI::App* run = app.add_subcommand("run", "Run the suites of a JSON experiment config");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  run->add_option("--suite", opts.suite, "Run only this suite");
  run->add_option("--out", opts.output_dir, "Output directory");
  run->add_option("--jobs", opts.jobs, "Parallel width (0 keeps the OpenMP default)")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "RNG seed for random-instance suites")->check(CLI::NonNegativeNumber);

  std::string epsilon0_text;
  std::vector<double> practical;
  int N = 1;
  double epsilon = 0.0;
  CLI::App* sched = app.add_subcommand("schedule", "Print the scale schedule table");
  sched->add_option("epsilon0", epsilon0_text, "epsilon_0 for the theoretical schedule");
  sched->add_option("--practical", practical, "l1 delta0 for a practical schedule")->expected(2);
  sched->add_option("-N", N, "Number of scales")->required()->check(CLI::PositiveNumber);
  sched->add_option("--epsilon", epsilon, "Coupling used for gamma_0 (defaults to epsilon_0 or 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (seed >= 0) {
        opts.has_seed = true;
        opts.seed = static_cast<std::uint64_t>(seed);
      }
      std::vector<mslab::cli::SuiteResult> results;
      const int code = mslab::cli::run(config, opts, &results);
      for (const auto& r : results) {
        long ok = 0, premise = 0, bound = 0;
        for (const auto& c : r.checks) {
          if (c.check.bound_ok)
            ++ok;
          else if (c.check.premise_ok)
            ++bound;
          else
            ++premise;
        }
        std::printf("%-18s ok %ld  premise_violated %ld  bound_violated %ld%s%s\n", r.suite.c_str(), ok, premise,
                    bound, r.error.empty() ? "" : "  error: ", r.error.c_str());
      }
      return code;
    }
    mslab::ScaleSchedule s;
    if (!practical.empty()) {
      if (practical[0] < 2 || practical[0] != static_cast<double>(static_cast<std::uint64_t>(practical[0])))
        throw mslab::Error(mslab::ErrorCode::Config, "--practical l1 must be an integer >= 2");
      s = mslab::build_schedule_practical(epsilon, static_cast<std::uint64_t>(practical[0]), practical[1], N);
    } else {
      if (epsilon0_text.empty()) throw mslab::Error(mslab::ErrorCode::Config, "give epsilon0 or --practical l1 delta0");
      const double e0 = std::stod(epsilon0_text);
      s = mslab::build_schedule_theoretical(sched->count("--epsilon") ? epsilon : e0, e0, N);
    }
    std::cout << mslab::cli::schedule_table(s);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mslab: " << e.what() << "\n";
    return 1;
  }
}
