#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "mslab/operator.hpp"
#include "mslab/report.hpp"
#include "mslab/rellich.hpp"
#include "mslab/schedule.hpp"

namespace mslab::cli {

using json = nlohmann::json;

struct ScheduleSpec {
  Regime regime = Regime::Practical;
  double epsilon0 = 0.0;
  std::uint64_t l1 = 4;
  double delta0 = 0.01;
  int N = 1;
};

struct ExperimentConfig {
  int dim = 1;
  json potential_spec;
  json frequency_spec;
  ModelPtr model;
  ScheduleSpec schedule;
  GridOptions grid;
  std::vector<std::string> suites;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 0;  // 0 keeps the OpenMP default
  json params = json::object();  // per-suite knobs keyed by suite name

  ScaleSchedule build_schedule() const;
  // params[suite][key], or fallback when absent.
  template <class T>
  T param(const std::string& suite, const std::string& key, T fallback) const {
    if (params.contains(suite) && params[suite].contains(key)) return params[suite][key].get<T>();
    return fallback;
  }
};

const std::vector<std::string>& known_suites();

// Throws Error(Config) naming the field, with line:column when known.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct NamedCheck {
  std::string name;
  BoundCheck check;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<NamedCheck> checks;
  json summary = json::object();
  std::vector<Table> tables;
  std::string error;  // non-empty when the suite threw

  void add(const std::string& name, BoundCheck c, const std::string& detail = {}) {
    checks.push_back({name, c, detail});
  }
};

// 17 significant digits; non-finite values written by name.
std::string fmt(double v);
std::string fmt(long v);
std::string fmt(const Point& p);

std::string csv_text(const Table& t);
json check_json(const NamedCheck& c);
json report_json(const SuiteResult& r, const ExperimentConfig& cfg);
json schedule_json(const ScaleSchedule& s);
// Writes <dir>/<suite>_<table>.csv and <dir>/<suite>_report.json; returns file names.
std::vector<std::string> write_outputs(const SuiteResult& r, const ExperimentConfig& cfg, const std::string& dir);

SuiteResult run_suite(const std::string& name, const ExperimentConfig& cfg);

SuiteResult suite_rellich_scan(const ExperimentConfig& cfg);
SuiteResult suite_msa_verify(const ExperimentConfig& cfg);
SuiteResult suite_localize(const ExperimentConfig& cfg);
SuiteResult suite_edl(const ExperimentConfig& cfg);
SuiteResult suite_schur_identities(const ExperimentConfig& cfg);

// 0: every check ok; 2: only premise-violated failures; 1: errors or a
// bound violated under a satisfied premise.
int exit_code(const std::vector<SuiteResult>& results);

struct RunOptions {
  std::string suite;       // empty runs the configured list
  std::string output_dir;  // overrides config and OUTPUT_DIR when non-empty
  int jobs = -1;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

int run(const std::string& config_path, const RunOptions& options, std::vector<SuiteResult>* results = nullptr);

// Fixed-width schedule table for the schedule subcommand.
std::string schedule_table(const ScaleSchedule& s);

}  // namespace mslab::cli
