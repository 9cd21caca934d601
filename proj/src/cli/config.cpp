#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mslab/cli.hpp"
#include "mslab/error.hpp"

namespace mslab::cli {

namespace {

// 1-based line of the first occurrence of "key" in the source text, or 0.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n')) + 1;
}

class FieldReader {
 public:
  FieldReader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  [[noreturn]] void error(const std::string& field, const std::string& what) const {
    const std::string leaf = field.substr(field.find_last_of('.') + 1);
    const std::size_t line = line_of_key(text_, leaf);
    std::string where = source_;
    if (line > 0) where += ":" + std::to_string(line);
    fail(ErrorCode::Config, where + ": field '" + field + "': " + what);
  }

  const json& require(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object() || !obj.contains(key)) error(path + key, "missing required field");
    return obj.at(key);
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) error(field, "expected a number");
    return v.get<double>();
  }

  long integer(const json& v, const std::string& field) const {
    if (!v.is_number_integer()) error(field, "expected an integer");
    return v.get<long>();
  }

  std::string string(const json& v, const std::string& field) const {
    if (!v.is_string()) error(field, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& field) const {
    if (!v.is_array()) error(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, field));
    return out;
  }

 private:
  const std::string& text_;
  const std::string& source_;
};

Potential parse_potential(const json& node, const FieldReader& r) {
  const std::string type = r.string(r.require(node, "type", "potential."), "potential.type");
  try {
    if (type == "sawtooth") return Potential::sawtooth();
    if (type == "maryland") return Potential::maryland();
    if (type == "piecewise_linear")
      return Potential::piecewise_linear(r.numbers(r.require(node, "breakpoints", "potential."), "potential.breakpoints"),
                                         r.numbers(r.require(node, "values", "potential."), "potential.values"),
                                         r.numbers(r.require(node, "slopes", "potential."), "potential.slopes"));
    if (type == "tabulated")
      return Potential::tabulated(r.numbers(r.require(node, "thetas", "potential."), "potential.thetas"),
                                  r.numbers(r.require(node, "values", "potential."), "potential.values"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    r.error("potential", e.what());
  }
  r.error("potential.type", "unknown potential '" + type + "'");
}

Frequency parse_frequency(const json& node, int dim, const FieldReader& r) {
  Frequency f;
  const bool user = node.is_object() && node.contains("omega");
  if (user) {
    f.omega = r.numbers(node.at("omega"), "frequency.omega");
    if (static_cast<int>(f.omega.size()) != dim) r.error("frequency.omega", "length must equal the dimension");
    f.tau = node.contains("tau") ? r.number(node.at("tau"), "frequency.tau") : dim + 1.0;
  } else {
    f = Frequency::golden(dim);
  }
  if (node.is_object() && node.contains("gamma")) {
    f.gamma = r.number(node.at("gamma"), "frequency.gamma");
    f.provenance = Frequency::Provenance::UserSupplied;
  } else {
    const long radius =
        node.is_object() && node.contains("estimate_radius") ? r.integer(node.at("estimate_radius"), "frequency.estimate_radius") : 50;
    try {
      f = with_estimated_gamma(f, static_cast<int>(radius));
    } catch (const Error& e) {
      r.error("frequency", e.what());
    }
  }
  return f;
}

}  // namespace

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names{"rellich_scan", "msa_verify", "localize", "edl", "schur_identities"};
  return names;
}

ScaleSchedule ExperimentConfig::build_schedule() const {
  if (schedule.regime == Regime::Theoretical)
    return build_schedule_theoretical(model->epsilon, schedule.epsilon0, schedule.N);
  return build_schedule_practical(model->epsilon, schedule.l1, schedule.delta0, schedule.N);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n') + 1;
    fail(ErrorCode::Config, source + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }
  const FieldReader r(text, source);
  if (!doc.is_object()) r.error("<root>", "expected a JSON object");

  static const std::vector<std::string> allowed{"dimension", "potential", "frequency", "epsilon", "schedule",
                                                "theta_grid", "suites", "output_dir", "seed", "jobs", "params"};
  for (const auto& [k, v] : doc.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) r.error(k, "unknown field");

  ExperimentConfig cfg;
  cfg.dim = static_cast<int>(r.integer(r.require(doc, "dimension", ""), "dimension"));
  if (cfg.dim < 1 || cfg.dim > kMaxDimension) r.error("dimension", "must be 1, 2 or 3");

  cfg.potential_spec = r.require(doc, "potential", "");
  const Potential pot = parse_potential(cfg.potential_spec, r);
  cfg.frequency_spec = doc.value("frequency", json::object());
  const Frequency freq = parse_frequency(cfg.frequency_spec, cfg.dim, r);
  const double eps = r.number(r.require(doc, "epsilon", ""), "epsilon");
  if (!(eps >= 0.0)) r.error("epsilon", "must be >= 0");
  try {
    cfg.model = make_model(cfg.dim, eps, pot, freq);
  } catch (const Error& e) {
    r.error("epsilon", e.what());
  }

  const json& sch = r.require(doc, "schedule", "");
  const std::string regime = r.string(r.require(sch, "regime", "schedule."), "schedule.regime");
  cfg.schedule.N = static_cast<int>(r.integer(r.require(sch, "N", "schedule."), "schedule.N"));
  if (cfg.schedule.N < 1) r.error("schedule.N", "must be >= 1");
  if (regime == "theoretical") {
    cfg.schedule.regime = Regime::Theoretical;
    cfg.schedule.epsilon0 = r.number(r.require(sch, "epsilon0", "schedule."), "schedule.epsilon0");
  } else if (regime == "practical") {
    cfg.schedule.regime = Regime::Practical;
    const long l1 = r.integer(r.require(sch, "l1", "schedule."), "schedule.l1");
    if (l1 < 2) r.error("schedule.l1", "must be >= 2");
    cfg.schedule.l1 = static_cast<std::uint64_t>(l1);
    cfg.schedule.delta0 = r.number(r.require(sch, "delta0", "schedule."), "schedule.delta0");
    if (!(cfg.schedule.delta0 > 0.0 && cfg.schedule.delta0 < 1.0)) r.error("schedule.delta0", "must lie in (0, 1)");
  } else {
    r.error("schedule.regime", "expected 'theoretical' or 'practical'");
  }
  try {
    (void)cfg.build_schedule();
  } catch (const Error& e) {
    r.error("schedule", e.what());
  }

  if (doc.contains("theta_grid")) {
    const json& g = doc.at("theta_grid");
    if (!g.is_object()) r.error("theta_grid", "expected an object");
    if (g.contains("samples")) {
      const long s = r.integer(g.at("samples"), "theta_grid.samples");
      if (s < 2) r.error("theta_grid.samples", "must be >= 2");
      cfg.grid.samples = static_cast<std::size_t>(s);
    }
    if (g.contains("offset")) cfg.grid.offset = r.number(g.at("offset"), "theta_grid.offset");
    if (g.contains("pole_margin")) cfg.grid.pole_margin = r.number(g.at("pole_margin"), "theta_grid.pole_margin");
    if (!(cfg.grid.offset > 0.0)) r.error("theta_grid.offset", "must be positive");
    if (!(cfg.grid.pole_margin > 0.0)) r.error("theta_grid.pole_margin", "must be positive");
  }

  const json& suites = r.require(doc, "suites", "");
  if (!suites.is_array() || suites.empty()) r.error("suites", "expected a non-empty array of suite names");
  for (const auto& s : suites) {
    const std::string name = r.string(s, "suites");
    if (std::find(known_suites().begin(), known_suites().end(), name) == known_suites().end())
      r.error("suites", "unknown suite '" + name + "'");
    cfg.suites.push_back(name);
  }

  if (doc.contains("output_dir")) cfg.output_dir = r.string(doc.at("output_dir"), "output_dir");
  if (const char* env = std::getenv("OUTPUT_DIR"); env != nullptr && *env != '\0') cfg.output_dir = env;
  if (doc.contains("seed")) {
    const long s = r.integer(doc.at("seed"), "seed");
    if (s < 0) r.error("seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (doc.contains("jobs")) {
    cfg.jobs = static_cast<int>(r.integer(doc.at("jobs"), "jobs"));
    if (cfg.jobs < 0) r.error("jobs", "must be >= 0");
  }
  if (doc.contains("params")) {
    cfg.params = doc.at("params");
    if (!cfg.params.is_object()) r.error("params", "expected an object keyed by suite name");
    for (const auto& [k, v] : cfg.params.items()) {
      if (std::find(known_suites().begin(), known_suites().end(), k) == known_suites().end())
        r.error("params." + k, "unknown suite");
      if (!v.is_object()) r.error("params." + k, "expected an object");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace mslab::cli
