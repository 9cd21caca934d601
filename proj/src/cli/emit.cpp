#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "mslab/cli.hpp"
#include "mslab/error.hpp"

namespace mslab::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(long v) { return std::to_string(v); }

std::string fmt(const Point& p) {
  std::string s;
  for (int i = 0; i < p.dim(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p[i]);
  }
  return s;
}

namespace {

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Replaces non-finite numbers, which JSON cannot carry.
json sanitize(const json& j) {
  if (j.is_number_float()) return number_json(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = sanitize(*it);
    return out;
  }
  return j;
}

}  // namespace

std::string csv_text(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + csv_field(t.header[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

json check_json(const NamedCheck& c) {
  json j{{"name", c.name},
         {"premise_ok", c.check.premise_ok},
         {"bound_ok", c.check.bound_ok},
         {"margin", number_json(c.check.margin)},
         {"status", c.check.status()}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

json schedule_json(const ScaleSchedule& s) {
  json l = json::array(), d = json::array(), g = json::array(), tb = json::array();
  for (auto v : s.l) l.push_back(v);
  for (auto v : s.delta) d.push_back(number_json(v));
  for (auto v : s.gamma) g.push_back(number_json(v));
  for (auto v : s.tolerance_budget) tb.push_back(number_json(v));
  return json{{"regime", to_string(s.regime)},
              {"epsilon", number_json(s.epsilon)},
              {"epsilon0", number_json(s.epsilon0)},
              {"delta0", number_json(s.delta0)},
              {"N", s.N},
              {"l", l},
              {"delta", d},
              {"gamma", g},
              {"gamma_inf", number_json(s.gamma_inf)},
              {"tolerance_budget", tb},
              {"rate_ok", s.rate_ok},
              {"lengths_increasing", s.lengths_increasing},
              {"delta_decreasing", s.delta_decreasing},
              {"gamma_nonincreasing", s.gamma_nonincreasing}};
}

json report_json(const SuiteResult& r, const ExperimentConfig& cfg) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  long ok = 0, premise = 0, bound = 0;
  for (const auto& c : r.checks) {
    if (c.check.bound_ok)
      ++ok;
    else if (c.check.premise_ok)
      ++bound;
    else
      ++premise;
  }
  json j{{"suite", r.suite},
         {"generated_at", utc_timestamp()},
         {"config",
          {{"dimension", cfg.dim},
           {"potential", cfg.potential_spec},
           {"frequency", cfg.frequency_spec},
           {"omega", cfg.model->freq.omega},
           {"gamma", number_json(cfg.model->freq.gamma)},
           {"tau", cfg.model->freq.tau},
           {"epsilon", number_json(cfg.model->epsilon)},
           {"seed", cfg.seed}}},
         {"checks", checks},
         {"counts", {{"ok", ok}, {"premise_violated", premise}, {"bound_violated", bound}}},
         {"summary", sanitize(r.summary)}};
  if (!r.error.empty()) j["error"] = r.error;
  json files = json::array();
  for (const auto& t : r.tables) files.push_back(r.suite + "_" + t.name + ".csv");
  j["tables"] = files;
  return j;
}

std::vector<std::string> write_outputs(const SuiteResult& r, const ExperimentConfig& cfg, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Config, "cannot create output directory " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const std::filesystem::path p = std::filesystem::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorCode::Config, "cannot write " + p.string());
    out << body;
    written.push_back(p.string());
  };
  for (const auto& t : r.tables) put(r.suite + "_" + t.name + ".csv", csv_text(t));
  put(r.suite + "_report.json", report_json(r, cfg).dump(2) + "\n");
  return written;
}

int exit_code(const std::vector<SuiteResult>& results) {
  bool premise_only = false;
  for (const auto& r : results) {
    if (!r.error.empty()) return 1;
    for (const auto& c : r.checks) {
      if (c.check.violated_with_premise()) return 1;
      if (!c.check.bound_ok) premise_only = true;
    }
  }
  return premise_only ? 2 : 0;
}

std::string schedule_table(const ScaleSchedule& s) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "regime %s  epsilon %.6g  epsilon0 %.6g  delta0 %.6g  N %d\n",
                to_string(s.regime).c_str(), s.epsilon, s.epsilon0, s.delta0, s.N);
  out += buf;
  std::snprintf(buf, sizeof buf, "%3s %22s %24s %24s %24s\n", "n", "l_n", "delta_n", "gamma_n", "sum delta_k");
  out += buf;
  for (int n = 0; n <= s.N; ++n) {
    const std::string ln = n == 0 ? "-" : std::to_string(s.length(n));
    std::snprintf(buf, sizeof buf, "%3d %22s %24.17g %24.17g %24.17g\n", n, ln.c_str(), s.delta_at(n), s.gamma_at(n),
                  s.tolerance_budget[static_cast<std::size_t>(n)]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "gamma_inf %.17g\n", s.gamma_inf);
  out += buf;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  std::snprintf(buf, sizeof buf, "rate condition (gamma_inf >= gamma_0/2 >= 10): %s\n", yn(s.rate_ok));
  out += buf;
  std::snprintf(buf, sizeof buf, "l increasing: %s  delta decreasing: %s  gamma non-increasing: %s\n",
                yn(s.lengths_increasing), yn(s.delta_decreasing), yn(s.gamma_nonincreasing));
  out += buf;
  return out;
}

}  // namespace mslab::cli
