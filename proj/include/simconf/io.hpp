#pragma once

// File formats: score CSV, probability-matrix CSV, band and quantile-table
// JSON, threshold-curve CSV, simulation config and report.
//
// Infinite values are written as the JSON string "inf"; missing ones as null.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simconf/bands.hpp"
#include "simconf/error.hpp"
#include "simconf/harness.hpp"
#include "simconf/pac.hpp"
#include "simconf/quantile.hpp"
#include "simconf/rwset.hpp"
#include "simconf/scores.hpp"

namespace simconf::io {

using json = nlohmann::ordered_json;

inline json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline double to_number(const json& j) {
  if (j.is_null()) return kMissing;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw DomainError("expected a number, got string \"" + s + "\"");
  }
  if (!j.is_number()) throw DomainError("expected a number");
  return j.get<double>();
}

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline std::vector<double> to_numbers(const json& j) {
  if (!j.is_array()) throw DomainError("expected an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(to_number(e));
  return out;
}

/// Shortest round-trip text for a double; "inf" for +infinity.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline double parse_number(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s == "inf" || s == "+inf" || s == "Inf") return kInf;
  if (s == "-inf" || s == "-Inf") return -kInf;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DomainError("not a number: \"" + text + "\"");
  }
  if (pos != s.size()) throw DomainError("not a number: \"" + text + "\"");
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (!blank) lines.push_back(line);
  }
  return lines;
}

/// One score per line, optional header line "score".
inline ScoreSet parse_scores(const std::string& text) {
  auto lines = lines_of(text);
  std::vector<double> v;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 0 && lines[i].find("score") != std::string::npos) continue;
    v.push_back(parse_number(lines[i]));
  }
  return ScoreSet(std::move(v));
}

inline ScoreSet read_scores(const std::string& path) { return parse_scores(read_file(path)); }

inline std::string format_scores(std::span<const double> scores) {
  std::string out = "score\n";
  for (double s : scores) out += format_number(s) + "\n";
  return out;
}

/// Rows of C comma-separated probabilities.
inline std::vector<ProbVector> parse_prob_matrix(const std::string& text) {
  std::vector<ProbVector> rows;
  std::size_t width = 0;
  for (const auto& line : lines_of(text)) {
    std::vector<double> row;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) row.push_back(parse_number(cell));
    if (width == 0) width = row.size();
    if (row.size() != width) throw DomainError("probability matrix: ragged rows");
    rows.emplace_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Bands

inline json restriction_json(const std::optional<AlphaInterval>& r) {
  if (!r) return nullptr;
  return json::array({r->lo, r->hi});
}

inline std::optional<AlphaInterval> restriction_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2) throw DomainError("restriction must be [lo, hi]");
  return AlphaInterval(j[0].get<double>(), j[1].get<double>());
}

inline json band_to_json(const StepBand& b) {
  json j;
  j["method"] = std::string(to_string(b.method));
  j["m"] = b.m;
  j["delta"] = b.delta.value();
  j["nu"] = b.nu ? json(b.nu->value()) : json(nullptr);
  j["kappa"] = b.kappa ? number(*b.kappa) : json(nullptr);
  j["restriction"] = restriction_json(b.restriction);
  j["sided"] = std::string(to_string(b.sided));
  j["has_ties"] = b.has_ties;
  j["breakpoints"] = numbers(b.breakpoints);
  j["lower"] = numbers(b.lower);
  j["upper"] = numbers(b.upper);
  return j;
}

inline StepBand band_from_json(const json& j) {
  try {
    StepBand b;
    b.method = parse_band_method(j.at("method").get<std::string>());
    b.m = j.at("m").get<std::size_t>();
    b.delta = Prob(j.at("delta").get<double>());
    if (j.contains("nu") && !j["nu"].is_null()) b.nu = NuParam(j["nu"].get<double>());
    if (j.contains("kappa") && !j["kappa"].is_null()) b.kappa = to_number(j["kappa"]);
    if (j.contains("restriction")) b.restriction = restriction_from(j["restriction"]);
    if (j.contains("sided")) b.sided = parse_sided(j["sided"].get<std::string>());
    if (j.contains("has_ties")) b.has_ties = j["has_ties"].get<bool>();
    b.breakpoints = to_numbers(j.at("breakpoints"));
    b.lower = to_numbers(j.at("lower"));
    b.upper = to_numbers(j.at("upper"));
    if (b.breakpoints.size() != b.m || b.lower.size() != b.m + 1 || b.upper.size() != b.m + 1) {
      throw DomainError("band JSON: array lengths do not match m");
    }
    for (std::size_t i = 0; i <= b.m; ++i) {
      if (!(b.lower[i] >= 0.0 && b.lower[i] <= b.upper[i] && b.upper[i] <= 1.0)) {
        throw DomainError("band JSON: need 0 <= lower <= upper <= 1");
      }
      if (i > 0 && (b.lower[i] < b.lower[i - 1] || b.upper[i] < b.upper[i - 1])) {
        throw DomainError("band JSON: bounds must be nondecreasing");
      }
      if (i > 0 && i < b.m && b.breakpoints[i] < b.breakpoints[i - 1]) {
        throw DomainError("band JSON: breakpoints must be sorted");
      }
    }
    return b;
  } catch (const json::exception& e) {
    throw DomainError(std::string("band JSON: ") + e.what());
  }
}

inline json interval_bounds_to_json(const IntervalBounds& b) {
  json j;
  j["n"] = b.family.n;
  j["all_intervals"] = b.family.all_intervals;
  j["l_max"] = b.family.l_max;
  j["kappa"] = number(b.kappa);
  json levels = json::array();
  for (const auto& l : b.family.levels) {
    levels.push_back({{"l", l.l}, {"m_l", l.m_l}, {"d_l", l.d_l}, {"count", l.count}});
  }
  j["levels"] = levels;
  json iv = json::array();
  for (std::size_t i = 0; i < b.family.intervals.size(); ++i) {
    iv.push_back({b.family.intervals[i].first, b.family.intervals[i].second, b.lower[i], b.upper[i]});
  }
  j["intervals"] = iv;  // [j, k, lower, upper]
  return j;
}

// ---------------------------------------------------------------------------
// Quantile tables

inline json quantile_table_to_json(const QuantileTable& t) {
  json j;
  j["statistic"] = std::string(to_string(t.spec.statistic));
  j["m"] = t.spec.m;
  j["nu"] = t.spec.statistic == Statistic::kDW ? json(t.spec.nu_value()) : json(nullptr);
  j["restriction"] = restriction_json(t.spec.restriction);
  j["all_intervals"] = t.spec.all_intervals;
  j["reps"] = t.reps;
  j["seed"] = t.seed;
  json e = json::array();
  for (const auto& [d, k] : t.entries) e.push_back({{"delta", d}, {"kappa", number(k)}});
  j["entries"] = e;
  return j;
}

inline QuantileTable quantile_table_from_json(const json& j) {
  try {
    QuantileTable t;
    t.spec.statistic = parse_statistic(j.at("statistic").get<std::string>());
    t.spec.m = j.at("m").get<std::size_t>();
    if (j.contains("nu") && !j["nu"].is_null()) t.spec.nu = NuParam(j["nu"].get<double>());
    if (j.contains("restriction")) t.spec.restriction = restriction_from(j["restriction"]);
    if (j.contains("all_intervals")) t.spec.all_intervals = j["all_intervals"].get<bool>();
    t.reps = j.at("reps").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("entries")) t.entries[e.at("delta").get<double>()] = to_number(e.at("kappa"));
    return t;
  } catch (const json::exception& e) {
    throw DomainError(std::string("quantile table JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Threshold curves

inline std::string curve_csv_header() {
  return "alpha,method,j_alpha,q_hat,slack,band_width,r_bound,kappa_alpha\n";
}

inline std::string format_curve_rows(const ThresholdCurve& c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) {
    os << format_number(c.alphas[i]) << ',' << to_string(c.method) << ',';
    if (c.finite(i)) os << c.j_alpha[i]; else os << "NA";
    os << ',' << format_number(c.q_hat[i]) << ',' << format_number(c.slack[i]) << ','
       << format_number(c.band_width[i]) << ',' << format_number(c.r_bound[i]) << ','
       << format_number(c.kappa_alpha[i]) << '\n';
  }
  return os.str();
}

inline std::string format_curve(const ThresholdCurve& c) { return curve_csv_header() + format_curve_rows(c); }

// ---------------------------------------------------------------------------
// Simulation config and report

inline SimConfig sim_config_from_json(const json& j) {
  try {
    SimConfig c;
    if (j.contains("mode")) {
      const auto m = j["mode"].get<std::string>();
      if (m == "uniform") c.mode = HarnessMode::kUniform;
      else if (m == "simulation") c.mode = HarnessMode::kSimulation;
      else throw DomainError("config: mode must be uniform or simulation");
    }
    if (j.contains("score_model")) {
      const auto m = j["score_model"].get<std::string>();
      if (m == "knn") c.score_model = ScoreModel::kKnn;
      else if (m == "oracle") c.score_model = ScoreModel::kOracle;
      else throw DomainError("config: score_model must be knn or oracle");
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    get("n_train", c.n_train);
    get("n_cal", c.n_cal);
    get("n_test", c.n_test);
    get("reps", c.reps);
    get("delta", c.delta);
    get("alpha_grid", c.alpha_grid);
    get("methods", c.methods);
    get("restrict_statistic", c.restrict_statistic);
    get("k", c.k);
    get("nu", c.nu);
    get("mc_reps", c.mc_reps);
    get("threads", c.threads);
    if (j.contains("alpha_range")) {
      const auto r = j["alpha_range"];
      c.alpha_grid = alpha_range(r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>());
    }
    if (j.contains("restriction")) c.restriction = restriction_from(j["restriction"]);
    if (!j.contains("seed")) throw DomainError("config: seed is required");
    c.seed = j["seed"].get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw DomainError(std::string("config JSON: ") + e.what());
  }
}

inline json sim_config_to_json(const SimConfig& c) {
  json j;
  j["mode"] = c.mode == HarnessMode::kUniform ? "uniform" : "simulation";
  j["score_model"] = c.score_model == ScoreModel::kKnn ? "knn" : "oracle";
  j["n_train"] = c.n_train;
  j["n_cal"] = c.n_cal;
  j["n_test"] = c.n_test;
  j["reps"] = c.reps;
  j["delta"] = c.delta;
  j["alpha_grid"] = c.alpha_grid;
  j["methods"] = c.methods;
  j["seed"] = c.seed;
  j["restriction"] = restriction_json(c.restriction);
  j["restrict_statistic"] = c.restrict_statistic;
  j["k"] = c.k;
  j["nu"] = c.nu;
  j["mc_reps"] = c.mc_reps;
  return j;
}

inline json report_to_json(const EvalReport& r) {
  json j;
  j["config"] = sim_config_to_json(r.config);
  j["alphas"] = r.alphas;
  json kappa = json::object();
  for (const auto& [k, v] : r.kappa) kappa[k] = number(v);
  j["kappa"] = kappa;
  json methods = json::array();
  for (const auto& m : r.methods) {
    json mj;
    mj["method"] = m.method;
    mj["simultaneity_rate"] = m.simultaneity_rate;
    mj["simultaneous_count"] = m.simultaneous_count;
    mj["simultaneous"] = m.simultaneous;
    mj["mean_coverage"] = numbers(m.mean_coverage);
    mj["sd_coverage"] = numbers(m.sd_coverage);
    mj["mean_width"] = numbers(m.mean_width);
    mj["width_ratio"] = numbers(m.width_ratio);
    mj["mean_q_hat"] = numbers(m.mean_q_hat);
    methods.push_back(mj);
  }
  j["methods"] = methods;
  return j;
}

/// Long-format per-alpha table for plotting.
inline std::string report_to_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "method,alpha,mean_coverage,sd_coverage,mean_width,width_ratio,mean_q_hat,simultaneity_rate\n";
  for (const auto& m : r.methods) {
    for (std::size_t a = 0; a < r.alphas.size(); ++a) {
      os << m.method << ',' << format_number(r.alphas[a]) << ',' << format_number(m.mean_coverage[a])
         << ',' << format_number(m.sd_coverage[a]) << ',' << format_number(m.mean_width[a]) << ','
         << format_number(m.width_ratio[a]) << ',' << format_number(m.mean_q_hat[a]) << ','
         << format_number(m.simultaneity_rate) << '\n';
    }
  }
  return os.str();
}

}  // namespace simconf::io
