// simconf: command-line front end for bands, quantiles, threshold curves,
// and the simulation harness.
//
// Exit codes: 0 success, 2 usage or domain error, 3 numerical or
// infeasibility error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "simconf/io.hpp"
#include "simconf/simconf.hpp"

namespace {

using simconf::io::json;

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::optional<simconf::AlphaInterval> parse_restriction(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw simconf::DomainError("--restrict expects A0,A1");
  return simconf::AlphaInterval(simconf::io::parse_number(text.substr(0, comma)),
                                simconf::io::parse_number(text.substr(comma + 1)));
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(simconf::io::parse_number(cell));
  if (out.empty()) throw simconf::DomainError("empty list");
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ':')) parts.push_back(simconf::io::parse_number(cell));
  if (parts.size() != 3) throw simconf::DomainError("--alpha-range expects A0:A1:STEP");
  return simconf::alpha_range(parts[0], parts[1], parts[2]);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    simconf::io::write_file(path, text);
  }
}

struct QuantileArgs {
  std::string statistic = "dw";
  std::size_t m = 0;
  std::string delta = "0.1";
  double nu = 1.5;
  std::size_t reps = 100000;
  std::optional<std::uint64_t> seed;
  std::string restrict;
  bool all_intervals = false;
  unsigned threads = simconf::default_threads();
  std::string out;
};

int run_quantile(const QuantileArgs& a) {
  if (!a.seed) throw simconf::DomainError("quantile: --seed is required");
  simconf::StatisticSpec spec;
  spec.statistic = simconf::parse_statistic(a.statistic);
  spec.m = a.m;
  spec.nu = simconf::NuParam(a.nu);
  spec.restriction = parse_restriction(a.restrict);
  spec.all_intervals = a.all_intervals;
  if (a.reps < 1000) std::cerr << "warning: fewer than 1000 replications\n";
  const auto deltas = parse_list(a.delta);
  const auto table = simconf::mc_quantile_table(spec, deltas, a.reps, *a.seed, a.threads);
  emit(simconf::io::quantile_table_to_json(table).dump(2) + "\n", a.out);
  return 0;
}

struct BandArgs {
  std::string method = "dkw";
  std::string scores;
  double delta = 0.1;
  double nu = 1.5;
  std::string kappa_file;
  std::optional<double> kappa;
  std::string restrict;
  bool one_sided = false;
  bool all_intervals = false;
  std::size_t reps = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = simconf::default_threads();
  std::string out;
  std::string sidecar;
};

// Kappa from --kappa, a quantile-table file, or a fresh simulation.
double resolve_kappa(const BandArgs& a, const simconf::StatisticSpec& spec) {
  if (a.kappa) return *a.kappa;
  if (!a.kappa_file.empty()) {
    const auto table = simconf::io::quantile_table_from_json(json::parse(simconf::io::read_file(a.kappa_file)));
    if (!(table.spec == spec)) {
      throw simconf::DomainError("kappa file was computed for a different statistic, m, nu, or restriction");
    }
    return table.at(a.delta);
  }
  if (!a.seed) throw simconf::DomainError("band: --seed is required when kappa is simulated");
  return simconf::mc_quantile(spec, a.delta, a.reps, *a.seed, a.threads);
}

int run_band(const BandArgs& a) {
  const auto scores = simconf::io::read_scores(a.scores);
  const auto method = simconf::parse_band_method(a.method);
  const auto restriction = parse_restriction(a.restrict);
  if (a.one_sided && method != simconf::BandMethod::kDKW) {
    throw simconf::DomainError("--one-sided applies to the dkw band only");
  }
  if (method == simconf::BandMethod::kDKW) {
    if (restriction) throw simconf::DomainError("dkw band does not take a restriction");
    const auto band = simconf::dkw_band(scores, a.delta,
                                        a.one_sided ? simconf::Sided::kLowerOnly : simconf::Sided::kTwoSided);
    emit(simconf::io::band_to_json(band).dump(2) + "\n", a.out);
    return 0;
  }
  simconf::StatisticSpec spec;
  spec.statistic = simconf::calibrating_statistic(method);
  spec.m = scores.m();
  if (method == simconf::BandMethod::kDW) spec.nu = simconf::NuParam(a.nu);
  if (method == simconf::BandMethod::kRW) {
    if (restriction) throw simconf::DomainError("rw band does not take a restriction");
    spec.all_intervals = a.all_intervals;
  } else {
    spec.restriction = restriction;
  }
  const double kappa = resolve_kappa(a, spec);
  simconf::StepBand band;
  if (method == simconf::BandMethod::kDW) {
    band = simconf::dw_band(scores, a.delta, simconf::NuParam(a.nu), kappa, restriction);
  } else if (method == simconf::BandMethod::kRW) {
    auto res = simconf::rw_band(scores, a.delta, kappa, a.all_intervals);
    if (!a.sidecar.empty()) {
      simconf::io::write_file(a.sidecar, simconf::io::interval_bounds_to_json(res.bounds).dump(2) + "\n");
    }
    band = std::move(res.band);
  } else {
    band = simconf::comparison_band(scores, a.delta, method, kappa, restriction);
  }
  emit(simconf::io::band_to_json(band).dump(2) + "\n", a.out);
  return 0;
}

struct ThresholdArgs {
  std::string band;
  std::string alphas;
  std::string alpha_range;
  std::string out;
};

int run_thresholds(const ThresholdArgs& a) {
  const auto band = simconf::io::band_from_json(json::parse(simconf::io::read_file(a.band)));
  if (a.alphas.empty() == a.alpha_range.empty()) {
    throw simconf::DomainError("thresholds: give exactly one of --alphas and --alpha-range");
  }
  const auto alphas = a.alphas.empty() ? parse_range(a.alpha_range) : parse_list(a.alphas);
  const auto curve = simconf::threshold_curve(band, alphas);
  if (band.has_ties) std::cerr << "warning: ties present; residual and kappa diagnostics assume distinct scores\n";
  emit(simconf::io::format_curve(curve), a.out);
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string csv;
};

int run_simulate(const SimulateArgs& a) {
  auto j = json::parse(simconf::io::read_file(a.config));
  if (a.seed) j["seed"] = *a.seed;
  auto cfg = simconf::io::sim_config_from_json(j);
  if (a.threads) cfg.threads = *a.threads;
  const auto report = simconf::evaluate_methods(cfg);
  emit(simconf::io::report_to_json(report).dump(2) + "\n", a.out);
  if (!a.csv.empty()) simconf::io::write_file(a.csv, simconf::io::report_to_csv(report));
  return 0;
}

struct CompareArgs {
  std::string scores;
  double delta = 0.05;
  double nu = 1.5;
  std::string methods = "dkw,dw,bjo,ad,eicker,rw";
  bool all_intervals = true;
  std::size_t reps = 100000;
  std::optional<std::uint64_t> seed;
  unsigned threads = simconf::default_threads();
  std::string out;
};

int run_compare(const CompareArgs& a) {
  const auto scores = simconf::io::read_scores(a.scores);
  std::vector<std::string> names;
  {
    std::istringstream in(a.methods);
    std::string cell;
    while (std::getline(in, cell, ',')) names.push_back(cell);
  }
  std::vector<simconf::StepBand> bands;
  for (const auto& name : names) {
    const auto method = simconf::parse_band_method(name);
    if (method == simconf::BandMethod::kDKW) {
      bands.push_back(simconf::dkw_band(scores, a.delta));
      continue;
    }
    if (!a.seed) throw simconf::DomainError("compare: --seed is required for simulated quantiles");
    simconf::StatisticSpec spec;
    spec.statistic = simconf::calibrating_statistic(method);
    spec.m = scores.m();
    spec.nu = simconf::NuParam(a.nu);
    spec.all_intervals = a.all_intervals;
    const double kappa = simconf::mc_quantile(spec, a.delta, a.reps, *a.seed, a.threads);
    if (method == simconf::BandMethod::kDW) {
      bands.push_back(simconf::dw_band(scores, a.delta, simconf::NuParam(a.nu), kappa));
    } else if (method == simconf::BandMethod::kRW) {
      bands.push_back(simconf::rw_band(scores, a.delta, kappa, a.all_intervals).band);
    } else {
      bands.push_back(simconf::comparison_band(scores, a.delta, method, kappa));
    }
  }
  std::ostringstream os;
  os << "j,breakpoint";
  for (const auto& name : names) os << ',' << name << "_lower," << name << "_upper";
  os << '\n';
  for (std::size_t j = 0; j <= scores.m(); ++j) {
    os << j << ',' << (j == 0 ? "-inf" : simconf::io::format_number(scores.order_stat(j)));
    for (const auto& b : bands) {
      os << ',' << simconf::io::format_number(b.lower[j]) << ',' << simconf::io::format_number(b.upper[j]);
    }
    os << '\n';
  }
  emit(os.str(), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous PAC conformal thresholds from CDF confidence bands"};
  app.require_subcommand(1);

  QuantileArgs qa;
  auto* q = app.add_subcommand("quantile", "Monte Carlo quantiles of a band statistic");
  q->add_option("--statistic", qa.statistic, "dw|bjo|ad|eicker|ks|rw")->required();
  q->add_option("--m", qa.m, "sample size")->required()->check(CLI::PositiveNumber);
  q->add_option("--delta", qa.delta, "delta or comma-separated list");
  q->add_option("--nu", qa.nu, "DW tuning parameter (> 3/4)");
  q->add_option("--reps", qa.reps, "replications")->check(CLI::PositiveNumber);
  q->add_option("--seed", qa.seed, "root seed");
  q->add_option("--restrict", qa.restrict, "alpha interval A0,A1");
  q->add_flag("--all-intervals", qa.all_intervals, "rw: use every interval");
  q->add_option("--threads", qa.threads, "worker threads");
  q->add_option("--out", qa.out, "output file (default stdout)");

  BandArgs ba;
  auto* b = app.add_subcommand("band", "CDF confidence band over calibration scores");
  b->add_option("--method", ba.method, "dkw|dw|bjo|ad|eicker|rw")->required();
  b->add_option("--scores", ba.scores, "score CSV")->required();
  b->add_option("--delta", ba.delta, "band error level");
  b->add_option("--nu", ba.nu, "DW tuning parameter");
  b->add_option("--kappa-file", ba.kappa_file, "quantile-table JSON");
  b->add_option("--kappa", ba.kappa, "statistic quantile");
  b->add_option("--restrict", ba.restrict, "alpha interval A0,A1");
  b->add_flag("--one-sided", ba.one_sided, "dkw: lower band only");
  b->add_flag("--all-intervals", ba.all_intervals, "rw: use every interval");
  b->add_option("--reps", ba.reps, "replications when kappa is simulated");
  b->add_option("--seed", ba.seed, "root seed when kappa is simulated");
  b->add_option("--threads", ba.threads, "worker threads");
  b->add_option("--out", ba.out, "output file (default stdout)");
  b->add_option("--sidecar", ba.sidecar, "rw: interval bounds JSON");

  ThresholdArgs ta;
  auto* t = app.add_subcommand("thresholds", "threshold curve from a band");
  t->add_option("--band", ta.band, "band JSON")->required();
  t->add_option("--alphas", ta.alphas, "comma-separated alphas");
  t->add_option("--alpha-range", ta.alpha_range, "A0:A1:STEP");
  t->add_option("--out", ta.out, "output file (default stdout)");

  SimulateArgs sa;
  auto* s = app.add_subcommand("simulate", "replication experiment");
  s->add_option("--config", sa.config, "config JSON")->required();
  s->add_option("--seed", sa.seed, "root seed (overrides config)");
  s->add_option("--threads", sa.threads, "worker threads");
  s->add_option("--out", sa.out, "report JSON (default stdout)");
  s->add_option("--csv", sa.csv, "per-alpha CSV");

  CompareArgs ca;
  auto* c = app.add_subcommand("compare", "side-by-side bands");
  c->add_option("--scores", ca.scores, "score CSV")->required();
  c->add_option("--delta", ca.delta, "band error level");
  c->add_option("--nu", ca.nu, "DW tuning parameter");
  c->add_option("--methods", ca.methods, "comma-separated band methods");
  c->add_option("--all-intervals", ca.all_intervals, "rw: use every interval (default true)");
  c->add_option("--reps", ca.reps, "replications");
  c->add_option("--seed", ca.seed, "root seed");
  c->add_option("--threads", ca.threads, "worker threads");
  c->add_option("--out", ca.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*q) return run_quantile(qa);
    if (*b) return run_band(ba);
    if (*t) return run_thresholds(ta);
    if (*s) return run_simulate(sa);
    if (*c) return run_compare(ca);
  } catch (const simconf::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const simconf::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const simconf::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
