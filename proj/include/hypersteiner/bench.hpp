#pragma once

// Method dispatch and benchmark sweeps producing RED tables.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hypersteiner/baselines.hpp"
#include "hypersteiner/datagen.hpp"
#include "hypersteiner/errors.hpp"
#include "hypersteiner/heuristics.hpp"
#include "hypersteiner/io.hpp"
#include "hypersteiner/random.hpp"
#include "hypersteiner/tree.hpp"

namespace hypersteiner {

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods{"mst", "hs", "rhs", "nj"};
  return methods;
}

struct MethodConfigs {
  RhsConfig rhs{};
  GdConfig nj = nj_gd_config();
};

inline json to_json(const MethodConfigs& c) { return {{"rhs", to_json(c.rhs)}, {"nj", to_json(c.nj)}}; }

/// The MST itself as a result; its RED is exactly zero.
inline SolveResult solve_mst(const std::vector<KleinPoint>& terminals, std::uint64_t seed = 0) {
  const auto start = std::chrono::steady_clock::now();
  if (terminals.size() < 2) throw InputError("mst: needs at least 2 points");
  Tree tree = mst_tree(terminals, {});
  const double length = tree_length(tree);
  return make_result("mst", std::move(tree), length, seed, start);
}

inline SolveResult solve_method(const std::string& method, const std::vector<KleinPoint>& terminals,
                                std::uint64_t seed, const MethodConfigs& configs = {}) {
  if (terminals.size() < 2) throw InputError(method + ": needs at least 2 points");
  if (method == "mst") return solve_mst(terminals, seed);
  if (method == "hs") {
    SolveResult r = hypersteiner::hypersteiner(terminals);
    r.seed = seed;
    return r;
  }
  if (method == "rhs") {
    RhsConfig cfg = configs.rhs;
    cfg.seed = seed;
    return randomized_hypersteiner(terminals, cfg);
  }
  if (method == "nj") {
    if (terminals.size() < 3) throw InputError("nj: needs at least 3 points");
    return nj_embed(terminals, seed, configs.nj);
  }
  throw InputError("unknown method '" + method + "' (expected mst, hs, rhs or nj)");
}

/// Reference line |P| / (2 (|P| - 1)) as a fraction.
inline double reduction_upper_bound(int p_count) {
  if (p_count < 2) throw InputError("reduction_upper_bound: needs at least 2 points");
  return static_cast<double>(p_count) / (2.0 * (p_count - 1));
}

struct BenchConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> methods{"mst", "hs", "rhs", "nj"};
  int trials = 10;
  std::uint64_t master_seed = 0;
  /// Explicit per-trial seeds; when empty they derive from master_seed.
  std::vector<std::uint64_t> seeds;
  MethodConfigs configs{};
  bool artifacts = true;

  std::uint64_t trial_seed(int trial) const {
    return seeds.empty() ? mix_seed(master_seed, static_cast<std::uint64_t>(trial)) : seeds[trial];
  }
};

inline BenchConfig bench_config_from_json(const json& j) {
  detail::reject_unknown(j, {"datasets", "methods", "trials", "master_seed", "seeds", "rhs", "nj", "artifacts"},
                         "bench config");
  BenchConfig c;
  if (!j.contains("datasets") || !j.at("datasets").is_array() || j.at("datasets").empty()) {
    throw InputError("bench config: 'datasets' must be a non-empty array");
  }
  for (const auto& d : j.at("datasets")) c.datasets.push_back(dataset_spec_from_json(d));
  detail::read_field(j, "methods", c.methods);
  detail::read_field(j, "trials", c.trials);
  detail::read_field(j, "master_seed", c.master_seed);
  detail::read_field(j, "seeds", c.seeds);
  detail::read_field(j, "artifacts", c.artifacts);
  if (j.contains("rhs")) c.configs.rhs = rhs_config_from_json(j.at("rhs"));
  if (j.contains("nj")) c.configs.nj = gd_config_from_json(j.at("nj"), nj_gd_config());
  if (c.methods.empty()) throw InputError("bench config: 'methods' must not be empty");
  for (const auto& m : c.methods) {
    bool ok = false;
    for (const auto& k : known_methods()) ok = ok || m == k;
    if (!ok) throw InputError("bench config: unknown method '" + m + "'");
  }
  if (!c.seeds.empty()) c.trials = static_cast<int>(c.seeds.size());
  if (c.trials < 1) throw InputError("bench config: 'trials' must be at least 1");
  return c;
}

inline json to_json(const BenchConfig& c) {
  json datasets = json::array();
  for (const auto& d : c.datasets) datasets.push_back(to_json(d));
  return {{"datasets", datasets}, {"methods", c.methods},         {"trials", c.trials},
          {"master_seed", c.master_seed}, {"seeds", c.seeds}, {"rhs", to_json(c.configs.rhs)},
          {"nj", to_json(c.configs.nj)},  {"artifacts", c.artifacts}};
}

/// Short human-readable description of a dataset, used as the table key.
inline std::string dataset_label(const DatasetSpec& s) {
  char buf[160];
  switch (s.kind) {
    case DatasetKind::centered_gaussian:
      std::snprintf(buf, sizeof buf, "centered_gaussian(sigma=%.12g)", s.sigma);
      break;
    case DatasetKind::boundary_mixture:
      std::snprintf(buf, sizeof buf, "boundary_mixture(d=%d;t=%.12g;sigma=%.12g)", s.d, s.t, s.sigma);
      break;
    case DatasetKind::polygon_one_per_vertex:
      std::snprintf(buf, sizeof buf, "polygon(d=%d;t=%.12g;sigma=%.12g)", s.d, s.t, s.sigma);
      break;
    case DatasetKind::transition_sweep:
      std::snprintf(buf, sizeof buf, "transition_sweep(d=%d;t=%.12g;sigma=%.12g;per_cluster=%d)", s.d, s.t,
                    s.sigma, s.per_cluster);
      break;
    case DatasetKind::file:
      return "file(" + s.path + ")";
  }
  return buf;
}

struct TrialOutcome {
  std::optional<SolveResult> result;
  std::string error;
};

struct BenchRow {
  std::string dataset;
  int p_count = 0;
  std::string method;
  double red_mean = 0.0;
  double red_std = 0.0;
  double time_mean_s = 0.0;
  int trials = 0;
  int errors = 0;
};

struct BenchOutcome {
  BenchConfig config;
  std::vector<BenchRow> rows;
  /// outcomes[dataset][method][trial]
  std::vector<std::vector<std::vector<TrialOutcome>>> outcomes;
};

/// Mean and population standard deviation.
inline std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

inline BenchRow aggregate_row(const std::string& dataset, int p_count, const std::string& method,
                              const std::vector<TrialOutcome>& trials) {
  BenchRow row;
  row.dataset = dataset;
  row.p_count = p_count;
  row.method = method;
  std::vector<double> reds;
  std::vector<double> times;
  for (const auto& t : trials) {
    if (t.result) {
      reds.push_back(t.result->red_percent);
      times.push_back(t.result->wall_time_ms / 1000.0);
    } else {
      ++row.errors;
    }
  }
  row.trials = static_cast<int>(reds.size());
  std::tie(row.red_mean, row.red_std) = mean_std(reds);
  row.time_mean_s = mean_std(times).first;
  return row;
}

/// Runs every (dataset, trial) pair on up to `jobs` threads. Trial k of a
/// dataset is generated with seed trial_seed(k), and every method solves
/// that same point set with the same seed. Failures are recorded per trial.
inline BenchOutcome run_bench(const BenchConfig& config, int jobs = 1) {
  const std::size_t nd = config.datasets.size();
  const std::size_t nm = config.methods.size();
  const std::size_t nt = static_cast<std::size_t>(config.trials);
  BenchOutcome outcome;
  outcome.config = config;
  outcome.outcomes.assign(nd, std::vector<std::vector<TrialOutcome>>(nm, std::vector<TrialOutcome>(nt)));
  std::vector<std::vector<int>> sizes(nd, std::vector<int>(nt, -1));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= nd * nt) return;
      const std::size_t d = task / nt;
      const std::size_t k = task % nt;
      DatasetSpec spec = config.datasets[d];
      spec.seed = config.trial_seed(static_cast<int>(k));
      std::vector<KleinPoint> points;
      std::string gen_error;
      try {
        points = generate(spec);
        sizes[d][k] = static_cast<int>(points.size());
      } catch (const std::exception& e) {
        gen_error = std::string("generate: ") + e.what();
      }
      for (std::size_t m = 0; m < nm; ++m) {
        TrialOutcome& slot = outcome.outcomes[d][m][k];
        if (!gen_error.empty()) {
          slot.error = gen_error;
          continue;
        }
        try {
          slot.result = solve_method(config.methods[m], points, spec.seed, config.configs);
        } catch (const std::exception& e) {
          slot.error = config.methods[m] + ": " + e.what();
        }
      }
    }
  };
  const int threads = std::max(1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t d = 0; d < nd; ++d) {
    int p_count = config.datasets[d].n;
    for (int s : sizes[d]) {
      if (s >= 0) {
        p_count = s;
        break;
      }
    }
    for (std::size_t m = 0; m < nm; ++m) {
      outcome.rows.push_back(
          aggregate_row(dataset_label(config.datasets[d]), p_count, config.methods[m], outcome.outcomes[d][m]));
    }
  }
  return outcome;
}

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "dataset,|P|,method,red_mean,red_std,time_mean_s,trials,errors\n";
  for (const auto& r : rows) {
    out << csv_field(r.dataset) << ',' << r.p_count << ',' << r.method << ',' << csv_number(r.red_mean) << ','
        << csv_number(r.red_std) << ',' << csv_number(r.time_mean_s) << ',' << r.trials << ',' << r.errors
        << '\n';
  }
}

/// Writes the CSV table, a `<stem>.meta.json` sidecar (config echo, trial
/// seeds, reference bounds and error messages) and, when enabled, one
/// result JSON per trial under `<stem>_trials/`.
inline void write_bench(const BenchOutcome& outcome, const std::string& csv_path) {
  namespace fs = std::filesystem;
  const fs::path table(csv_path);
  if (table.has_parent_path()) fs::create_directories(table.parent_path());
  {
    std::ofstream out(table);
    if (!out) throw InputError("cannot write '" + csv_path + "'");
    write_bench_csv(out, outcome.rows);
  }

  const BenchConfig& config = outcome.config;
  json seeds = json::array();
  for (int k = 0; k < config.trials; ++k) seeds.push_back(config.trial_seed(k));
  json rows = json::array();
  std::size_t index = 0;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (std::size_t m = 0; m < config.methods.size(); ++m, ++index) {
      const BenchRow& row = outcome.rows[index];
      json errors = json::array();
      for (int k = 0; k < config.trials; ++k) {
        const auto& t = outcome.outcomes[d][m][k];
        if (!t.result) errors.push_back({{"trial", k}, {"message", t.error}});
      }
      json entry = {{"dataset", row.dataset}, {"dataset_index", d}, {"method", row.method},
                    {"p_count", row.p_count}, {"errors", errors}};
      if (row.p_count >= 2) entry["reduction_upper_bound_percent"] = 100.0 * reduction_upper_bound(row.p_count);
      rows.push_back(entry);
    }
  }
  json meta = {{"config", to_json(config)},
               {"trial_seeds", seeds},
               {"red_std", "population"},
               {"time", "wall clock seconds per trial"},
               {"mixture_allocation", "equal per-cluster counts, remainder to the lowest cluster indices "
                                      "unless random_assignment is set"},
               {"early_stopping", "patience counts epochs without an improvement larger than threshold"},
               {"rows", rows}};
  fs::path meta_path = table;
  meta_path.replace_extension(".meta.json");
  write_json_file(meta_path.string(), meta);

  if (!config.artifacts) return;
  fs::path dir = table.parent_path() / (table.stem().string() + "_trials");
  fs::create_directories(dir);
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      for (int k = 0; k < config.trials; ++k) {
        const auto& t = outcome.outcomes[d][m][k];
        if (!t.result) continue;
        DatasetSpec spec = config.datasets[d];
        spec.seed = config.trial_seed(k);
        const json cfg = {{"dataset", to_json(spec)}, {"methods", to_json(config.configs)}};
        const std::string name =
            "d" + std::to_string(d) + "_" + config.methods[m] + "_t" + std::to_string(k) + ".json";
        write_json_file((dir / name).string(), to_json(*t.result, cfg));
      }
    }
  }
}

}  // namespace hypersteiner
