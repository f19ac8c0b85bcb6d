#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hypersteiner/hypersteiner.hpp"

namespace hs = hypersteiner;

namespace {

int cmd_generate(const std::string& spec_path, const std::string& out_path, std::optional<std::uint64_t> seed) {
  hs::DatasetSpec spec = hs::dataset_spec_from_json(hs::read_json_file(spec_path));
  if (seed) spec.seed = *seed;
  const auto points = hs::generate(spec);
  std::ofstream out(out_path);
  if (!out) throw hs::InputError("cannot write '" + out_path + "'");
  hs::write_points_csv(out, points);
  std::cerr << "wrote " << points.size() << " points to " << out_path << '\n';
  return 0;
}

int cmd_solve(const std::string& input, const std::string& method, std::uint64_t seed, const std::string& out_path,
              const std::string& config_path, bool poincare) {
  const auto points = hs::read_points_csv(input, poincare);
  hs::MethodConfigs configs;
  if (!config_path.empty()) {
    const hs::json cfg = hs::read_json_file(config_path);
    hs::detail::reject_unknown(cfg, {"rhs", "nj"}, "solve config");
    if (cfg.contains("rhs")) configs.rhs = hs::rhs_config_from_json(cfg.at("rhs"));
    if (cfg.contains("nj")) configs.nj = hs::gd_config_from_json(cfg.at("nj"), hs::nj_gd_config());
  }
  hs::SolveResult result;
  try {
    result = hs::solve_method(method, points, seed, configs);
  } catch (const hs::InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw hs::Error("solver stage '" + method + "' failed: " + e.what());
  }
  hs::json echo = {{"input", input}, {"poincare", poincare}, {"method", method}};
  if (method == "rhs") echo["rhs"] = hs::to_json(configs.rhs);
  if (method == "nj") echo["nj"] = hs::to_json(configs.nj);
  hs::write_json_file(out_path, hs::to_json(result, echo));
  std::cerr << method << ": length " << result.length << ", RED " << result.red_percent << "%, "
            << result.tree.steiner.size() << " Steiner points\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_path, int jobs) {
  const hs::BenchConfig config = hs::bench_config_from_json(hs::read_json_file(config_path));
  const hs::BenchOutcome outcome = hs::run_bench(config, jobs);
  hs::write_bench(outcome, out_path);
  hs::write_bench_csv(std::cout, outcome.rows);
  int errors = 0;
  for (const auto& row : outcome.rows) errors += row.errors;
  if (errors > 0) std::cerr << errors << " trial(s) failed; see the .meta.json sidecar\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& out_path, bool show_dt) {
  const hs::SolveResult result = hs::result_from_json(hs::read_json_file(input));
  hs::RenderOptions opts;
  opts.show_dt = show_dt;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw hs::InputError("cannot write '" + out_path + "'");
  out << hs::render_svg(result.tree, opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic Steiner minimal trees in the Klein disk"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "Sample a synthetic point set");
  std::string spec_path;
  std::string gen_out;
  std::optional<std::uint64_t> gen_seed;
  generate->add_option("--spec", spec_path, "Dataset spec JSON")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", gen_out, "Output CSV")->required();
  generate->add_option("--seed", gen_seed, "Override the dataset seed");

  auto* solve = app.add_subcommand("solve", "Build a tree over a point file");
  std::string solve_input;
  std::string method = "rhs";
  std::uint64_t seed = 0;
  std::string solve_out;
  std::string solve_config;
  bool poincare = false;
  solve->add_option("--input", solve_input, "Point CSV with header x,y")->required()->check(CLI::ExistingFile);
  solve->add_option("--method", method, "mst, hs, rhs or nj")
      ->check(CLI::IsMember({"mst", "hs", "rhs", "nj"}));
  solve->add_option("--seed", seed, "Solver seed");
  solve->add_option("--out", solve_out, "Result JSON")->required();
  solve->add_option("--config", solve_config, "JSON with optional 'rhs' and 'nj' overrides")
      ->check(CLI::ExistingFile);
  solve->add_flag("--poincare", poincare, "Input holds Poincare-disk coordinates");

  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep and write a RED table");
  std::string bench_config;
  std::string bench_out;
  int jobs = 1;
  bench->add_option("--config", bench_config, "Bench config JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Output CSV")->required();
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* render = app.add_subcommand("render", "Draw a result as SVG");
  std::string render_input;
  std::string render_out;
  bool show_dt = false;
  render->add_option("--input", render_input, "Result JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "Output SVG")->required();
  render->add_flag("--show-dt", show_dt, "Overlay the Delaunay triangulation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(spec_path, gen_out, gen_seed);
    if (*solve) return cmd_solve(solve_input, method, seed, solve_out, solve_config, poincare);
    if (*bench) return cmd_bench(bench_config, bench_out, jobs);
    if (*render) return cmd_render(render_input, render_out, show_dt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
