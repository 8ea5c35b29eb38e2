#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cournot/cli.hpp"
#include "cournot/error.hpp"

using namespace cournot;

int main(int argc, char** argv) {
  CLI::App app{"Pure Nash equilibria of network Cournot competition"};
  app.require_subcommand(1);

  std::string format = "table";
  std::string out_path;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "Solve a scenario file");
  std::string scenario;
  SolveOptions sopt;
  double tol = 0.0;
  std::size_t max_iters = 0;
  solve->add_option("scenario", scenario, "Scenario JSON")->required();
  solve->add_option("--method", sopt.method, "auto, potential, nlcp or oligopoly");
  solve->add_option("--tol", tol, "Solver tolerance");
  solve->add_option("--max-iters", max_iters, "Iteration limit");
  solve->add_option("--seed", seed, "Seed for randomized steps");
  solve->add_option("--out", out_path, "Also write a machine-readable report here");
  solve->add_option("--format", format, "json, csv or table");

  auto* verify = app.add_subcommand("verify", "Check quantities against a scenario");
  std::string quantities;
  double vtol = 1e-6;
  verify->add_option("scenario", scenario, "Scenario JSON")->required();
  verify->add_option("quantities", quantities, "Quantities: JSON array, solve report, or plain numbers")->required();
  verify->add_option("--tol", vtol, "Residual and gain tolerance");
  verify->add_option("--format", format, "json, csv or table");

  auto* gen = app.add_subcommand("gen", "Generate a random scenario");
  GenOptions gopt;
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--firms", gopt.n_firms, "Number of firms");
  gen->add_option("--markets", gopt.n_markets, "Number of markets");
  gen->add_option("--density", gopt.density, "Edge probability in (0, 1]");
  gen->add_option("--family", gopt.family, "linear, quadratic, cubic or entropy");
  gen->add_flag("--integral", gopt.integral, "Integral scenario with separable costs");
  gen->add_option("--out", out_path, "Write the scenario here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Benchmark suites");
  BenchOptions bopt;
  std::vector<std::string> suites;
  bench->add_option("--suite", suites, "oligopoly, nlcp or none (repeatable)");
  bench->add_option("--sizes", bopt.sizes, "Override the suite sizes")->delimiter(',');
  bench->add_option("--qmax", bopt.q_max, "Target total quantity for the oligopoly suite");
  bench->add_option("--seed", seed, "Random seed");
  bench->add_option("--out", out_path, "Also write CSV (or JSON) here");
  bench->add_option("--format", format, "json, csv or table")->default_str("csv");

  auto* info = app.add_subcommand("info", "Version, or a scenario summary");
  std::string info_path;
  info->add_option("scenario", info_path, "Scenario JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const std::optional<std::string> out = out_path.empty() ? std::nullopt : std::optional<std::string>(out_path);
  OutputFormat fmt = OutputFormat::Table;
  try {
    if (bench->parsed() && bench->count("--format") == 0) format = "csv";
    fmt = parse_format(format);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  if (solve->parsed()) {
    if (solve->count("--tol")) sopt.tol = tol;
    if (solve->count("--max-iters")) sopt.max_iters = max_iters;
    sopt.seed = seed;
    return cmd_solve(scenario, sopt, fmt, out, std::cout, std::cerr);
  }
  if (verify->parsed()) return cmd_verify(scenario, quantities, vtol, fmt, std::cout, std::cerr);
  if (gen->parsed()) {
    gopt.seed = seed;
    return cmd_gen(gopt, out, std::cout, std::cerr);
  }
  if (bench->parsed()) {
    if (bench->count("--suite")) {
      bopt.suites.clear();
      for (const auto& s : suites) {
        if (s != "none") bopt.suites.push_back(s);
      }
    }
    bopt.seed = seed;
    return cmd_bench(bopt, fmt, out, std::cout, std::cerr);
  }
  return cmd_info(info_path.empty() ? std::nullopt : std::optional<std::string>(info_path), std::cout, std::cerr);
}
