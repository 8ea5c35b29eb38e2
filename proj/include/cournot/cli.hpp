#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cournot/scenario.hpp"
#include "cournot/verify.hpp"

namespace cournot {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitNoEquilibrium = 2,
  kExitSolverFailure = 3,
};

enum class OutputFormat { Json, Csv, Table };

/// Throws InvalidArgument for anything but json, csv or table.
OutputFormat parse_format(const std::string& name);

struct SolveOptions {
  /// auto, potential, nlcp or oligopoly
  std::string method = "auto";
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::uint64_t seed = 1;
};

struct ResultReport {
  std::string method;
  std::string status;
  bool verdict = false;
  std::vector<std::string> edge_market;
  std::vector<std::string> edge_firm;
  std::vector<double> quantities;
  std::vector<std::string> market_ids;
  std::vector<double> demands;
  std::vector<double> prices;
  std::vector<std::string> firm_ids;
  std::vector<double> profits;
  /// Average complementarity residual; absent for the integral method.
  std::optional<double> mu;
  std::optional<double> mu0;
  std::size_t iterations = 0;
  std::optional<std::uint64_t> f_evaluations;
  double wall_time_s = 0.0;
  /// Largest unilateral gain found by the post-solve check (continuous methods).
  std::optional<double> max_deviation_gain;

  int exit_code() const;
};

/// separable + integral -> oligopoly; all prices linear -> potential; else nlcp.
std::string auto_method(const ScenarioFile& s);

/// Runs the chosen method and verifies its output. Throws Error for
/// inapplicable methods or bad options.
ResultReport solve_scenario(const ScenarioFile& s, const SolveOptions& opt);

nlohmann::ordered_json report_to_json(const ResultReport& r);
std::string report_to_csv(const ResultReport& r);
std::string report_to_table(const ResultReport& r);
std::string render_report(const ResultReport& r, OutputFormat f);

/// A JSON array, a JSON object with a "quantities" array (a solve report),
/// or whitespace/comma separated numbers.
std::vector<double> parse_quantities_text(const std::string& text);

struct VerifyOutcome {
  std::string mode;  ///< "continuous" or "integral"
  VerificationReport report;
  /// Integral mode: per-market equilibrium flags.
  std::vector<bool> market_ok;
  bool verdict = false;
};

/// Integral scenarios use the discrete Nash check per market, others the
/// numerical best-response check. Throws ShapeMismatch.
VerifyOutcome verify_quantities(const ScenarioFile& s, const std::vector<double>& q, double tol,
                                std::optional<double> gain_tol = std::nullopt);

std::string render_verification(const ScenarioFile& s, const VerifyOutcome& v, OutputFormat f);

struct GenOptions {
  std::uint64_t seed = 1;
  std::size_t n_firms = 2;
  std::size_t n_markets = 2;
  double density = 1.0;
  /// linear, quadratic, cubic or entropy
  std::string family = "linear";
  bool integral = false;
};

/// Deterministic in the options; the edge set is connected.
ScenarioFile generate_scenario(const GenOptions& opt);

struct BenchOptions {
  /// oligopoly, nlcp; an empty list yields only the header.
  std::vector<std::string> suites = {"oligopoly", "nlcp"};
  /// Overrides the suite's default sizes (n for oligopoly, E for nlcp).
  std::vector<std::size_t> sizes;
  std::int64_t q_max = 1'000'000;
  std::uint64_t seed = 1;
  /// 0 reads COURNOT_THREADS, falling back to the hardware concurrency.
  std::size_t threads = 0;
};

struct BenchRow {
  std::string suite;
  std::size_t size = 0;
  std::string method;
  std::size_t iterations = 0;
  std::uint64_t f_evaluations = 0;
  std::int64_t q_max = 0;
  double bound = 0.0;
  double wall_ms = 0.0;
  std::string status;
};

std::vector<BenchRow> run_bench(const BenchOptions& opt);
std::string render_bench(const std::vector<BenchRow>& rows, OutputFormat f);

/// Worker count from COURNOT_THREADS (>= 1), else hardware concurrency.
std::size_t thread_count_from_env();

int cmd_solve(const std::string& scenario_path, const SolveOptions& opt, OutputFormat format,
              const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& scenario_path, const std::string& quantities_path, double tol,
               OutputFormat format, std::ostream& out, std::ostream& err);
int cmd_gen(const GenOptions& opt, const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, OutputFormat format, const std::optional<std::string>& out_path,
              std::ostream& out, std::ostream& err);
int cmd_info(const std::optional<std::string>& scenario_path, std::ostream& out, std::ostream& err);

}  // namespace cournot
