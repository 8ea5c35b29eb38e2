#include "cournot/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "cournot/error.hpp"
#include "cournot/nlcp.hpp"
#include "cournot/potential.hpp"

namespace cournot {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string machine(double x) { return fmt(x, 12); }
std::string human(double x) { return fmt(x, 4); }

json rounded(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(round_sig12(x));
  return a;
}

// Left-aligned columns separated by two spaces.
std::string columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << line << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, path + ": cannot write file");
  out << text;
}

int report_error(std::ostream& err, const std::exception& e) {
  if (const auto* ce = dynamic_cast<const Error*>(&e)) {
    err << "error: " << to_string(ce->code()) << ": " << ce->what() << '\n';
  } else {
    err << "error: " << e.what() << '\n';
  }
  return kExitInput;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_labels(const ScenarioFile& s, ResultReport& r) {
  for (const Edge& e : s.edges) {
    r.edge_market.push_back(s.market_ids[e.market]);
    r.edge_firm.push_back(s.firm_ids[e.firm]);
  }
  r.market_ids = s.market_ids;
  r.firm_ids = s.firm_ids;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

ResultReport solve_continuous(const ScenarioFile& s, const std::string& method, const SolveOptions& opt) {
  const MarketNetwork net = s.network();
  EquilibriumResult res;
  if (method == "potential") {
    SolverConfig cfg;
    if (opt.tol) cfg.tol = *opt.tol;
    if (opt.max_iters) cfg.max_iters = *opt.max_iters;
    cfg.seed = opt.seed;
    res = solve_potential(PotentialProblem(net), cfg);
  } else {
    NcpConfig cfg;
    if (opt.tol) cfg.epsilon = *opt.tol;
    if (opt.max_iters) cfg.max_iters = *opt.max_iters;
    if (s.q_cap) cfg.q_cap = static_cast<double>(*s.q_cap);
    res = solve_ncp(NcpProblem(net), cfg);
  }
  ResultReport r;
  r.method = method;
  r.status = std::string(to_string(res.status));
  fill_labels(s, r);
  r.quantities = to_std(res.q);
  r.demands = to_std(res.demands);
  r.prices = to_std(res.prices);
  r.profits = to_std(res.profits);
  r.mu = res.mu;
  if (method == "nlcp") r.mu0 = res.mu0;
  r.iterations = res.iterations;

  const double vtol = std::max(1e-6, opt.tol.value_or(0.0));
  const VerificationReport check = best_response_check(net, res.q, vtol, vtol);
  r.max_deviation_gain = check.max_gain();
  r.verdict = check.verdict;
  return r;
}

ResultReport solve_integral(const ScenarioFile& s) {
  const std::vector<MarketOligopoly> parts = scenario_oligopolies(s);
  ResultReport r;
  r.method = "oligopoly";
  fill_labels(s, r);
  r.quantities.assign(s.edges.size(), 0.0);
  r.demands.assign(s.market_ids.size(), 0.0);
  r.prices.assign(s.market_ids.size(), 0.0);
  std::uint64_t evals = 0;
  bool found = true;
  bool verified = true;
  for (const auto& part : parts) {
    const OligopolySolution sol = solve_oligopoly(part.oligopoly);
    evals += sol.f_evaluations;
    r.iterations += sol.outer_iterations;
    if (!sol.found()) {
      found = false;
      continue;
    }
    for (std::size_t k = 0; k < part.edges.size(); ++k) r.quantities[part.edges[k]] = static_cast<double>((*sol.quantities)[k]);
    verified = verified && is_integral_equilibrium(part.oligopoly, *sol.quantities);
    r.demands[part.market] = static_cast<double>(sol.total);
    r.prices[part.market] = part.oligopoly.price(sol.total);
  }
  r.f_evaluations = evals;

  // Profits from the integral prices; the costs agree with their continuous form at integers.
  std::vector<std::vector<double>> strategy(s.firm_ids.size());
  r.profits.assign(s.firm_ids.size(), 0.0);
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    strategy[s.edges[e].firm].push_back(r.quantities[e]);
    r.profits[s.edges[e].firm] += r.prices[s.edges[e].market] * r.quantities[e];
  }
  for (std::size_t j = 0; j < s.firm_ids.size(); ++j) {
    const auto& sj = strategy[j];
    r.profits[j] -= s.costs[j].value(Eigen::Map<const Eigen::VectorXd>(sj.data(), static_cast<Eigen::Index>(sj.size())));
  }
  r.status = found ? "converged" : "no_equilibrium";
  r.verdict = found && verified;
  return r;
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "table") return OutputFormat::Table;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + name + "' (json, csv, table)");
}

int ResultReport::exit_code() const {
  if (status == "no_equilibrium") return kExitNoEquilibrium;
  if (status == "converged" && verdict) return kExitOk;
  return kExitSolverFailure;
}

std::string auto_method(const ScenarioFile& s) {
  if (s.integral && is_separable(s)) return "oligopoly";
  if (s.has_table_price()) {
    throw Error(ErrorCode::MethodInapplicable, "table prices need separable costs for the integral method");
  }
  bool linear = true;
  for (const auto& p : s.prices) linear = linear && std::get<PriceFunction>(p).is_linear();
  return linear ? "potential" : "nlcp";
}

ResultReport solve_scenario(const ScenarioFile& s, const SolveOptions& opt) {
  const std::string method = opt.method == "auto" ? auto_method(s) : opt.method;
  if (method != "potential" && method != "nlcp" && method != "oligopoly") {
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + opt.method + "' (auto, potential, nlcp, oligopoly)");
  }
  if (opt.tol && !(*opt.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
  if (opt.max_iters && *opt.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "--max-iters must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  ResultReport r = method == "oligopoly" ? solve_integral(s) : solve_continuous(s, method, opt);
  r.wall_time_s = elapsed_s(start);
  return r;
}

json report_to_json(const ResultReport& r) {
  json doc;
  doc["schema_version"] = 1;
  doc["method"] = r.method;
  doc["status"] = r.status;
  doc["verdict"] = r.verdict;
  doc["iterations"] = r.iterations;
  if (r.f_evaluations) doc["f_evaluations"] = *r.f_evaluations;
  doc["mu"] = r.mu ? json(round_sig12(*r.mu)) : json(nullptr);
  if (r.mu0) doc["mu0"] = round_sig12(*r.mu0);
  if (r.max_deviation_gain) doc["max_deviation_gain"] = round_sig12(*r.max_deviation_gain);
  doc["wall_time_s"] = round_sig12(r.wall_time_s);
  doc["quantities"] = rounded(r.quantities);
  json edges = json::array();
  for (std::size_t e = 0; e < r.quantities.size(); ++e) {
    edges.push_back({{"market", r.edge_market[e]}, {"firm", r.edge_firm[e]}, {"q", round_sig12(r.quantities[e])}});
  }
  doc["edges"] = edges;
  json markets = json::array();
  for (std::size_t i = 0; i < r.market_ids.size(); ++i) {
    markets.push_back({{"id", r.market_ids[i]}, {"demand", round_sig12(r.demands[i])}, {"price", round_sig12(r.prices[i])}});
  }
  doc["markets"] = markets;
  json firms = json::array();
  for (std::size_t j = 0; j < r.firm_ids.size(); ++j) {
    firms.push_back({{"id", r.firm_ids[j]}, {"profit", round_sig12(r.profits[j])}});
  }
  doc["firms"] = firms;
  return doc;
}

std::string report_to_csv(const ResultReport& r) {
  std::ostringstream os;
  os << "section,key,value\n";
  os << "meta,method," << r.method << '\n';
  os << "meta,status," << r.status << '\n';
  os << "meta,verdict," << (r.verdict ? "true" : "false") << '\n';
  os << "meta,iterations," << r.iterations << '\n';
  if (r.f_evaluations) os << "meta,f_evaluations," << *r.f_evaluations << '\n';
  if (r.mu) os << "meta,mu," << machine(*r.mu) << '\n';
  if (r.mu0) os << "meta,mu0," << machine(*r.mu0) << '\n';
  if (r.max_deviation_gain) os << "meta,max_deviation_gain," << machine(*r.max_deviation_gain) << '\n';
  os << "meta,wall_time_s," << machine(r.wall_time_s) << '\n';
  for (std::size_t e = 0; e < r.quantities.size(); ++e) {
    os << "quantity," << r.edge_market[e] << ':' << r.edge_firm[e] << ',' << machine(r.quantities[e]) << '\n';
  }
  for (std::size_t i = 0; i < r.market_ids.size(); ++i) {
    os << "demand," << r.market_ids[i] << ',' << machine(r.demands[i]) << '\n';
    os << "price," << r.market_ids[i] << ',' << machine(r.prices[i]) << '\n';
  }
  for (std::size_t j = 0; j < r.firm_ids.size(); ++j) os << "profit," << r.firm_ids[j] << ',' << machine(r.profits[j]) << '\n';
  return os.str();
}

std::string report_to_table(const ResultReport& r) {
  std::vector<std::vector<std::string>> head = {
      {"method", r.method},
      {"status", r.status},
      {"verdict", r.verdict ? "verified equilibrium" : "not verified"},
      {"iterations", std::to_string(r.iterations)},
  };
  if (r.f_evaluations) head.push_back({"f evaluations", std::to_string(*r.f_evaluations)});
  if (r.mu) head.push_back({"mu", human(*r.mu)});
  if (r.max_deviation_gain) head.push_back({"max gain", human(*r.max_deviation_gain)});
  head.push_back({"wall time", human(r.wall_time_s) + " s"});

  std::vector<std::vector<std::string>> edges = {{"market", "firm", "q"}};
  for (std::size_t e = 0; e < r.quantities.size(); ++e) edges.push_back({r.edge_market[e], r.edge_firm[e], human(r.quantities[e])});
  std::vector<std::vector<std::string>> markets = {{"market", "demand", "price"}};
  for (std::size_t i = 0; i < r.market_ids.size(); ++i) markets.push_back({r.market_ids[i], human(r.demands[i]), human(r.prices[i])});
  std::vector<std::vector<std::string>> firms = {{"firm", "profit"}};
  for (std::size_t j = 0; j < r.firm_ids.size(); ++j) firms.push_back({r.firm_ids[j], human(r.profits[j])});

  return columns(head) + '\n' + columns(edges) + '\n' + columns(markets) + '\n' + columns(firms);
}

std::string render_report(const ResultReport& r, OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return report_to_json(r).dump(2) + "\n";
    case OutputFormat::Csv: return report_to_csv(r);
    case OutputFormat::Table: return report_to_table(r);
  }
  return {};
}

std::vector<double> parse_quantities_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_discarded()) {
    const json* arr = &doc;
    if (doc.is_object()) {
      auto it = doc.find("quantities");
      if (it == doc.end()) throw Error(ErrorCode::ParseError, "quantities: object has no \"quantities\" array");
      arr = &*it;
    }
    if (!arr->is_array()) throw Error(ErrorCode::ParseError, "quantities: expected an array of numbers");
    std::vector<double> q;
    for (std::size_t k = 0; k < arr->size(); ++k) {
      if (!(*arr)[k].is_number()) throw Error(ErrorCode::ParseError, "quantities[" + std::to_string(k) + "]: expected a number");
      q.push_back((*arr)[k].get<double>());
    }
    return q;
  }
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<double> q;
  std::string token;
  while (in >> token) {
    char* end = nullptr;
    const double x = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') throw Error(ErrorCode::ParseError, "quantities: '" + token + "' is not a number");
    q.push_back(x);
  }
  return q;
}

VerifyOutcome verify_quantities(const ScenarioFile& s, const std::vector<double>& q, double tol,
                                std::optional<double> gain_tol) {
  if (q.size() != s.edges.size()) {
    throw Error(ErrorCode::ShapeMismatch, "quantity vector has length " + std::to_string(q.size()) + ", scenario has " +
                                              std::to_string(s.edges.size()) + " edges");
  }
  VerifyOutcome v;
  if (!s.integral || !is_separable(s)) {
    v.mode = "continuous";
    const Eigen::Map<const Eigen::VectorXd> qv(q.data(), static_cast<Eigen::Index>(q.size()));
    v.report = best_response_check(s.network(), qv, tol, gain_tol);
    v.verdict = v.report.verdict;
    return v;
  }
  v.mode = "integral";
  v.report.tol = tol;
  v.report.feasible_q = std::all_of(q.begin(), q.end(), [](double x) { return x >= 0.0 && x == std::floor(x); });
  v.report.feasible_F = true;
  v.verdict = v.report.feasible_q;
  if (v.report.feasible_q) {
    for (const auto& part : scenario_oligopolies(s)) {
      std::vector<Quantity> qi;
      for (std::size_t e : part.edges) qi.push_back(static_cast<Quantity>(q[e]));
      const bool ok = is_integral_equilibrium(part.oligopoly, qi);
      v.market_ok.push_back(ok);
      v.verdict = v.verdict && ok;
    }
  }
  v.report.verdict = v.verdict;
  return v;
}

std::string render_verification(const ScenarioFile& s, const VerifyOutcome& v, OutputFormat f) {
  const VerificationReport& r = v.report;
  if (f == OutputFormat::Json) {
    json doc = {{"mode", v.mode}, {"verdict", v.verdict}, {"feasible_q", r.feasible_q}, {"tol", r.tol}};
    if (v.mode == "continuous") {
      doc["feasible_F"] = r.feasible_F;
      doc["mu"] = round_sig12(r.mu);
      doc["gain_tol"] = r.gain_tol;
      doc["worst_deviation_gain"] = rounded(r.worst_deviation_gain);
      doc["non_concave_warning"] = r.non_concave_warning;
    } else {
      json markets = json::array();
      for (std::size_t i = 0; i < v.market_ok.size(); ++i) markets.push_back({{"id", s.market_ids[i]}, {"equilibrium", static_cast<bool>(v.market_ok[i])}});
      doc["markets"] = markets;
    }
    return doc.dump(2) + "\n";
  }
  const bool csv = f == OutputFormat::Csv;
  std::vector<std::vector<std::string>> rows = {{"key", "value"}};
  auto num = [csv](double x) { return csv ? machine(x) : human(x); };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  rows.push_back({"mode", v.mode});
  rows.push_back({"verdict", flag(v.verdict)});
  rows.push_back({"feasible_q", flag(r.feasible_q)});
  if (v.mode == "continuous") {
    rows.push_back({"feasible_F", flag(r.feasible_F)});
    rows.push_back({"mu", num(r.mu)});
    for (std::size_t j = 0; j < r.worst_deviation_gain.size(); ++j) {
      rows.push_back({"gain:" + s.firm_ids[j], num(r.worst_deviation_gain[j])});
    }
    rows.push_back({"non_concave_warning", flag(r.non_concave_warning)});
  } else {
    for (std::size_t i = 0; i < v.market_ok.size(); ++i) rows.push_back({"market:" + s.market_ids[i], flag(v.market_ok[i])});
  }
  if (!csv) return columns(std::vector<std::vector<std::string>>(rows.begin() + 1, rows.end()));
  std::ostringstream os;
  for (const auto& row : rows) os << row[0] << ',' << row[1] << '\n';
  return os.str();
}

ScenarioFile generate_scenario(const GenOptions& opt) {
  if (opt.n_firms < 1 || opt.n_markets < 1) throw Error(ErrorCode::InvalidArgument, "need at least one firm and one market");
  if (!(opt.density > 0.0 && opt.density <= 1.0)) throw Error(ErrorCode::InvalidArgument, "density must lie in (0, 1]");
  const std::string& fam = opt.family;
  if (fam != "linear" && fam != "quadratic" && fam != "cubic" && fam != "entropy") {
    throw Error(ErrorCode::InvalidArgument, "family must be linear, quadratic, cubic or entropy");
  }
  if (opt.integral && fam != "linear") throw Error(ErrorCode::InvalidArgument, "integral scenarios use the linear family");

  std::mt19937_64 rng(opt.seed);
  auto unif = [&rng](double lo, double hi) {
    const double x = std::uniform_real_distribution<double>(lo, hi)(rng);
    return std::round(x * 1e4) / 1e4;
  };
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  ScenarioFile s;
  s.integral = opt.integral;
  const std::size_t m = opt.n_markets;
  const std::size_t n = opt.n_firms;
  for (std::size_t i = 0; i < m; ++i) {
    s.market_ids.push_back("M" + std::to_string(i + 1));
    if (opt.integral) {
      s.prices.emplace_back(PriceFunction::linear(static_cast<double>(20 + pick(41)), static_cast<double>(1 + pick(2))));
    } else if (fam == "linear") {
      s.prices.emplace_back(PriceFunction::linear(unif(2, 10), unif(0.5, 2)));
    } else if (fam == "quadratic") {
      s.prices.emplace_back(PriceFunction::quadratic(unif(5, 10), unif(0.5, 2), unif(0.05, 1)));
    } else if (fam == "cubic") {
      s.prices.emplace_back(PriceFunction::cubic(unif(5, 10), unif(0.5, 2), unif(0, 0.5), unif(0.01, 0.2)));
    } else {
      s.prices.emplace_back(PriceFunction::entropy(unif(5, 10), unif(0.2, 1)));
    }
  }
  for (std::size_t j = 0; j < n; ++j) s.firm_ids.push_back("F" + std::to_string(j + 1));

  std::vector<std::vector<bool>> has(m, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) has[i][j] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < opt.density;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (std::none_of(has[i].begin(), has[i].end(), [](bool b) { return b; })) has[i][pick(n)] = true;
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) any = any || has[i][j];
    if (!any) has[pick(m)][j] = true;
  }
  // Join components: markets are nodes 0..m-1, firms m..m+n-1.
  while (true) {
    std::vector<std::size_t> parent(m + n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (has[i][j]) parent[find(i)] = find(m + j);
      }
    }
    const std::size_t root = find(0);
    std::vector<std::size_t> in_markets;
    std::vector<std::size_t> out_firms;
    for (std::size_t i = 0; i < m; ++i) {
      if (find(i) == root) in_markets.push_back(i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (find(m + j) != root) out_firms.push_back(j);
    }
    if (out_firms.empty()) break;
    has[in_markets[pick(in_markets.size())]][out_firms[pick(out_firms.size())]] = true;
  }

  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (has[i][j]) {
        s.edges.push_back(Edge{i, j});
        ++degree[j];
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (opt.integral) {
      std::vector<double> lambda;
      std::vector<double> mu;
      for (std::size_t k = 0; k < degree[j]; ++k) {
        lambda.push_back(static_cast<double>(pick(3)));
        mu.push_back(static_cast<double>(pick(6)));
      }
      s.costs.push_back(CostFunction::separable_quadratic(lambda, mu));
    } else {
      s.costs.push_back(CostFunction::quadratic_total(unif(0.5, 2)));
    }
  }
  return s;
}

std::size_t thread_count_from_env() {
  if (const char* env = std::getenv("COURNOT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

BenchRow bench_oligopoly(std::size_t n, std::int64_t q_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> lam(0, 2);
  std::uniform_int_distribution<int> mu(0, 10);
  // Monopoly optima are about alpha / (2 + lambda), so the sum lands near q_max.
  const double alpha = std::ceil(2.77 * static_cast<double>(q_max) / static_cast<double>(n)) + 10.0;
  std::vector<IntegerCost> costs;
  for (std::size_t i = 0; i < n; ++i) costs.push_back(IntegerCost::quadratic(lam(rng), mu(rng)));
  const Oligopoly olig = make_oligopoly(IntegerPrice(PriceFunction::linear(alpha, 1.0)), std::move(costs));

  const auto start = std::chrono::steady_clock::now();
  const OligopolySolution sol = solve_oligopoly(olig);
  BenchRow row;
  row.wall_ms = 1e3 * elapsed_s(start);
  row.suite = "oligopoly";
  row.size = n;
  row.method = "oligopoly";
  row.iterations = sol.outer_iterations;
  row.f_evaluations = sol.f_evaluations;
  row.q_max = sol.q_max;
  const double lg = std::log2(static_cast<double>(std::max<std::int64_t>(sol.q_max, 2)));
  row.bound = 4.0 * static_cast<double>(n) * lg * (lg + 2.0);
  row.status = sol.found() ? "equilibrium" : "no_equilibrium";
  return row;
}

BenchRow bench_nlcp(std::size_t E, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha(2.0, 10.0);
  std::uniform_real_distribution<double> beta(0.5, 2.0);
  std::uniform_real_distribution<double> lambda(0.5, 2.0);
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(E)))));
  const std::size_t n = (E + m - 1) / m;
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < E; ++e) edges.push_back(Edge{e % m, e / m});
  std::vector<PriceFunction> prices;
  for (std::size_t i = 0; i < m; ++i) prices.push_back(PriceFunction::linear(alpha(rng), beta(rng)));
  std::vector<CostFunction> costs;
  for (std::size_t j = 0; j < n; ++j) costs.push_back(CostFunction::quadratic_total(lambda(rng)));
  const NcpProblem problem(build_network(n, m, edges, prices, costs));

  const auto start = std::chrono::steady_clock::now();
  const EquilibriumResult res = solve_ncp(problem);
  BenchRow row;
  row.wall_ms = 1e3 * elapsed_s(start);
  row.suite = "nlcp";
  row.size = E;
  row.method = "nlcp";
  row.iterations = res.iterations;
  row.status = std::string(to_string(res.status));
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  if (opt.q_max < 2) throw Error(ErrorCode::InvalidArgument, "--qmax must be >= 2");
  std::vector<std::function<BenchRow()>> tasks;
  for (const std::string& suite : opt.suites) {
    if (suite == "oligopoly") {
      const std::vector<std::size_t> sizes = opt.sizes.empty() ? std::vector<std::size_t>{10, 100, 1000} : opt.sizes;
      for (std::size_t n : sizes) {
        if (n < 1) throw Error(ErrorCode::InvalidArgument, "bench sizes must be >= 1");
        tasks.push_back([n, &opt] { return bench_oligopoly(n, opt.q_max, opt.seed * 1000003 + n); });
      }
    } else if (suite == "nlcp") {
      const std::vector<std::size_t> sizes = opt.sizes.empty() ? std::vector<std::size_t>{4, 16, 64} : opt.sizes;
      for (std::size_t E : sizes) {
        if (E < 1) throw Error(ErrorCode::InvalidArgument, "bench sizes must be >= 1");
        tasks.push_back([E, &opt] { return bench_nlcp(E, opt.seed * 1000003 + E); });
      }
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown bench suite '" + suite + "' (oligopoly, nlcp)");
    }
  }

  std::vector<BenchRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) rows[k] = tasks[k]();
  };
  const std::size_t threads = std::min(opt.threads > 0 ? opt.threads : thread_count_from_env(), tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.suite, a.size, a.method) < std::tie(b.suite, b.size, b.method);
  });
  return rows;
}

std::string render_bench(const std::vector<BenchRow>& rows, OutputFormat f) {
  if (f == OutputFormat::Json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"suite", r.suite}, {"size", r.size}, {"method", r.method}, {"iterations", r.iterations},
                     {"f_evaluations", r.f_evaluations}, {"q_max", r.q_max}, {"bound", round_sig12(r.bound)},
                     {"wall_ms", round_sig12(r.wall_ms)}, {"status", r.status}});
    }
    return arr.dump(2) + "\n";
  }
  const bool csv = f == OutputFormat::Csv;
  auto num = [csv](double x) { return csv ? machine(x) : human(x); };
  std::vector<std::vector<std::string>> table = {
      {"suite", "size", "method", "iterations", "f_evaluations", "q_max", "bound", "wall_ms", "status"}};
  for (const auto& r : rows) {
    table.push_back({r.suite, std::to_string(r.size), r.method, std::to_string(r.iterations),
                     std::to_string(r.f_evaluations), std::to_string(r.q_max), num(r.bound), num(r.wall_ms), r.status});
  }
  if (!csv) return columns(table);
  std::ostringstream os;
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  return os.str();
}

int cmd_solve(const std::string& scenario_path, const SolveOptions& opt, OutputFormat format,
              const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  try {
    const ScenarioFile s = load_scenario(scenario_path);
    const ResultReport r = solve_scenario(s, opt);
    out << render_report(r, format);
    if (out_path) write_file(*out_path, render_report(r, format == OutputFormat::Csv ? OutputFormat::Csv : OutputFormat::Json));
    if (r.exit_code() == kExitNoEquilibrium) err << "no pure integral equilibrium exists\n";
    if (r.exit_code() == kExitSolverFailure) err << "solver did not reach a verified equilibrium (" << r.status << ")\n";
    return r.exit_code();
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_verify(const std::string& scenario_path, const std::string& quantities_path, double tol, OutputFormat format,
               std::ostream& out, std::ostream& err) {
  try {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "--tol must be positive");
    const ScenarioFile s = load_scenario(scenario_path);
    const std::vector<double> q = parse_quantities_text(read_file(quantities_path));
    const VerifyOutcome v = verify_quantities(s, q, tol);
    out << render_verification(s, v, format);
    return v.verdict ? kExitOk : kExitSolverFailure;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_gen(const GenOptions& opt, const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  try {
    const std::string text = write_scenario(generate_scenario(opt));
    if (out_path) {
      write_file(*out_path, text);
    } else {
      out << text;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_bench(const BenchOptions& opt, OutputFormat format, const std::optional<std::string>& out_path,
              std::ostream& out, std::ostream& err) {
  try {
    const std::vector<BenchRow> rows = run_bench(opt);
    out << render_bench(rows, format);
    if (out_path) write_file(*out_path, render_bench(rows, format == OutputFormat::Json ? OutputFormat::Json : OutputFormat::Csv));
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

int cmd_info(const std::optional<std::string>& scenario_path, std::ostream& out, std::ostream& err) {
  try {
    if (!scenario_path) {
      out << columns({
          {"cournot", kVersion},
          {"methods", "auto potential nlcp oligopoly"},
          {"prices", "linear quadratic cubic entropy power table"},
          {"costs", "quadratic_total separable_quadratic quadratic_form"},
          {"threads", std::to_string(thread_count_from_env())},
      });
      return kExitOk;
    }
    const ScenarioFile s = load_scenario(*scenario_path);
    std::vector<std::vector<std::string>> rows = {
        {"markets", std::to_string(s.market_ids.size())},
        {"firms", std::to_string(s.firm_ids.size())},
        {"edges", std::to_string(s.edges.size())},
        {"integral", s.integral ? "yes" : "no"},
        {"separable", is_separable(s) ? "yes" : "no"},
    };
    std::string method;
    try {
      method = auto_method(s);
    } catch (const Error&) {
      method = "none";
    }
    rows.push_back({"auto method", method});
    if (!s.has_table_price()) {
      const MarketNetwork net = s.network();
      const MonotonicityReport mono = check_monotone_revenue(net, uniform_grid(default_q_cap(net)));
      rows.push_back({"monotone revenue", mono.condition_holds ? "certified" : "not certified"});
      rows.push_back({"worst margin", human(mono.worst_margin)});
    }
    out << columns(rows);
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(err, e);
  }
}

}  // namespace cournot
