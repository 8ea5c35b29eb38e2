// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>

#include "cournot/cli.hpp"
#include "cournot/error.hpp"
#include "cournot/nlcp.hpp"
#include "cournot/oligopoly.hpp"
#include "cournot/potential.hpp"
#include "cournot/verify.hpp"
#include "fixtures.hpp"

using namespace cournot;
using fixtures::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome scenario_reproduction() {
  struct Case {
    MarketNetwork net;
    QuantityVector q, p, profit;
    std::string name;
  };
  const std::vector<Case> cases = {
      {fixtures::scenario1(), vec({0.25, 0.25}), vec({0.5}), vec({0.09375, 0.09375}), "scenario 1"},
      {fixtures::scenario2(), vec({0.125, 0.125, 0.125, 0.125}), vec({0.5, 0.5}), Eigen::VectorXd(), "scenario 2"},
      {fixtures::scenario3(), vec({0.18, 0.1, 0.16}), vec({0.64, 0.48}), vec({0.124, 0.064}), "scenario 3"},
  };
  Outcome out;
  for (const Case& c : cases) {
    for (const std::string method : {"potential", "nlcp"}) {
      const auto t0 = std::chrono::steady_clock::now();
      const EquilibriumResult r =
          method == "potential" ? solve_potential(PotentialProblem(c.net)) : solve_ncp(NcpProblem(c.net));
      const double secs = seconds_since(t0);
      const std::string tag = c.name + " via " + method;
      out.require(r.converged(), tag + " did not converge");
      out.require(inf_norm(r.q - c.q) <= 1e-6, tag + " quantities off");
      out.require(inf_norm(r.prices - c.p) <= 1e-6, tag + " prices off");
      if (c.profit.size() > 0) out.require(inf_norm(r.profits - c.profit) <= 1e-6, tag + " profits off");
      out.require(secs <= 1.0, tag + " took longer than 1 s");
    }
  }
  return out;
}

Outcome gradient_identity() {
  std::mt19937_64 rng(101);
  Outcome out;
  for (int trial = 0; trial < 100; ++trial) {
    const PotentialProblem prob(fixtures::random_network(rng));
    const QuantityVector q = fixtures::random_quantities(rng, prob.network());
    const Eigen::VectorXd g = potential_gradient(prob, q);
    for (std::size_t e = 0; e < prob.network().n_edges(); ++e) {
      const double fd = fixtures::fd_profit_derivative(prob.network(), q, e);
      out.require(fixtures::close_rel(g[static_cast<Eigen::Index>(e)], fd, 1e-5),
                  "gradient mismatch on instance " + std::to_string(trial));
    }
  }
  return out;
}

Outcome concavity() {
  std::mt19937_64 rng(103);
  Outcome out;
  for (int trial = 0; trial < 20; ++trial) {
    const PotentialProblem prob(fixtures::random_network(rng));
    for (int pair = 0; pair < 1000; ++pair) {
      const QuantityVector a = fixtures::random_quantities(rng, prob.network(), 5.0);
      const QuantityVector b = fixtures::random_quantities(rng, prob.network(), 5.0);
      const double slack = potential_value(prob, 0.5 * (a + b)) - 0.5 * (potential_value(prob, a) + potential_value(prob, b));
      out.require(slack >= -1e-12, "midpoint slack " + std::to_string(slack));
    }
  }
  return out;
}

Outcome ncp_contract() {
  std::mt19937_64 rng(107);
  Outcome out;
  for (int trial = 0; trial < 50; ++trial) {
    fixtures::RandomNetOptions opt;
    opt.linear_only = false;
    const MarketNetwork net = fixtures::random_network(rng, opt);
    out.require(check_monotone_revenue(net, uniform_grid(default_q_cap(net))).condition_holds, "uncertified instance");
    const EquilibriumResult r = solve_ncp(NcpProblem(net));
    const std::string tag = "instance " + std::to_string(trial);
    out.require(r.converged() && r.mu <= 1e-9, tag + " mu " + std::to_string(r.mu));
    out.require(r.iterations <= 500, tag + " iterations");
    out.require(best_response_check(net, r.q, 1e-6, 1e-5).verdict, tag + " failed the best-response check");
  }
  return out;
}

Outcome cross_method() {
  std::mt19937_64 rng(109);
  Outcome out;
  for (int trial = 0; trial < 50; ++trial) {
    const MarketNetwork net = fixtures::random_network(rng);
    const double gap = inf_norm(solve_potential(PotentialProblem(net)).q - solve_ncp(NcpProblem(net)).q);
    out.require(gap <= 1e-5, "gap " + std::to_string(gap) + " on instance " + std::to_string(trial));
  }
  return out;
}

Outcome revenue_certificate() {
  Outcome out;
  const auto grid = uniform_grid(10.0, 1000);
  out.require(check_monotone_revenue(PriceFunction::linear(5, 1), grid).condition_holds, "linear");
  out.require(check_monotone_revenue(PriceFunction::quadratic(10, 1, 0.5), grid).condition_holds, "quadratic");
  out.require(check_monotone_revenue(PriceFunction::cubic(10, 1, 0.5, 0.1), grid).condition_holds, "cubic");
  out.require(check_monotone_revenue(PriceFunction::entropy(5, 1), grid).condition_holds, "entropy");

  // 10 - D^4: |P'| = 4D^3 falls short of |P''| D / 2 = 6D^3.
  const PriceFunction bad = PriceFunction::power(10, 1, 4);
  const MonotonicityReport rep = check_monotone_revenue(bad, grid);
  out.require(!rep.condition_holds && rep.worst_margin < 0.0, "violator accepted");

  // Witness: one market shared by 8 firms, output concentrated on firm 0.
  const std::size_t k = 8;
  std::vector<Edge> edges;
  for (std::size_t j = 0; j < k; ++j) edges.push_back({0, j});
  const MarketNetwork net = build_network(k, 1, edges, {bad}, std::vector<CostFunction>(k, CostFunction::quadratic_total(0)));
  std::mt19937_64 rng(113);
  bool witness = false;
  for (int s = 0; s < 20000 && !witness; ++s) {
    QuantityVector q = QuantityVector::Zero(static_cast<Eigen::Index>(k));
    q[0] = fixtures::uniform(rng, 0.2, 1.0);
    for (std::size_t j = 1; j < k; ++j) q[static_cast<Eigen::Index>(j)] = fixtures::uniform(rng, 0.0, 0.05);
    Eigen::VectorXd x(static_cast<Eigen::Index>(k));
    // Curvature turns negative when x pushes firm 0 up and the rest down.
    x[0] = fixtures::uniform(rng, 0.0, 1.0);
    for (Eigen::Index j = 1; j < x.size(); ++j) x[j] = fixtures::uniform(rng, -0.5, 0.0);
    witness = x.dot(jacobian_R(net, q) * x) < 0.0;
  }
  out.require(witness, "no negative-curvature witness found");
  return out;
}

Outcome oligopoly_oracle() {
  std::mt19937_64 rng(127);
  Outcome out;
  int kept = 0;
  while (kept < 200) {
    const Oligopoly o = fixtures::random_small_oligopoly(rng);
    bool small = true;
    for (std::size_t i = 0; i < o.n_firms(); ++i) small = small && monopoly_optimum(o, i) <= 15;
    if (!small) continue;
    ++kept;
    const auto eqs = exhaustive_oligopoly_oracle(o);
    const OligopolySolution sol = solve_oligopoly(o);
    if (sol.found()) {
      out.require(std::find(eqs.begin(), eqs.end(), *sol.quantities) != eqs.end(), "solver output not an oracle equilibrium");
    } else {
      out.require(eqs.empty(), "solver missed an equilibrium");
    }
  }
  const Oligopoly duo = make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)),
                                       {IntegerCost::quadratic(0, 1), IntegerCost::quadratic(0, 1)});
  const OligopolySolution sol = solve_oligopoly(duo);
  out.require(sol.found() && *sol.quantities == std::vector<Quantity>{3, 3}, "duopoly is not (3,3)");
  return out;
}

Outcome oligopoly_complexity() {
  BenchOptions opt;
  opt.suites = {"oligopoly"};
  opt.q_max = 1'000'000;
  Outcome out;
  const auto rows = run_bench(opt);
  out.require(rows.size() == 3, "expected three bench sizes");
  for (const BenchRow& r : rows) {
    const std::string tag = "n=" + std::to_string(r.size);
    out.require(static_cast<double>(r.f_evaluations) <= r.bound, tag + " exceeds the evaluation bound");
    out.require(r.wall_ms <= 5000.0, tag + " slower than 5 s");
  }
  return out;
}

Outcome supermodularity() {
  std::mt19937_64 rng(131);
  Outcome out;
  for (int trial = 0; trial < 20; ++trial) {
    const Oligopoly o = fixtures::random_small_oligopoly(rng);
    const Quantity top = std::min<Quantity>(30, o.q_cap - 2);
    for (std::size_t i = 0; i < o.n_firms(); ++i) {
      for (Quantity Q1 = 1; Q1 <= top; ++Q1) {
        for (Quantity Q2 = Q1 + 1; Q2 <= top; ++Q2) {
          for (Quantity q = 0; q <= Q1; ++q) {
            for (Quantity q2 = q + 1; q2 <= Q1 + 1; ++q2) {
              const double d_lo = (lower_response_objective(o, i, q2, Q1) - lower_response_objective(o, i, q2, Q2)) -
                                  (lower_response_objective(o, i, q, Q1) - lower_response_objective(o, i, q, Q2));
              const double d_up = (upper_response_objective(o, i, q2, Q1) - upper_response_objective(o, i, q2, Q2)) -
                                  (upper_response_objective(o, i, q, Q1) - upper_response_objective(o, i, q, Q2));
              out.require(d_lo >= -1e-9 && d_up >= -1e-9, "increasing differences violated");
            }
          }
          const ResponseRange lo = best_response_range(o, i, Q1);
          const ResponseRange hi = best_response_range(o, i, Q2);
          if (lo.q_l <= Q1 + 1 && hi.q_l <= Q2 + 1) out.require(lo.q_l >= hi.q_l, "q_l not monotone");
          if (lo.q_u < Q1 + 1 && hi.q_u < Q2 + 1) out.require(lo.q_u >= hi.q_u, "q_u not monotone");
        }
      }
    }
  }
  return out;
}

Outcome multistart() {
  std::mt19937_64 rng(137);
  fixtures::RandomNetOptions opt;
  opt.strict_costs = true;
  Outcome out;
  for (int trial = 0; trial < 20; ++trial) {
    const MarketNetwork net = fixtures::random_network(rng, opt);
    const PotentialProblem pot(net);
    const NcpProblem ncp(net);
    const QuantityVector ref = solve_potential(pot).q;
    for (int start = 0; start < 10; ++start) {
      SolverConfig pc;
      pc.initial_point = fixtures::random_quantities(rng, net, 5.0);
      out.require(inf_norm(solve_potential(pot, pc).q - ref) <= 1e-6, "potential starts disagree");
    }
    // Coupled costs can leave a ray without interior points; such directions are redrawn.
    int ncp_starts = 0;
    for (int attempt = 0; attempt < 200 && ncp_starts < 10; ++attempt) {
      Eigen::VectorXd dir(static_cast<Eigen::Index>(net.n_edges()));
      for (Eigen::Index e = 0; e < dir.size(); ++e) dir[e] = fixtures::uniform(rng, 0.1, 5.0);
      NcpConfig nc;
      try {
        nc.initial_point = initial_feasible_point(ncp, dir);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoFeasiblePoint) continue;
        throw;
      }
      ++ncp_starts;
      out.require(inf_norm(solve_ncp(ncp, nc).q - ref) <= 1e-6, "nlcp starts disagree");
    }
    out.require(ncp_starts == 10, "too few interior starting rays");
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"scenario reproduction", scenario_reproduction},
      {"potential gradient identity", gradient_identity},
      {"potential concavity", concavity},
      {"ncp contract", ncp_contract},
      {"cross-method agreement", cross_method},
      {"monotone revenue certificate", revenue_certificate},
      {"oligopoly oracle equivalence", oligopoly_oracle},
      {"oligopoly evaluation bound", oligopoly_complexity},
      {"increasing differences and ranges", supermodularity},
      {"multistart uniqueness", multistart},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %2zu %s%s%s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.pass ? "" : ": ", o.detail.c_str());
    failures += o.pass ? 0 : 1;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
