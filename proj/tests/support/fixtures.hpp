#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cournot/network.hpp"
#include "cournot/oligopoly.hpp"

namespace fixtures {

using namespace cournot;

// Market ids 1, 2 are indices 0, 1; firms A, B are 0, 1.
inline MarketNetwork scenario1() {
  return build_network(2, 1, {{0, 0}, {0, 1}}, {PriceFunction::linear(1, 1)},
                       {CostFunction::quadratic_total(1), CostFunction::quadratic_total(1)});
}

inline MarketNetwork scenario2() {
  return build_network(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
                       {PriceFunction::linear(1, 2), PriceFunction::linear(1, 2)},
                       {CostFunction::quadratic_total(1), CostFunction::quadratic_total(1)});
}

inline MarketNetwork scenario3() {
  return build_network(2, 2, {{0, 0}, {1, 0}, {1, 1}}, {PriceFunction::linear(1, 2), PriceFunction::linear(1, 2)},
                       {CostFunction::quadratic_total(1), CostFunction::quadratic_total(1)});
}

inline QuantityVector vec(std::initializer_list<double> xs) {
  QuantityVector q(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) q[k++] = x;
  return q;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Random bipartite edge set with every vertex covered and at most max_edges edges.
inline std::vector<Edge> random_edges(std::mt19937_64& rng, std::size_t n_firms, std::size_t n_markets,
                                      std::size_t max_edges) {
  std::vector<std::vector<bool>> has(n_markets, std::vector<bool>(n_firms, false));
  std::size_t count = 0;
  auto add = [&](std::size_t i, std::size_t j) {
    if (!has[i][j]) {
      has[i][j] = true;
      ++count;
    }
  };
  for (std::size_t i = 0; i < n_markets; ++i) add(i, index(rng, n_firms));
  for (std::size_t j = 0; j < n_firms; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < n_markets; ++i) any = any || has[i][j];
    if (!any) add(index(rng, n_markets), j);
  }
  const double p = uniform(rng, 0.2, 0.9);
  for (std::size_t i = 0; i < n_markets; ++i) {
    for (std::size_t j = 0; j < n_firms && count < max_edges; ++j) {
      if (uniform(rng, 0, 1) < p) add(i, j);
    }
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n_markets; ++i) {
    for (std::size_t j = 0; j < n_firms; ++j) {
      if (has[i][j]) edges.push_back({i, j});
    }
  }
  return edges;
}

// Convex cost of a random family for a firm with `dim` edges. strict makes
// the Hessian positive definite.
inline CostFunction random_cost(std::mt19937_64& rng, std::size_t dim, bool strict) {
  switch (index(rng, 3)) {
    case 0:
      if (!strict || dim == 1) return CostFunction::quadratic_total(uniform(rng, strict ? 0.2 : 0.0, 2.0));
      [[fallthrough]];
    case 1: {
      std::vector<double> lambda(dim);
      std::vector<double> mu(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        lambda[k] = uniform(rng, strict ? 0.2 : 0.0, 2.0);
        mu[k] = uniform(rng, 0.0, 0.5);
      }
      return CostFunction::separable_quadratic(lambda, mu);
    }
    default: {
      const auto d = static_cast<Eigen::Index>(dim);
      Eigen::MatrixXd B(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) B(r, c) = uniform(rng, -1.0, 1.0);
      }
      Eigen::MatrixXd A = B * B.transpose() / static_cast<double>(d);
      if (strict) A += 0.2 * Eigen::MatrixXd::Identity(d, d);
      Eigen::VectorXd b(d);
      for (Eigen::Index k = 0; k < d; ++k) b[k] = uniform(rng, 0.0, 0.5);
      return CostFunction::quadratic_form(A, b);
    }
  }
}

struct RandomNetOptions {
  std::size_t max_firms = 5;
  std::size_t max_markets = 5;
  std::size_t max_edges = 30;
  bool linear_only = true;
  bool strict_costs = false;
};

// Prices drawn from families that satisfy the monotone-revenue condition.
inline PriceFunction random_price(std::mt19937_64& rng, bool linear_only) {
  const std::size_t family = linear_only ? 0 : index(rng, 4);
  switch (family) {
    case 0: return PriceFunction::linear(uniform(rng, 1, 10), uniform(rng, 0.2, 3));
    case 1: return PriceFunction::quadratic(uniform(rng, 3, 10), uniform(rng, 0.2, 2), uniform(rng, 0.0, 1));
    case 2: return PriceFunction::cubic(uniform(rng, 3, 10), uniform(rng, 0.2, 2), uniform(rng, 0, 0.5), uniform(rng, 0, 0.2));
    default: return PriceFunction::entropy(uniform(rng, 3, 10), uniform(rng, 0.2, 1));
  }
}

inline MarketNetwork random_network(std::mt19937_64& rng, const RandomNetOptions& opt = {}) {
  const std::size_t n = 1 + index(rng, opt.max_firms);
  const std::size_t m = 1 + index(rng, opt.max_markets);
  const std::vector<Edge> edges = random_edges(rng, n, m, opt.max_edges);
  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges) ++degree[e.firm];
  std::vector<PriceFunction> prices;
  for (std::size_t i = 0; i < m; ++i) prices.push_back(random_price(rng, opt.linear_only));
  std::vector<CostFunction> costs;
  for (std::size_t j = 0; j < n; ++j) costs.push_back(random_cost(rng, degree[j], opt.strict_costs));
  return build_network(n, m, edges, prices, costs);
}

inline QuantityVector random_quantities(std::mt19937_64& rng, const MarketNetwork& net, double hi = 2.0) {
  QuantityVector q(static_cast<Eigen::Index>(net.n_edges()));
  for (Eigen::Index e = 0; e < q.size(); ++e) q[e] = uniform(rng, 0.0, hi);
  return q;
}

// Central difference of firm(e)'s profit in q_e.
inline double fd_profit_derivative(const MarketNetwork& net, const QuantityVector& q, std::size_t e, double h = 1e-5) {
  QuantityVector up = q;
  QuantityVector down = q;
  up[static_cast<Eigen::Index>(e)] += h;
  down[static_cast<Eigen::Index>(e)] -= h;
  const std::size_t firm = net.edge(e).firm;
  return (profit(net, up, firm) - profit(net, down, firm)) / (2 * h);
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-9) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1.0}) || std::abs(a - b) <= abs_floor;
}

// Small integral oligopoly with quadratic or tabled parts; monopoly optima
// stay small enough for exhaustive enumeration.
inline Oligopoly random_small_oligopoly(std::mt19937_64& rng, std::size_t max_firms = 3) {
  const std::size_t n = 1 + index(rng, max_firms);
  IntegerPrice price = [&]() {
    if (index(rng, 2) == 0) {
      return IntegerPrice(PriceFunction::linear(static_cast<double>(4 + index(rng, 20)), static_cast<double>(1 + index(rng, 2))));
    }
    // Concave decreasing table: nonincreasing steps.
    std::vector<double> table = {static_cast<double>(10 + index(rng, 20))};
    double step = -static_cast<double>(index(rng, 2));
    while (table.back() > -40.0) {
      step -= static_cast<double>(index(rng, 2));
      if (step == 0.0) step = -1.0;
      table.push_back(table.back() + step);
    }
    for (int k = 0; k < 40; ++k) table.push_back(table.back() + step);
    return IntegerPrice(table);
  }();
  std::vector<IntegerCost> costs;
  for (std::size_t i = 0; i < n; ++i) {
    if (index(rng, 3) == 0) {
      // Convex table: nondecreasing increments.
      std::vector<double> table = {0.0};
      double inc = static_cast<double>(index(rng, 4));
      for (int q = 0; q < 80; ++q) {
        table.push_back(table.back() + inc);
        inc += static_cast<double>(index(rng, 2));
      }
      costs.push_back(IntegerCost(table));
    } else {
      costs.push_back(IntegerCost::quadratic(static_cast<double>(index(rng, 3)), static_cast<double>(index(rng, 4))));
    }
  }
  return make_oligopoly(std::move(price), std::move(costs));
}

}  // namespace fixtures
