#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cournot/cost.hpp"
#include "cournot/price.hpp"

namespace cournot {

/// Production quantities, one entry per edge in the network's canonical order.
using QuantityVector = Eigen::VectorXd;

struct Edge {
  std::size_t market;
  std::size_t firm;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct NetworkOptions {
  /// Upper end of the price validation grid. Zero selects 10x the market's
  /// choke demand (at least 10).
  double price_check_cap = 0.0;
  /// Optional display names; defaults to the decimal index.
  std::vector<std::string> market_names;
  std::vector<std::string> firm_names;
};

/// Bipartite firm-market graph with a price function per market and a cost
/// function per firm. Immutable once built.
class MarketNetwork {
 public:
  std::size_t n_firms() const noexcept { return costs_.size(); }
  std::size_t n_markets() const noexcept { return prices_.size(); }
  std::size_t n_edges() const noexcept { return edges_.size(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }

  /// Edge indices incident to market i (a contiguous, firm-ascending run).
  const std::vector<std::size_t>& market_edges(std::size_t market) const { return market_edges_.at(market); }
  /// Edge indices incident to firm j, market-ascending. These index s_j.
  const std::vector<std::size_t>& firm_edges(std::size_t firm) const { return firm_edges_.at(firm); }
  /// N_M(i): firms supplying market i.
  std::vector<std::size_t> firms_of_market(std::size_t market) const;
  /// N_F(j): markets supplied by firm j.
  std::vector<std::size_t> markets_of_firm(std::size_t firm) const;
  std::optional<std::size_t> edge_index(std::size_t market, std::size_t firm) const;

  const PriceFunction& price(std::size_t market) const { return prices_.at(market); }
  const CostFunction& cost(std::size_t firm) const { return costs_.at(firm); }
  const std::vector<PriceFunction>& prices() const noexcept { return prices_; }
  const std::vector<CostFunction>& costs() const noexcept { return costs_; }

  const std::string& market_name(std::size_t market) const { return market_names_.at(market); }
  const std::string& firm_name(std::size_t firm) const { return firm_names_.at(firm); }

  bool all_prices_linear() const;

  /// Throws ShapeMismatch unless q has one entry per edge.
  void check_shape(const QuantityVector& q) const;

 private:
  friend MarketNetwork build_network(std::size_t, std::size_t, std::vector<Edge>, std::vector<PriceFunction>,
                                     std::vector<CostFunction>, const NetworkOptions&);
  MarketNetwork() = default;

  std::vector<Edge> edges_;
  std::vector<PriceFunction> prices_;
  std::vector<CostFunction> costs_;
  std::vector<std::vector<std::size_t>> market_edges_;
  std::vector<std::vector<std::size_t>> firm_edges_;
  std::vector<std::string> market_names_;
  std::vector<std::string> firm_names_;
};

/// Validates the inputs, sorts edges by (market, firm) and precomputes
/// adjacency. Errors: InvalidArgument, DuplicateEdge, IsolatedVertex,
/// NonDecreasingPrice, NonConvexCost, ShapeMismatch.
MarketNetwork build_network(std::size_t n_firms, std::size_t n_markets, std::vector<Edge> edges,
                            std::vector<PriceFunction> prices, std::vector<CostFunction> costs,
                            const NetworkOptions& options = {});

/// Marginal profit split: F = R + S with r_e = -P(D) - P'(D) q_e and
/// s_e = dc/dq_e.
struct MarginalField {
  Eigen::VectorXd F;
  Eigen::VectorXd R;
  Eigen::VectorXd S;
};

double demand(const MarketNetwork& net, const QuantityVector& q, std::size_t market);
Eigen::VectorXd demands(const MarketNetwork& net, const QuantityVector& q);
Eigen::VectorXd market_prices(const MarketNetwork& net, const QuantityVector& q);

/// s_j: the restriction of q to firm j's edges.
Eigen::VectorXd firm_strategy(const MarketNetwork& net, const QuantityVector& q, std::size_t firm);

double profit(const MarketNetwork& net, const QuantityVector& q, std::size_t firm);
Eigen::VectorXd profits(const MarketNetwork& net, const QuantityVector& q);

MarginalField marginal_field(const MarketNetwork& net, const QuantityVector& q);

Eigen::MatrixXd jacobian_R(const MarketNetwork& net, const QuantityVector& q);
Eigen::MatrixXd jacobian_S(const MarketNetwork& net, const QuantityVector& q);
Eigen::MatrixXd jacobian_F(const MarketNetwork& net, const QuantityVector& q);

}  // namespace cournot
