#include "cournot/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cournot/error.hpp"

namespace cournot {

std::vector<std::size_t> MarketNetwork::firms_of_market(std::size_t market) const {
  std::vector<std::size_t> out;
  for (std::size_t e : market_edges_.at(market)) out.push_back(edges_[e].firm);
  return out;
}

std::vector<std::size_t> MarketNetwork::markets_of_firm(std::size_t firm) const {
  std::vector<std::size_t> out;
  for (std::size_t e : firm_edges_.at(firm)) out.push_back(edges_[e].market);
  return out;
}

std::optional<std::size_t> MarketNetwork::edge_index(std::size_t market, std::size_t firm) const {
  const Edge key{market, firm};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

bool MarketNetwork::all_prices_linear() const {
  return std::all_of(prices_.begin(), prices_.end(), [](const PriceFunction& p) { return p.is_linear(); });
}

void MarketNetwork::check_shape(const QuantityVector& q) const {
  if (static_cast<std::size_t>(q.size()) != edges_.size()) {
    std::ostringstream os;
    os << "quantity vector has length " << q.size() << ", network has " << edges_.size() << " edges";
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
}

MarketNetwork build_network(std::size_t n_firms, std::size_t n_markets, std::vector<Edge> edges,
                            std::vector<PriceFunction> prices, std::vector<CostFunction> costs,
                            const NetworkOptions& options) {
  if (n_firms == 0 || n_markets == 0) throw Error(ErrorCode::InvalidArgument, "network needs firms and markets");
  if (edges.empty()) throw Error(ErrorCode::InvalidArgument, "edge list is empty");
  if (prices.size() != n_markets) throw Error(ErrorCode::ShapeMismatch, "one price function per market required");
  if (costs.size() != n_firms) throw Error(ErrorCode::ShapeMismatch, "one cost function per firm required");

  for (const Edge& e : edges) {
    if (e.market >= n_markets || e.firm >= n_firms) {
      std::ostringstream os;
      os << "edge (" << e.market << ", " << e.firm << ") is out of range";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    std::ostringstream os;
    os << "edge (" << dup->market << ", " << dup->firm << ") appears more than once";
    throw Error(ErrorCode::DuplicateEdge, os.str());
  }

  MarketNetwork net;
  net.market_edges_.resize(n_markets);
  net.firm_edges_.resize(n_firms);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    net.market_edges_[edges[k].market].push_back(k);
    net.firm_edges_[edges[k].firm].push_back(k);
  }
  for (std::size_t i = 0; i < n_markets; ++i) {
    if (net.market_edges_[i].empty()) {
      throw Error(ErrorCode::IsolatedVertex, "market " + std::to_string(i) + " has no incident edge");
    }
  }
  for (std::size_t j = 0; j < n_firms; ++j) {
    if (net.firm_edges_[j].empty()) {
      throw Error(ErrorCode::IsolatedVertex, "firm " + std::to_string(j) + " has no incident edge");
    }
  }

  for (const PriceFunction& p : prices) {
    double cap = options.price_check_cap;
    if (cap <= 0.0) {
      const double choke = p.choke_demand();
      cap = std::isfinite(choke) ? std::max(10.0, 10.0 * choke) : 10.0;
    }
    p.validate(cap);
  }
  for (std::size_t j = 0; j < n_firms; ++j) costs[j].validate(net.firm_edges_[j].size());

  auto names = [](const std::vector<std::string>& given, std::size_t n, const char* what) {
    if (given.empty()) {
      std::vector<std::string> out;
      for (std::size_t k = 0; k < n; ++k) out.push_back(std::to_string(k));
      return out;
    }
    if (given.size() != n) throw Error(ErrorCode::ShapeMismatch, std::string(what) + " name count mismatch");
    return given;
  };
  net.market_names_ = names(options.market_names, n_markets, "market");
  net.firm_names_ = names(options.firm_names, n_firms, "firm");

  net.edges_ = std::move(edges);
  net.prices_ = std::move(prices);
  net.costs_ = std::move(costs);
  return net;
}

double demand(const MarketNetwork& net, const QuantityVector& q, std::size_t market) {
  double d = 0.0;
  for (std::size_t e : net.market_edges(market)) d += q[static_cast<Eigen::Index>(e)];
  return d;
}

Eigen::VectorXd demands(const MarketNetwork& net, const QuantityVector& q) {
  net.check_shape(q);
  Eigen::VectorXd D(static_cast<Eigen::Index>(net.n_markets()));
  for (std::size_t i = 0; i < net.n_markets(); ++i) D[static_cast<Eigen::Index>(i)] = demand(net, q, i);
  return D;
}

Eigen::VectorXd market_prices(const MarketNetwork& net, const QuantityVector& q) {
  const Eigen::VectorXd D = demands(net, q);
  Eigen::VectorXd p(D.size());
  for (Eigen::Index i = 0; i < D.size(); ++i) p[i] = net.price(static_cast<std::size_t>(i)).value(D[i]);
  return p;
}

Eigen::VectorXd firm_strategy(const MarketNetwork& net, const QuantityVector& q, std::size_t firm) {
  const auto& idx = net.firm_edges(firm);
  Eigen::VectorXd s(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) s[static_cast<Eigen::Index>(k)] = q[static_cast<Eigen::Index>(idx[k])];
  return s;
}

double profit(const MarketNetwork& net, const QuantityVector& q, std::size_t firm) {
  net.check_shape(q);
  double revenue = 0.0;
  for (std::size_t e : net.firm_edges(firm)) {
    const std::size_t i = net.edge(e).market;
    revenue += net.price(i).value(demand(net, q, i)) * q[static_cast<Eigen::Index>(e)];
  }
  return revenue - net.cost(firm).value(firm_strategy(net, q, firm));
}

Eigen::VectorXd profits(const MarketNetwork& net, const QuantityVector& q) {
  Eigen::VectorXd pi(static_cast<Eigen::Index>(net.n_firms()));
  for (std::size_t j = 0; j < net.n_firms(); ++j) pi[static_cast<Eigen::Index>(j)] = profit(net, q, j);
  return pi;
}

MarginalField marginal_field(const MarketNetwork& net, const QuantityVector& q) {
  const Eigen::VectorXd D = demands(net, q);
  const auto E = static_cast<Eigen::Index>(net.n_edges());
  MarginalField m{Eigen::VectorXd(E), Eigen::VectorXd(E), Eigen::VectorXd(E)};
  for (Eigen::Index e = 0; e < E; ++e) {
    const std::size_t i = net.edge(static_cast<std::size_t>(e)).market;
    const PriceFunction& P = net.price(i);
    m.R[e] = -P.value(D[static_cast<Eigen::Index>(i)]) - P.derivative(D[static_cast<Eigen::Index>(i)]) * q[e];
  }
  for (std::size_t j = 0; j < net.n_firms(); ++j) {
    const Eigen::VectorXd g = net.cost(j).gradient(firm_strategy(net, q, j));
    const auto& idx = net.firm_edges(j);
    for (std::size_t k = 0; k < idx.size(); ++k) m.S[static_cast<Eigen::Index>(idx[k])] = g[static_cast<Eigen::Index>(k)];
  }
  m.F = m.R + m.S;
  return m;
}

Eigen::MatrixXd jacobian_R(const MarketNetwork& net, const QuantityVector& q) {
  const Eigen::VectorXd D = demands(net, q);
  const auto E = static_cast<Eigen::Index>(net.n_edges());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(E, E);
  for (std::size_t i = 0; i < net.n_markets(); ++i) {
    const PriceFunction& P = net.price(i);
    const double d1 = P.derivative(D[static_cast<Eigen::Index>(i)]);
    const double d2 = P.second_derivative(D[static_cast<Eigen::Index>(i)]);
    const auto& idx = net.market_edges(i);
    for (std::size_t a : idx) {
      const auto row = static_cast<Eigen::Index>(a);
      for (std::size_t b : idx) {
        const auto col = static_cast<Eigen::Index>(b);
        J(row, col) = (row == col ? -2.0 * d1 : -d1) - d2 * q[row];
      }
    }
  }
  return J;
}

Eigen::MatrixXd jacobian_S(const MarketNetwork& net, const QuantityVector& q) {
  net.check_shape(q);
  const auto E = static_cast<Eigen::Index>(net.n_edges());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(E, E);
  for (std::size_t j = 0; j < net.n_firms(); ++j) {
    const auto& idx = net.firm_edges(j);
    const Eigen::MatrixXd H = net.cost(j).hessian(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b < idx.size(); ++b) {
        J(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b])) =
            H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
  }
  return J;
}

Eigen::MatrixXd jacobian_F(const MarketNetwork& net, const QuantityVector& q) {
  return jacobian_R(net, q) + jacobian_S(net, q);
}

}  // namespace cournot
