#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cournot/network.hpp"
#include "cournot/result.hpp"

namespace cournot {

/// q >= 0, F(q) >= 0, q^T F(q) = 0 over a market network.
class NcpProblem {
 public:
  explicit NcpProblem(MarketNetwork net) : net_(std::move(net)) {}

  const MarketNetwork& network() const noexcept { return net_; }
  std::size_t dimension() const noexcept { return net_.n_edges(); }

  Eigen::VectorXd F(const QuantityVector& q) const { return marginal_field(net_, q).F; }
  Eigen::MatrixXd jacobian(const QuantityVector& q) const { return jacobian_F(net_, q); }

 private:
  MarketNetwork net_;
};

struct NcpConfig {
  /// Target average residual q^T F / E.
  double epsilon = 1e-9;
  /// Centering: the Newton target is sigma * mu.
  double sigma = 0.25;
  double boundary_fraction = 0.995;
  std::size_t max_iters = 500;
  /// Ceiling for the initial point search; 0 picks 10 (max finite choke demand + 1).
  double q_cap = 0.0;
  /// Strictly interior start (q > 0, F(q) > 0); found automatically when absent.
  std::optional<QuantityVector> initial_point;
};

struct MonotonicityReport {
  bool condition_holds = true;
  double worst_margin = 0.0;
  /// Per market: the grid demand where |P'| - |P''| D / 2 is smallest, and that value.
  std::vector<double> worst_D;
  std::vector<double> market_margin;
};

struct SlcReport {
  double lambda_hat = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

/// Margin |P'(D)| - |P''(D)| D / 2 with rounding-level differences snapped to 0.
double revenue_margin(const PriceFunction& price, double demand);

/// Checks |P'(D)| >= |P''(D)| D / 2 on d_grid for every market. Under this
/// condition the marginal revenue Jacobian is positive semidefinite.
MonotonicityReport check_monotone_revenue(const MarketNetwork& net, const std::vector<double>& d_grid);
MonotonicityReport check_monotone_revenue(const PriceFunction& price, const std::vector<double>& d_grid);

/// {0, cap/(points-1), ..., cap}.
std::vector<double> uniform_grid(double cap, std::size_t points = 1000);

/// Default search ceiling: 10 (max finite choke demand + 1), or 1e6 if no
/// market ever chokes.
double default_q_cap(const MarketNetwork& net);

/// q0 = t * direction with t from a binary search on (0, q_cap] so that
/// F(q0) > 1e-12 componentwise. Throws NoFeasiblePoint.
QuantityVector initial_feasible_point(const NcpProblem& problem, const NcpConfig& cfg = {});
QuantityVector initial_feasible_point(const NcpProblem& problem, const Eigen::VectorXd& direction,
                                      const NcpConfig& cfg = {});

/// Perturbed-Newton central path: (diag F + diag q J) dq = sigma mu 1 - q o F.
EquilibriumResult solve_ncp(const NcpProblem& problem, const NcpConfig& cfg = {});

/// Empirical scaled Lipschitz constant: max over samples of
/// ||X (F(x+h) - F(x) - J(x) h)||_inf / |h^T J(x) h| with ||X^-1 h|| <= 1.
SlcReport check_slc_empirical(const NcpProblem& problem, std::size_t n_samples, std::uint64_t seed);

}  // namespace cournot
