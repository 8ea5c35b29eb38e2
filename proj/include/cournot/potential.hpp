#pragma once

#include <optional>

#include "cournot/network.hpp"
#include "cournot/result.hpp"

namespace cournot {

struct SolverConfig {
  /// Stop when ||max(q + g, 0) - q||_inf <= tol (g the potential gradient).
  double tol = 1e-9;
  std::size_t max_iters = 100000;
  double backtrack_factor = 0.5;
  double sufficient_increase = 1e-4;
  /// Starting point; zero when absent. Negative entries are projected.
  std::optional<QuantityVector> initial_point;
  /// Iterates beyond this magnitude are reported as Unbounded.
  double q_cap = 1e9;
  std::uint64_t seed = 1;
};

/// Exact potential of a network whose markets all have linear prices:
///
///   P*(q) = sum_i [ alpha_i D_i - beta_i sum_j q_ij^2 - beta_i sum_{k<j} q_ij q_ik ] - sum_j c_j(s_j)
///
/// Its gradient equals every firm's own profit gradient, so maximizers over
/// q >= 0 are equilibria.
class PotentialProblem {
 public:
  /// Throws MethodInapplicable unless every market price is Linear.
  explicit PotentialProblem(MarketNetwork net);

  const MarketNetwork& network() const noexcept { return net_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::VectorXd& beta() const noexcept { return beta_; }

 private:
  MarketNetwork net_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
};

double potential_value(const PotentialProblem& prob, const QuantityVector& q);
Eigen::VectorXd potential_gradient(const PotentialProblem& prob, const QuantityVector& q);

/// Projected gradient ascent with Armijo backtracking on q >= 0.
EquilibriumResult solve_potential(const PotentialProblem& prob, const SolverConfig& cfg = {});

}  // namespace cournot
