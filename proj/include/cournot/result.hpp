#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cournot/network.hpp"

namespace cournot {

enum class SolveStatus {
  Converged,
  MaxItersExceeded,
  Unbounded,
  NewtonSingular,
  Stalled,
  NoEquilibrium,
};

std::string_view to_string(SolveStatus status);

struct EquilibriumResult {
  std::string method;
  SolveStatus status = SolveStatus::Converged;
  QuantityVector q;
  Eigen::VectorXd demands;
  Eigen::VectorXd prices;
  Eigen::VectorXd profits;
  /// Average complementarity residual q^T F(q) / E.
  double mu = 0.0;
  /// Solver-specific stopping measure (projected-gradient norm, or mu for the NCP path).
  double stationarity = 0.0;
  std::size_t iterations = 0;
  /// NCP path only: starting residual and per-iteration trace.
  double mu0 = 0.0;
  std::vector<double> mu_trace;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

/// Fills demands, prices, profits and mu for the quantities already in r.q.
void fill_outcome(const MarketNetwork& net, EquilibriumResult& r);

}  // namespace cournot
