#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cournot/network.hpp"
#include "cournot/oligopoly.hpp"

namespace cournot {

struct VerificationReport {
  bool feasible_q = false;  ///< q >= -tol
  bool feasible_F = false;  ///< F(q) >= -tol
  double mu = 0.0;          ///< q^T F(q) / E
  /// Best unilateral profit improvement found per firm; empty when not computed.
  std::vector<double> worst_deviation_gain;
  bool non_concave_warning = false;
  double tol = 0.0;
  double gain_tol = 0.0;
  bool verdict = false;

  double max_gain() const;
};

/// Feasibility of q and F(q) and the average complementarity residual.
VerificationReport complementarity_residual(const MarketNetwork& net, const QuantityVector& q, double tol);

/// Numerical Nash check: every firm's profit is maximized over its own
/// quantities (others fixed) by projected gradient ascent from three starts.
/// Also fills the complementarity fields; verdict needs all of them.
VerificationReport best_response_check(const MarketNetwork& net, const QuantityVector& q, double tol,
                                       std::optional<double> gain_tol = std::nullopt);

struct GridEquilibrium {
  QuantityVector q;
  bool converged = false;
  std::size_t rounds = 0;
};

/// Synchronous best-response dynamics on the grid {0, step, ..., q_max}^E.
/// Each firm's response is an exhaustive search over its own grid (ties go
/// to the lexicographically smaller profile). converged=false reports a
/// cycle or exhausted rounds; the last iterate is returned.
GridEquilibrium brute_force_grid_equilibrium(const MarketNetwork& net, double step, double q_max,
                                             std::size_t max_rounds);

/// All pure integral equilibria with q_i <= Q_i* + 1, where Q_i* is the
/// minimum maximizer of pi_i(q, q) found by a full scan. A profile is kept
/// when no firm gains strictly from any integral deviation. Throws TooLarge
/// when prod(Q_i* + 1) exceeds 10^7.
std::vector<std::vector<Quantity>> exhaustive_oligopoly_oracle(const Oligopoly& olig);

}  // namespace cournot
