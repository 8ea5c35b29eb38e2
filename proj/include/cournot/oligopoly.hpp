#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "cournot/network.hpp"
#include "cournot/price.hpp"

namespace cournot {

using Quantity = std::int64_t;

/// Market price at integral total supply Q. Zero for Q < 0.
class IntegerPrice {
 public:
  using Table = std::vector<double>;

  explicit IntegerPrice(PriceFunction analytic) : source_(std::move(analytic)) {}
  explicit IntegerPrice(Table table);

  double operator()(Quantity Q) const;
  /// Largest Q at which the price can be evaluated.
  Quantity max_argument() const;
  bool is_table() const noexcept { return std::holds_alternative<Table>(source_); }
  const std::variant<PriceFunction, Table>& source() const noexcept { return source_; }

 private:
  std::variant<PriceFunction, Table> source_;
};

/// Firm cost at integral output q. Zero for q < 0 and at q = 0.
class IntegerCost {
 public:
  /// c(q) = lambda q^2 / 2 + mu q
  struct Quadratic {
    double lambda = 0.0;
    double mu = 0.0;
  };
  using Table = std::vector<double>;

  explicit IntegerCost(Quadratic quadratic) : source_(quadratic) {}
  explicit IntegerCost(Table table);

  static IntegerCost quadratic(double lambda, double mu) { return IntegerCost(Quadratic{lambda, mu}); }

  double operator()(Quantity q) const;
  Quantity max_argument() const;
  const std::variant<Quadratic, Table>& source() const noexcept { return source_; }

 private:
  std::variant<Quadratic, Table> source_;
};

/// Single-market Cournot game with integral quantities.
struct Oligopoly {
  IntegerPrice price;
  std::vector<IntegerCost> costs;
  /// Evaluation ceiling for total supply; never exceeds price.max_argument().
  Quantity q_cap = 0;

  std::size_t n_firms() const noexcept { return costs.size(); }
};

/// Validates discrete monotonicity/concavity of P and convexity of each c_i
/// on the tabled range and clamps q_cap to what the tables can serve.
/// q_cap = 0 picks a default from the price's choke point.
Oligopoly make_oligopoly(IntegerPrice price, std::vector<IntegerCost> costs, Quantity q_cap = 0);

struct ResponseRange {
  Quantity q_l = 0;
  Quantity q_u = 0;

  /// q_l > q_u only when no quantity up to Q+1 stops being profitable.
  bool empty() const noexcept { return q_l > q_u; }
  friend bool operator==(const ResponseRange&, const ResponseRange&) = default;
};

/// Counts marginal-profit evaluations made by the search routines.
struct EvalCounter {
  std::uint64_t f_evaluations = 0;
};

double profit_i(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q);

/// f_i(q_i, Q) = pi_i(q_i+1, Q+1) - pi_i(q_i, Q) = P(Q+1) + P'(Q) q_i - c_i'(q_i),
/// zero if either argument is negative.
double marginal_profit_i(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q,
                         EvalCounter* counter = nullptr);

/// Objectives whose maximizers bracket the response range:
/// F_i(q,Q) = P(Q+1) q + P'(Q)(q-1/2)^2 / 2 - c_i(q), G_i(q,Q) = F_i(q,Q-1).
double lower_response_objective(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q);
double upper_response_objective(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q);

/// q_l = min q >= 0 with f_i(q,Q) <= 0 (Q+2 when none up to Q+1),
/// q_u = max q <= Q+1 with f_i(q-1,Q-1) >= 0.
ResponseRange best_response_range(const Oligopoly& olig, std::size_t firm, Quantity Q,
                                  EvalCounter* counter = nullptr);

/// Minimum maximizer of pi_i(q, q), by galloping then binary search on the
/// sign of f_i(q, q). Throws OutOfRange if it lies beyond q_cap.
Quantity monopoly_optimum(const Oligopoly& olig, std::size_t firm, EvalCounter* counter = nullptr);

/// Start at every q_l and hand out the remaining units one at a time,
/// round-robin in firm-index order, skipping firms already at q_u.
/// Throws Infeasible unless sum q_l <= Q <= sum q_u.
std::vector<Quantity> fill_quantities(const std::vector<ResponseRange>& ranges, Quantity Q);

struct OligopolySolution {
  /// Empty when no pure integral equilibrium exists.
  std::optional<std::vector<Quantity>> quantities;
  Quantity total = 0;
  /// Sum of the firms' monopoly optima, the outer search ceiling.
  Quantity q_max = 0;
  std::uint64_t f_evaluations = 0;
  std::size_t outer_iterations = 0;
  /// Totals the outer search examined, in order.
  std::vector<Quantity> probed_totals;

  bool found() const noexcept { return quantities.has_value(); }
};

/// Nested binary search for a pure integral equilibrium.
OligopolySolution solve_oligopoly(const Oligopoly& olig);

/// Discrete Nash condition via one-unit deviations (sufficient under the
/// concavity assumptions make_oligopoly enforces).
bool is_integral_equilibrium(const Oligopoly& olig, const std::vector<Quantity>& q);

struct MarketOligopoly {
  std::size_t market;
  /// Network edge index of each oligopoly firm, in firm order.
  std::vector<std::size_t> edges;
  Oligopoly oligopoly;
};

/// Splits a network whose costs have no cross-market coupling into one
/// integral oligopoly per market. Throws NotSeparable otherwise.
std::vector<MarketOligopoly> decompose_separable(const MarketNetwork& net, Quantity q_cap = 0);

}  // namespace cournot
