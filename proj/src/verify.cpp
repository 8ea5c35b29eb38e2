#include "cournot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cournot/error.hpp"
#include "cournot/result.hpp"

namespace cournot {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxItersExceeded: return "max_iters_exceeded";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NewtonSingular: return "newton_singular";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::NoEquilibrium: return "no_equilibrium";
  }
  return "unknown";
}

void fill_outcome(const MarketNetwork& net, EquilibriumResult& r) {
  r.demands = demands(net, r.q);
  r.prices = market_prices(net, r.q);
  r.profits = profits(net, r.q);
  r.mu = complementarity_residual(net, r.q, 0.0).mu;
}

double VerificationReport::max_gain() const {
  double g = 0.0;
  for (double x : worst_deviation_gain) g = std::max(g, x);
  return g;
}

VerificationReport complementarity_residual(const MarketNetwork& net, const QuantityVector& q, double tol) {
  net.check_shape(q);
  const Eigen::VectorXd F = marginal_field(net, q).F;
  VerificationReport r;
  r.tol = tol;
  r.gain_tol = tol;
  r.feasible_q = (q.array() >= -tol).all();
  r.feasible_F = (F.array() >= -tol).all();
  r.mu = q.dot(F) / static_cast<double>(net.n_edges());
  r.verdict = r.feasible_q && r.feasible_F && std::abs(r.mu) <= tol;
  return r;
}

namespace {

QuantityVector with_strategy(const MarketNetwork& net, QuantityVector q, std::size_t firm, const Eigen::VectorXd& s) {
  const auto& idx = net.firm_edges(firm);
  for (std::size_t k = 0; k < idx.size(); ++k) q[static_cast<Eigen::Index>(idx[k])] = s[static_cast<Eigen::Index>(k)];
  return q;
}

Eigen::MatrixXd own_block(const MarketNetwork& net, const QuantityVector& q, std::size_t firm) {
  const Eigen::MatrixXd J = jacobian_F(net, q);
  const auto& idx = net.firm_edges(firm);
  const auto d = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd B(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      B(a, b) = J(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                  static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]));
    }
  }
  return 0.5 * (B + B.transpose());
}

// Projected gradient ascent on firm j's own quantities with Armijo backtracking.
double maximize_own_profit(const MarketNetwork& net, const QuantityVector& q, std::size_t firm, Eigen::VectorXd s) {
  const auto& idx = net.firm_edges(firm);
  auto objective = [&](const Eigen::VectorXd& x) { return profit(net, with_strategy(net, q, firm, x), firm); };
  auto gradient = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd F = marginal_field(net, with_strategy(net, q, firm, x)).F;
    Eigen::VectorXd g(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) g[static_cast<Eigen::Index>(k)] = -F[static_cast<Eigen::Index>(idx[k])];
    return g;
  };

  const double curvature = own_block(net, with_strategy(net, q, firm, s), firm).cwiseAbs().rowwise().sum().maxCoeff();
  double step = 1.0 / std::max(curvature, 1e-12);
  double value = objective(s);
  for (int it = 0; it < 5000; ++it) {
    const Eigen::VectorXd g = gradient(s);
    const Eigen::VectorXd natural = (s + g).cwiseMax(0.0) - s;
    if (natural.lpNorm<Eigen::Infinity>() < 1e-14) break;
    bool accepted = false;
    step *= 2.0;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd trial = (s + step * g).cwiseMax(0.0);
      const double trial_value = objective(trial);
      if (trial_value >= value + 1e-4 * g.dot(trial - s)) {
        accepted = true;
        s = trial;
        value = std::max(value, trial_value);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return value;
}

}  // namespace

VerificationReport best_response_check(const MarketNetwork& net, const QuantityVector& q, double tol,
                                       std::optional<double> gain_tol) {
  VerificationReport r = complementarity_residual(net, q, tol);
  r.gain_tol = gain_tol.value_or(tol);
  if (!r.feasible_q) {
    r.worst_deviation_gain.assign(net.n_firms(), std::numeric_limits<double>::infinity());
    r.verdict = false;
    return r;
  }
  const QuantityVector q0 = q.cwiseMax(0.0);
  std::mt19937_64 rng(20240917);
  std::normal_distribution<double> normal;

  for (std::size_t j = 0; j < net.n_firms(); ++j) {
    const Eigen::VectorXd s = firm_strategy(net, q0, j);
    const double base = profit(net, q0, j);
    const double scale = 1.0 + (s.size() > 0 ? s.maxCoeff() : 0.0);
    const Eigen::VectorXd starts[] = {s, Eigen::VectorXd::Zero(s.size()),
                                      (2.0 * s.array() + 0.1 * scale).matrix()};
    double best = base;
    for (const auto& start : starts) best = std::max(best, maximize_own_profit(net, q0, j, start));
    r.worst_deviation_gain.push_back(best - base);

    // Own-profit Hessian is -(dF/ds); positive sampled curvature breaks the
    // concavity this check relies on.
    for (int k = 0; k < 4 && !r.non_concave_warning; ++k) {
      Eigen::VectorXd at = s;
      if (k > 0) {
        for (Eigen::Index i = 0; i < at.size(); ++i) at[i] += scale * std::abs(normal(rng));
      }
      const Eigen::MatrixXd H = -own_block(net, with_strategy(net, q0, j, at), j);
      for (int t = 0; t < 8; ++t) {
        Eigen::VectorXd x(s.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
        if (x.dot(H * x) > 1e-10 * x.squaredNorm() * std::max(1.0, H.cwiseAbs().maxCoeff())) {
          r.non_concave_warning = true;
          break;
        }
      }
    }
  }
  r.verdict = r.verdict && r.max_gain() <= r.gain_tol;
  return r;
}

GridEquilibrium brute_force_grid_equilibrium(const MarketNetwork& net, double step, double q_max,
                                             std::size_t max_rounds) {
  if (!(step > 0.0) || !(q_max >= 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  const auto levels = static_cast<std::int64_t>(std::floor(q_max / step + 1e-9)) + 1;
  for (std::size_t j = 0; j < net.n_firms(); ++j) {
    const double points = std::pow(static_cast<double>(levels), static_cast<double>(net.firm_edges(j).size()));
    if (points > 1e7) throw Error(ErrorCode::TooLarge, "grid best response for firm " + net.firm_name(j) + " exceeds 1e7 points");
  }

  const auto E = static_cast<Eigen::Index>(net.n_edges());
  std::vector<std::int64_t> state(static_cast<std::size_t>(E), 0);
  auto to_q = [&](const std::vector<std::int64_t>& st) {
    QuantityVector q(E);
    for (Eigen::Index e = 0; e < E; ++e) q[e] = static_cast<double>(st[static_cast<std::size_t>(e)]) * step;
    return q;
  };

  GridEquilibrium out;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    const QuantityVector q = to_q(state);
    const Eigen::VectorXd D = demands(net, q);
    std::vector<std::int64_t> next = state;
    for (std::size_t j = 0; j < net.n_firms(); ++j) {
      const auto& idx = net.firm_edges(j);
      const std::size_t d = idx.size();
      std::vector<double> others(d);
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t e = idx[k];
        others[k] = D[static_cast<Eigen::Index>(net.edge(e).market)] - q[static_cast<Eigen::Index>(e)];
      }
      // Odometer over the firm's grid; the last coordinate runs fastest so the
      // first maximizer met is the lexicographically smallest one.
      std::vector<std::int64_t> digit(d, 0);
      std::vector<std::int64_t> best_digit(d, 0);
      double best = 0.0;
      bool have_best = false;
      Eigen::VectorXd s(static_cast<Eigen::Index>(d));
      while (true) {
        double revenue = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double x = static_cast<double>(digit[k]) * step;
          s[static_cast<Eigen::Index>(k)] = x;
          revenue += net.price(net.edge(idx[k]).market).value(others[k] + x) * x;
        }
        const double value = revenue - net.cost(j).value(s);
        if (!have_best || value > best + 1e-12 * (1.0 + std::abs(best))) {
          have_best = true;
          best = value;
          best_digit = digit;
        }
        bool wrapped = true;
        for (std::size_t pos = d; pos-- > 0;) {
          if (++digit[pos] < levels) {
            wrapped = false;
            break;
          }
          digit[pos] = 0;
        }
        if (wrapped) break;
      }
      for (std::size_t k = 0; k < d; ++k) next[idx[k]] = best_digit[k];
    }
    out.rounds = round + 1;
    if (next == state) {
      out.converged = true;
      break;
    }
    state = std::move(next);
  }
  out.q = to_q(state);
  return out;
}

std::vector<std::vector<Quantity>> exhaustive_oligopoly_oracle(const Oligopoly& olig) {
  const std::size_t n = olig.n_firms();
  if (olig.q_cap > 10'000'000) throw Error(ErrorCode::TooLarge, "evaluation ceiling too large for a full scan");

  // Monopoly optima by direct profit comparison, independent of f_i.
  std::vector<Quantity> monopoly(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = profit_i(olig, i, 0, 0);
    for (Quantity q = 1; q <= olig.q_cap; ++q) {
      const double v = profit_i(olig, i, q, q);
      if (v > best) {
        best = v;
        monopoly[i] = q;
      }
    }
  }
  double profiles = 1.0;
  Quantity total_bound = 0;
  for (Quantity m : monopoly) {
    profiles *= static_cast<double>(m + 1);
    total_bound += m + 2;
  }
  if (profiles > 1e7) throw Error(ErrorCode::TooLarge, "oracle enumeration exceeds 1e7 profiles");

  std::vector<std::vector<Quantity>> equilibria;
  std::vector<Quantity> q(n, 0);
  while (true) {
    Quantity Q = 0;
    for (Quantity x : q) Q += x;
    bool stable = Q <= olig.q_cap;
    for (std::size_t i = 0; i < n && stable; ++i) {
      const Quantity rest = Q - q[i];
      const double current = profit_i(olig, i, q[i], Q);
      const Quantity deviation_cap = std::min(2 * total_bound, olig.q_cap - rest);
      for (Quantity alt = 0; alt <= deviation_cap; ++alt) {
        if (profit_i(olig, i, alt, rest + alt) > current) {
          stable = false;
          break;
        }
      }
    }
    if (stable) equilibria.push_back(q);

    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++q[pos] <= monopoly[pos] + 1) break;
      q[pos] = 0;
      if (pos == 0) return equilibria;
    }
  }
}

}  // namespace cournot
