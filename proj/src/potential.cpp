#include "cournot/potential.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cournot/error.hpp"

namespace cournot {

PotentialProblem::PotentialProblem(MarketNetwork net) : net_(std::move(net)) {
  const auto m = static_cast<Eigen::Index>(net_.n_markets());
  alpha_.resize(m);
  beta_.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto* lin = std::get_if<PriceFunction::Linear>(&net_.price(static_cast<std::size_t>(i)).params());
    if (lin == nullptr) {
      throw Error(ErrorCode::MethodInapplicable, "potential method needs linear prices; market " +
                                                     net_.market_name(static_cast<std::size_t>(i)) + " is " +
                                                     net_.price(static_cast<std::size_t>(i)).kind());
    }
    alpha_[i] = lin->alpha;
    beta_[i] = lin->beta;
  }
}

double potential_value(const PotentialProblem& prob, const QuantityVector& q) {
  const MarketNetwork& net = prob.network();
  net.check_shape(q);
  double value = 0.0;
  for (std::size_t i = 0; i < net.n_markets(); ++i) {
    double total = 0.0;
    double squares = 0.0;
    for (std::size_t e : net.market_edges(i)) {
      const double x = q[static_cast<Eigen::Index>(e)];
      total += x;
      squares += x * x;
    }
    const double pairs = 0.5 * (total * total - squares);  // sum over k < j
    const auto ii = static_cast<Eigen::Index>(i);
    value += prob.alpha()[ii] * total - prob.beta()[ii] * squares - prob.beta()[ii] * pairs;
  }
  for (std::size_t j = 0; j < net.n_firms(); ++j) value -= net.cost(j).value(firm_strategy(net, q, j));
  return value;
}

Eigen::VectorXd potential_gradient(const PotentialProblem& prob, const QuantityVector& q) {
  const MarketNetwork& net = prob.network();
  const Eigen::VectorXd D = demands(net, q);
  Eigen::VectorXd g(q.size());
  for (Eigen::Index e = 0; e < q.size(); ++e) {
    const auto i = static_cast<Eigen::Index>(net.edge(static_cast<std::size_t>(e)).market);
    g[e] = prob.alpha()[i] - prob.beta()[i] * D[i] - prob.beta()[i] * q[e];
  }
  for (std::size_t j = 0; j < net.n_firms(); ++j) {
    const Eigen::VectorXd c = net.cost(j).gradient(firm_strategy(net, q, j));
    const auto& idx = net.firm_edges(j);
    for (std::size_t k = 0; k < idx.size(); ++k) g[static_cast<Eigen::Index>(idx[k])] -= c[static_cast<Eigen::Index>(k)];
  }
  return g;
}

namespace {

// Largest curvature of -P* by power iteration on gradient differences, which
// are exact Hessian-vector products for these quadratic potentials.
double estimate_lipschitz(const PotentialProblem& prob, std::uint64_t seed) {
  const auto E = static_cast<Eigen::Index>(prob.network().n_edges());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd base(E);
  Eigen::VectorXd v(E);
  for (Eigen::Index e = 0; e < E; ++e) {
    base[e] = unif(rng);
    v[e] = unif(rng) + 0.1;
  }
  const Eigen::VectorXd g0 = potential_gradient(prob, base);
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    v.normalize();
    const Eigen::VectorXd hv = g0 - potential_gradient(prob, base + v);
    const double next = hv.norm();
    if (next == 0.0) return 0.0;
    v = hv;
    if (it > 10 && std::abs(next - lambda) <= 1e-10 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace

EquilibriumResult solve_potential(const PotentialProblem& prob, const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "tol > 0 and max_iters >= 1 required");
  const MarketNetwork& net = prob.network();
  const auto E = static_cast<Eigen::Index>(net.n_edges());

  EquilibriumResult r;
  r.method = "potential";
  QuantityVector q = QuantityVector::Zero(E);
  if (cfg.initial_point) {
    net.check_shape(*cfg.initial_point);
    q = cfg.initial_point->cwiseMax(0.0);
  }

  const double L = 1.05 * estimate_lipschitz(prob, cfg.seed);
  const double base_step = L > 0.0 ? 1.0 / L : 1.0;
  // Gershgorin bound on the (constant) curvature: steps at or below 1/bound
  // ascend in exact arithmetic, so they are taken even when the Armijo test
  // is lost in rounding near the optimum.
  const double gershgorin = jacobian_F(net, q).cwiseAbs().rowwise().sum().maxCoeff();
  const double safe_step = gershgorin > 0.0 ? 1.0 / gershgorin : 0.0;
  double step = base_step;
  double value = potential_value(prob, q);
  r.status = SolveStatus::MaxItersExceeded;

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const Eigen::VectorXd g = potential_gradient(prob, q);
    r.stationarity = ((q + g).cwiseMax(0.0) - q).lpNorm<Eigen::Infinity>();
    r.iterations = it;
    if (r.stationarity <= cfg.tol) {
      r.status = SolveStatus::Converged;
      break;
    }
    // Constant curvature: 1/L is the right trial step; only a flat
    // potential (L = 0) needs growing steps to detect unboundedness.
    step = L > 0.0 ? base_step : 2.0 * step;
    QuantityVector trial;
    double trial_value = value;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      trial = (q + step * g).cwiseMax(0.0);
      trial_value = potential_value(prob, trial);
      if (trial_value >= value + cfg.sufficient_increase * g.dot(trial - q) || step <= safe_step) {
        accepted = true;
        break;
      }
      step *= cfg.backtrack_factor;
    }
    if (!accepted) {
      r.status = SolveStatus::Stalled;
      break;
    }
    q = std::move(trial);
    value = trial_value;
    if (q.lpNorm<Eigen::Infinity>() > cfg.q_cap) {
      r.status = SolveStatus::Unbounded;
      r.iterations = it + 1;
      break;
    }
  }

  if (r.status == SolveStatus::MaxItersExceeded) r.iterations = cfg.max_iters;
  r.q = q;
  fill_outcome(net, r);
  return r;
}

}  // namespace cournot
