#include "cournot/nlcp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cournot/error.hpp"

namespace cournot {

double revenue_margin(const PriceFunction& price, double D) {
  const double a = std::abs(price.derivative(D));
  const double b = std::abs(price.second_derivative(D)) * D / 2.0;
  const double margin = a - b;
  if (std::abs(margin) <= 1e-12 * std::max(a, b)) return 0.0;
  return margin;
}

MonotonicityReport check_monotone_revenue(const PriceFunction& price, const std::vector<double>& d_grid) {
  if (d_grid.empty()) throw Error(ErrorCode::InvalidArgument, "demand grid is empty");
  MonotonicityReport r;
  double worst = std::numeric_limits<double>::infinity();
  double worst_D = d_grid.front();
  for (double D : d_grid) {
    if (!(D >= 0.0)) throw Error(ErrorCode::InvalidArgument, "demand grid must be nonnegative");
    const double m = revenue_margin(price, D);
    if (m < worst) {
      worst = m;
      worst_D = D;
    }
  }
  r.worst_margin = worst;
  r.worst_D = {worst_D};
  r.market_margin = {worst};
  r.condition_holds = worst >= 0.0;
  return r;
}

MonotonicityReport check_monotone_revenue(const MarketNetwork& net, const std::vector<double>& d_grid) {
  MonotonicityReport r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.n_markets(); ++i) {
    const MonotonicityReport one = check_monotone_revenue(net.price(i), d_grid);
    r.worst_D.push_back(one.worst_D.front());
    r.market_margin.push_back(one.worst_margin);
    r.worst_margin = std::min(r.worst_margin, one.worst_margin);
  }
  r.condition_holds = r.worst_margin >= 0.0;
  return r;
}

std::vector<double> uniform_grid(double cap, std::size_t points) {
  if (points < 2 || !(cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid needs cap > 0 and >= 2 points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) grid[k] = cap * static_cast<double>(k) / static_cast<double>(points - 1);
  return grid;
}

double default_q_cap(const MarketNetwork& net) {
  double choke = -1.0;
  for (const auto& p : net.prices()) {
    const double c = p.choke_demand();
    if (std::isfinite(c)) choke = std::max(choke, c);
  }
  return choke < 0.0 ? 1e6 : 10.0 * (choke + 1.0);
}

QuantityVector initial_feasible_point(const NcpProblem& problem, const Eigen::VectorXd& direction,
                                      const NcpConfig& cfg) {
  const MarketNetwork& net = problem.network();
  net.check_shape(direction);
  if (!(direction.array() > 0.0).all()) throw Error(ErrorCode::InvalidArgument, "direction must be positive");
  const double cap = cfg.q_cap > 0.0 ? cfg.q_cap : default_q_cap(net);
  const double t_max = cap / direction.maxCoeff();
  auto interior = [&](double t) { return (problem.F(t * direction).array() > 1e-12).all(); };
  if (!interior(t_max)) {
    throw Error(ErrorCode::NoFeasiblePoint, "no t <= q_cap makes every marginal profit negative");
  }
  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (interior(mid) ? hi : lo) = mid;
  }
  // Step away from the boundary so the path starts well centred.
  const double t = 2.0 * hi <= t_max && interior(2.0 * hi) ? 2.0 * hi : hi;
  return t * direction;
}

QuantityVector initial_feasible_point(const NcpProblem& problem, const NcpConfig& cfg) {
  return initial_feasible_point(problem, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(problem.dimension())), cfg);
}

namespace {

std::optional<Eigen::VectorXd> newton_direction(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs) {
  const auto n = M.rows();
  double delta = 0.0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M + delta * Eigen::MatrixXd::Identity(n, n));
    if (lu.isInvertible()) {
      Eigen::VectorXd dq = lu.solve(rhs);
      if (dq.allFinite()) return dq;
    }
    delta = delta == 0.0 ? 1e-12 : 100.0 * delta;
  }
  return std::nullopt;
}

}  // namespace

EquilibriumResult solve_ncp(const NcpProblem& problem, const NcpConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !(cfg.sigma > 0.0 && cfg.sigma < 1.0) ||
      !(cfg.boundary_fraction > 0.0 && cfg.boundary_fraction < 1.0) || cfg.max_iters < 1 || cfg.q_cap < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "ncp config out of range");
  }
  const MarketNetwork& net = problem.network();
  const auto E = static_cast<double>(problem.dimension());

  QuantityVector q;
  if (cfg.initial_point) {
    net.check_shape(*cfg.initial_point);
    q = *cfg.initial_point;
    if (!(q.array() > 0.0).all() || !(problem.F(q).array() > 0.0).all()) {
      throw Error(ErrorCode::InvalidArgument, "initial point must satisfy q > 0 and F(q) > 0");
    }
  } else {
    q = initial_feasible_point(problem, cfg);
  }

  EquilibriumResult r;
  r.method = "nlcp";
  Eigen::VectorXd F = problem.F(q);
  double mu = q.dot(F) / E;
  r.mu0 = mu;
  r.mu_trace.push_back(mu);
  const double gamma = std::min(1e-3, 0.5 * (q.array() * F.array()).minCoeff() / mu);
  r.status = SolveStatus::MaxItersExceeded;

  std::size_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (mu <= cfg.epsilon) {
      r.status = SolveStatus::Converged;
      break;
    }
    const Eigen::MatrixXd M = Eigen::MatrixXd(F.asDiagonal()) + q.asDiagonal() * problem.jacobian(q);
    const Eigen::VectorXd rhs = (cfg.sigma * mu - (q.array() * F.array())).matrix();
    const auto dq = newton_direction(M, rhs);
    if (!dq) {
      r.status = SolveStatus::NewtonSingular;
      break;
    }

    double alpha = 1.0;
    for (Eigen::Index e = 0; e < q.size(); ++e) {
      if ((*dq)[e] < 0.0) alpha = std::min(alpha, -cfg.boundary_fraction * q[e] / (*dq)[e]);
    }
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
      const QuantityVector trial = q + alpha * *dq;
      if (!(trial.array() > 0.0).all()) continue;
      const Eigen::VectorXd Ft = problem.F(trial);
      if (!(Ft.array() >= (1.0 - cfg.boundary_fraction) * F.array()).all() || !(Ft.array() > 0.0).all()) continue;
      const double mu_t = trial.dot(Ft) / E;
      if (!(mu_t < mu) || (trial.array() * Ft.array()).minCoeff() < gamma * mu_t) continue;
      q = trial;
      F = Ft;
      mu = mu_t;
      accepted = true;
      break;
    }
    if (!accepted) {
      r.status = SolveStatus::Stalled;
      break;
    }
    r.mu_trace.push_back(mu);
  }
  if (r.status == SolveStatus::MaxItersExceeded && mu <= cfg.epsilon) r.status = SolveStatus::Converged;
  r.iterations = it;
  r.stationarity = mu;
  r.q = q;
  fill_outcome(net, r);
  return r;
}

SlcReport check_slc_empirical(const NcpProblem& problem, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const MarketNetwork& net = problem.network();
  const auto E = static_cast<Eigen::Index>(problem.dimension());

  double scale = 1.0;
  try {
    scale = initial_feasible_point(problem).maxCoeff();
  } catch (const Error&) {
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  SlcReport r;
  for (std::size_t k = 0; k < n_samples; ++k) {
    QuantityVector x(E);
    Eigen::VectorXd u(E);
    for (Eigen::Index e = 0; e < E; ++e) {
      x[e] = scale * (0.05 + unif(rng));
      u[e] = normal(rng);
    }
    u *= std::pow(unif(rng), 1.0 / static_cast<double>(E)) / std::max(u.norm(), 1e-300);
    const Eigen::VectorXd h = x.cwiseProduct(u);

    const Eigen::VectorXd D = demands(net, x);
    Eigen::VectorXd shift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.n_markets()));
    for (Eigen::Index e = 0; e < E; ++e) shift[static_cast<Eigen::Index>(net.edge(static_cast<std::size_t>(e)).market)] += h[e];

    // Costs are quadratic, so only the price side leaves a remainder.
    double lhs = 0.0;
    for (Eigen::Index e = 0; e < E; ++e) {
      const std::size_t i = net.edge(static_cast<std::size_t>(e)).market;
      const PriceFunction& P = net.price(i);
      const double Di = D[static_cast<Eigen::Index>(i)];
      const double di = shift[static_cast<Eigen::Index>(i)];
      const double t2 = P.derivative_taylor_remainder(Di, di);
      const double rem = -P.taylor_remainder(Di, di) - x[e] * t2 - h[e] * (P.second_derivative(Di) * di + t2);
      lhs = std::max(lhs, std::abs(x[e] * rem));
    }
    const double rhs = std::abs(h.dot(problem.jacobian(x) * h));
    if (rhs < 1e-14) {
      ++r.skipped;
      continue;
    }
    ++r.samples;
    r.lambda_hat = std::max(r.lambda_hat, lhs / rhs);
  }
  return r;
}

}  // namespace cournot
