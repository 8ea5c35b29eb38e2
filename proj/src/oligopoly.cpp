#include "cournot/oligopoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cournot/error.hpp"

namespace cournot {

namespace {

constexpr Quantity kAnalyticCeiling = Quantity{1} << 40;

Quantity default_cap(const IntegerPrice& price) {
  if (const auto* p = std::get_if<PriceFunction>(&price.source())) {
    const double choke = p->choke_demand();
    if (std::isfinite(choke)) return std::max<Quantity>(64, 4 * static_cast<Quantity>(std::ceil(choke)) + 8);
    return kAnalyticCeiling;
  }
  return price.max_argument();
}

}  // namespace

IntegerPrice::IntegerPrice(Table table) : source_(std::move(table)) {
  if (std::get<Table>(source_).empty()) throw Error(ErrorCode::InvalidArgument, "price table is empty");
}

double IntegerPrice::operator()(Quantity Q) const {
  if (Q < 0) return 0.0;
  if (const auto* t = std::get_if<Table>(&source_)) {
    if (Q >= static_cast<Quantity>(t->size())) {
      throw Error(ErrorCode::OutOfRange, "price table has no entry for Q=" + std::to_string(Q));
    }
    return (*t)[static_cast<std::size_t>(Q)];
  }
  return std::get<PriceFunction>(source_).value(static_cast<double>(Q));
}

Quantity IntegerPrice::max_argument() const {
  if (const auto* t = std::get_if<Table>(&source_)) return static_cast<Quantity>(t->size()) - 1;
  return kAnalyticCeiling;
}

IntegerCost::IntegerCost(Table table) : source_(std::move(table)) {
  if (std::get<Table>(source_).empty()) throw Error(ErrorCode::InvalidArgument, "cost table is empty");
}

double IntegerCost::operator()(Quantity q) const {
  if (q < 0) return 0.0;
  if (const auto* t = std::get_if<Table>(&source_)) {
    if (q >= static_cast<Quantity>(t->size())) {
      throw Error(ErrorCode::OutOfRange, "cost table has no entry for q=" + std::to_string(q));
    }
    return (*t)[static_cast<std::size_t>(q)];
  }
  const auto& c = std::get<Quadratic>(source_);
  const auto x = static_cast<double>(q);
  return 0.5 * c.lambda * x * x + c.mu * x;
}

Quantity IntegerCost::max_argument() const {
  if (const auto* t = std::get_if<Table>(&source_)) return static_cast<Quantity>(t->size()) - 1;
  return kAnalyticCeiling;
}

Oligopoly make_oligopoly(IntegerPrice price, std::vector<IntegerCost> costs, Quantity q_cap) {
  if (costs.empty()) throw Error(ErrorCode::InvalidArgument, "oligopoly needs at least one firm");

  if (const auto* t = std::get_if<IntegerPrice::Table>(&price.source())) {
    for (std::size_t Q = 0; Q + 1 < t->size(); ++Q) {
      const double step = (*t)[Q + 1] - (*t)[Q];
      if (step > 0.0) {
        throw Error(ErrorCode::NonDecreasingPrice, "price table increases at Q=" + std::to_string(Q));
      }
      if (Q + 2 < t->size() && (*t)[Q + 2] - (*t)[Q + 1] > step) {
        throw Error(ErrorCode::NonDecreasingPrice, "price table is not concave at Q=" + std::to_string(Q + 1));
      }
    }
  } else {
    const auto& p = std::get<PriceFunction>(price.source());
    const double choke = p.choke_demand();
    p.validate(std::isfinite(choke) ? std::max(10.0, 10.0 * choke) : 10.0);
  }

  for (const auto& c : costs) {
    if (const auto* t = std::get_if<IntegerCost::Table>(&c.source())) {
      if ((*t)[0] != 0.0) throw Error(ErrorCode::NonConvexCost, "cost table must start at c(0)=0");
      for (std::size_t q = 0; q + 1 < t->size(); ++q) {
        if ((*t)[q + 1] < 0.0) throw Error(ErrorCode::NonConvexCost, "cost table must be nonnegative");
        if (q + 2 < t->size() && (*t)[q + 2] - (*t)[q + 1] < (*t)[q + 1] - (*t)[q]) {
          throw Error(ErrorCode::NonConvexCost, "cost table is not convex at q=" + std::to_string(q + 1));
        }
      }
    } else {
      const auto& quad = std::get<IntegerCost::Quadratic>(c.source());
      if (!(quad.lambda >= 0.0) || !(quad.mu >= 0.0) || !std::isfinite(quad.lambda) || !std::isfinite(quad.mu)) {
        throw Error(ErrorCode::NonConvexCost, "integral quadratic cost needs lambda >= 0 and mu >= 0");
      }
    }
  }

  if (q_cap < 0) throw Error(ErrorCode::InvalidArgument, "q_cap must be nonnegative");
  Quantity cap = q_cap > 0 ? q_cap : default_cap(price);
  cap = std::min(cap, price.max_argument());
  for (const auto& c : costs) cap = std::min(cap, c.max_argument());
  return Oligopoly{std::move(price), std::move(costs), cap};
}

double profit_i(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q) {
  if (q_i < 0 || Q < 0) return 0.0;
  return olig.price(Q) * static_cast<double>(q_i) - olig.costs.at(firm)(q_i);
}

double marginal_profit_i(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q, EvalCounter* counter) {
  if (q_i < 0 || Q < 0) return 0.0;
  if (counter != nullptr) ++counter->f_evaluations;
  const double p_next = olig.price(Q + 1);
  const double slope = p_next - olig.price(Q);
  const auto& c = olig.costs.at(firm);
  return p_next + slope * static_cast<double>(q_i) - (c(q_i + 1) - c(q_i));
}

double lower_response_objective(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q) {
  const double p_next = olig.price(Q + 1);
  const double slope = p_next - olig.price(Q);
  const double x = static_cast<double>(q_i);
  return p_next * x + 0.5 * slope * (x - 0.5) * (x - 0.5) - olig.costs.at(firm)(q_i);
}

double upper_response_objective(const Oligopoly& olig, std::size_t firm, Quantity q_i, Quantity Q) {
  return lower_response_objective(olig, firm, q_i, Q - 1);
}

ResponseRange best_response_range(const Oligopoly& olig, std::size_t firm, Quantity Q, EvalCounter* counter) {
  if (Q < 0) throw Error(ErrorCode::InvalidArgument, "total quantity must be nonnegative");

  // First q in [0, Q+1] where producing one more unit stops paying; Q+2 if none.
  Quantity lo = 0;
  Quantity hi = Q + 2;
  while (lo < hi) {
    const Quantity mid = lo + (hi - lo) / 2;
    if (marginal_profit_i(olig, firm, mid, Q, counter) <= 0.0) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const Quantity q_l = lo;

  // Last q in [0, Q+1] where dropping one unit does not pay; q = 0 always qualifies.
  lo = 0;
  hi = Q + 1;
  while (lo < hi) {
    const Quantity mid = lo + (hi - lo + 1) / 2;
    if (marginal_profit_i(olig, firm, mid - 1, Q - 1, counter) >= 0.0) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return ResponseRange{q_l, lo};
}

Quantity monopoly_optimum(const Oligopoly& olig, std::size_t firm, EvalCounter* counter) {
  auto stops_paying = [&](Quantity q) { return marginal_profit_i(olig, firm, q, q, counter) <= 0.0; };
  if (stops_paying(0)) return 0;

  const Quantity limit = olig.q_cap - 1;
  auto out_of_range = [&] {
    return Error(ErrorCode::OutOfRange, "monopoly optimum of firm " + std::to_string(firm) +
                                            " lies beyond the evaluation ceiling " + std::to_string(olig.q_cap));
  };
  Quantity lo = 0;
  Quantity hi = 1;
  while (true) {
    if (hi > limit) {
      hi = limit;
      if (hi <= lo || !stops_paying(hi)) throw out_of_range();
      break;
    }
    if (stops_paying(hi)) break;
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Quantity mid = lo + (hi - lo) / 2;
    (stops_paying(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<Quantity> fill_quantities(const std::vector<ResponseRange>& ranges, Quantity Q) {
  Quantity sum_l = 0;
  Quantity sum_u = 0;
  for (const auto& r : ranges) {
    if (r.empty()) throw Error(ErrorCode::Infeasible, "a response range is empty");
    sum_l += r.q_l;
    sum_u += r.q_u;
  }
  if (sum_l > Q || sum_u < Q) {
    std::ostringstream os;
    os << "cannot reach total " << Q << " from ranges summing to [" << sum_l << ", " << sum_u << "]";
    throw Error(ErrorCode::Infeasible, os.str());
  }
  std::vector<Quantity> q;
  q.reserve(ranges.size());
  for (const auto& r : ranges) q.push_back(r.q_l);
  // Round-robin: one unit per firm with slack, in index order, until Q is
  // reached. Whole rounds are applied in bulk.
  Quantity remaining = Q - sum_l;
  while (remaining > 0) {
    std::vector<std::size_t> open;
    Quantity min_slack = std::numeric_limits<Quantity>::max();
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (q[i] < ranges[i].q_u) {
        open.push_back(i);
        min_slack = std::min(min_slack, ranges[i].q_u - q[i]);
      }
    }
    const auto k = static_cast<Quantity>(open.size());
    const Quantity rounds = std::min(min_slack, remaining / k);
    if (rounds > 0) {
      for (std::size_t i : open) q[i] += rounds;
      remaining -= rounds * k;
    } else {
      for (std::size_t t = 0; remaining > 0; ++t, --remaining) ++q[open[t]];
    }
  }
  return q;
}

OligopolySolution solve_oligopoly(const Oligopoly& olig) {
  const std::size_t n = olig.n_firms();
  OligopolySolution sol;
  EvalCounter counter;

  for (std::size_t i = 0; i < n; ++i) sol.q_max += monopoly_optimum(olig, i, &counter);

  Quantity q_min = 1;
  Quantity q_max = sol.q_max;
  std::vector<ResponseRange> ranges(n);
  while (q_min <= q_max) {
    const Quantity guess = q_min + (q_max - q_min) / 2;
    ++sol.outer_iterations;
    sol.probed_totals.push_back(guess);
    Quantity sum_l = 0;
    Quantity sum_u = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ranges[i] = best_response_range(olig, i, guess, &counter);
      sum_l += ranges[i].q_l;
      sum_u += ranges[i].q_u;
    }
    if (sum_l > guess) {
      q_min = guess + 1;
    } else if (sum_u < guess) {
      q_max = guess - 1;
    } else {
      sol.quantities = fill_quantities(ranges, guess);
      sol.total = guess;
      sol.f_evaluations = counter.f_evaluations;
      return sol;
    }
  }

  // The outer search starts at 1, so the all-zero profile is checked separately.
  bool zero_is_equilibrium = true;
  for (std::size_t i = 0; i < n && zero_is_equilibrium; ++i) {
    zero_is_equilibrium = marginal_profit_i(olig, i, 0, 0, &counter) <= 0.0;
  }
  if (zero_is_equilibrium) {
    sol.quantities = std::vector<Quantity>(n, 0);
    sol.total = 0;
  }
  sol.f_evaluations = counter.f_evaluations;
  return sol;
}

bool is_integral_equilibrium(const Oligopoly& olig, const std::vector<Quantity>& q) {
  if (q.size() != olig.n_firms()) throw Error(ErrorCode::ShapeMismatch, "one quantity per firm required");
  if (std::any_of(q.begin(), q.end(), [](Quantity x) { return x < 0; })) return false;
  const Quantity Q = std::accumulate(q.begin(), q.end(), Quantity{0});
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (marginal_profit_i(olig, i, q[i], Q) > 0.0) return false;
    if (q[i] > 0 && marginal_profit_i(olig, i, q[i] - 1, Q - 1) < 0.0) return false;
  }
  return true;
}

std::vector<MarketOligopoly> decompose_separable(const MarketNetwork& net, Quantity q_cap) {
  std::vector<SeparableTerms> terms;
  terms.reserve(net.n_firms());
  for (std::size_t j = 0; j < net.n_firms(); ++j) {
    auto t = net.cost(j).separable_terms(net.firm_edges(j).size());
    if (!t) {
      throw Error(ErrorCode::NotSeparable,
                  "firm " + net.firm_name(j) + " has a " + net.cost(j).kind() + " cost coupling its markets");
    }
    terms.push_back(std::move(*t));
  }

  std::vector<MarketOligopoly> out;
  for (std::size_t i = 0; i < net.n_markets(); ++i) {
    std::vector<IntegerCost> costs;
    const auto& edges = net.market_edges(i);
    for (std::size_t e : edges) {
      const std::size_t j = net.edge(e).firm;
      const auto& fe = net.firm_edges(j);
      const auto pos = static_cast<std::size_t>(std::find(fe.begin(), fe.end(), e) - fe.begin());
      costs.push_back(IntegerCost::quadratic(terms[j].lambda[pos], terms[j].mu[pos]));
    }
    out.push_back(MarketOligopoly{i, edges, make_oligopoly(IntegerPrice(net.price(i)), std::move(costs), q_cap)});
  }
  return out;
}

}  // namespace cournot
