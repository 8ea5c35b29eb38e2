#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cournot/error.hpp"
#include "cournot/oligopoly.hpp"
#include "cournot/verify.hpp"
#include "fixtures.hpp"

using namespace cournot;

namespace {

// P = 10 - Q with c(q) = mu q for every firm.
Oligopoly ten_minus_q(std::size_t n, double mu = 1.0) {
  return make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)),
                        std::vector<IntegerCost>(n, IntegerCost::quadratic(0, mu)));
}

// Independent Nash check: no integral deviation in [0, limit] pays strictly.
bool no_profitable_deviation(const Oligopoly& o, const std::vector<Quantity>& q, Quantity limit) {
  const Quantity Q = std::accumulate(q.begin(), q.end(), Quantity{0});
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Quantity rest = Q - q[i];
    const double now = o.price(Q) * static_cast<double>(q[i]) - o.costs[i](q[i]);
    for (Quantity alt = 0; alt <= std::min(limit, o.q_cap - rest); ++alt) {
      const double dev = o.price(rest + alt) * static_cast<double>(alt) - o.costs[i](alt);
      if (dev > now + 1e-9) return false;
    }
  }
  return true;
}

bool has_total(const std::vector<std::vector<Quantity>>& eqs, Quantity Q) {
  return std::any_of(eqs.begin(), eqs.end(), [&](const auto& q) { return std::accumulate(q.begin(), q.end(), Quantity{0}) == Q; });
}

}  // namespace

TEST_SUITE("oligopoly") {
  TEST_CASE("marginal profit closed form") {
    const Oligopoly o = ten_minus_q(2);
    CHECK(marginal_profit_i(o, 0, 3, 6) == -1.0);
    for (Quantity q = 0; q < 6; ++q) {
      for (Quantity Q = q; Q < 9; ++Q) {
        CHECK(marginal_profit_i(o, 0, q, Q) == doctest::Approx(8.0 - static_cast<double>(Q + q)));
        CHECK(marginal_profit_i(o, 0, q, Q) == doctest::Approx(profit_i(o, 0, q + 1, Q + 1) - profit_i(o, 0, q, Q)));
        CHECK(marginal_profit_i(o, 0, q + 1, Q) <= marginal_profit_i(o, 0, q, Q));
      }
    }
    CHECK(marginal_profit_i(o, 1, 0, 0) == 8.0);
    CHECK(marginal_profit_i(o, 0, -1, 3) == 0.0);
    EvalCounter counter;
    marginal_profit_i(o, 0, 1, 1, &counter);
    CHECK(counter.f_evaluations == 1);
  }

  TEST_CASE("best response ranges") {
    const Oligopoly mono = ten_minus_q(1);
    CHECK(best_response_range(mono, 0, 4) == ResponseRange{4, 5});
    const Oligopoly duo = ten_minus_q(2);
    const ResponseRange r6 = best_response_range(duo, 0, 6);
    CHECK(r6.q_l <= 3);
    CHECK(r6.q_u >= 3);
    const Oligopoly prohibitive = make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)), {IntegerCost::quadratic(0, 20)});
    CHECK(best_response_range(prohibitive, 0, 3) == ResponseRange{0, 0});
  }

  TEST_CASE("monopoly optimum is the minimum maximizer") {
    CHECK(monopoly_optimum(ten_minus_q(1), 0) == 4);
    CHECK(monopoly_optimum(ten_minus_q(1, 0.0), 0) == 5);
    const Oligopoly dead = make_oligopoly(IntegerPrice(std::vector<double>{0, -1, -2, -3}), {IntegerCost::quadratic(0, 0)});
    CHECK(monopoly_optimum(dead, 0) == 0);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const Oligopoly o = fixtures::random_small_oligopoly(rng);
      for (std::size_t i = 0; i < o.n_firms(); ++i) {
        Quantity argmax = 0;
        for (Quantity q = 1; q <= o.q_cap; ++q) {
          if (profit_i(o, i, q, q) > profit_i(o, i, argmax, argmax)) argmax = q;
        }
        CHECK(monopoly_optimum(o, i) == argmax);
      }
    }
  }

  TEST_CASE("solve known instances") {
    const OligopolySolution duo = solve_oligopoly(ten_minus_q(2));
    REQUIRE(duo.found());
    CHECK(*duo.quantities == std::vector<Quantity>{3, 3});
    CHECK(duo.total == 6);
    CHECK(profit_i(ten_minus_q(2), 0, 3, 6) == 9.0);
    CHECK(duo.f_evaluations > 0);

    const OligopolySolution mono = solve_oligopoly(ten_minus_q(1));
    REQUIRE(mono.found());
    CHECK(*mono.quantities == std::vector<Quantity>{4});

    // Relabeling the firms permutes the answer.
    const Oligopoly a = make_oligopoly(IntegerPrice(PriceFunction::linear(30, 1)),
                                       {IntegerCost::quadratic(1, 0), IntegerCost::quadratic(0, 3)});
    const Oligopoly b = make_oligopoly(IntegerPrice(PriceFunction::linear(30, 1)),
                                       {IntegerCost::quadratic(0, 3), IntegerCost::quadratic(1, 0)});
    auto qa = *solve_oligopoly(a).quantities;
    auto qb = *solve_oligopoly(b).quantities;
    CHECK(is_integral_equilibrium(a, qa));
    CHECK(is_integral_equilibrium(b, qb));
    std::sort(qa.begin(), qa.end());
    std::sort(qb.begin(), qb.end());
    CHECK(qa == qb);
  }

  TEST_CASE("fill quantities") {
    CHECK(fill_quantities({{3, 3}, {3, 3}}, 6) == std::vector<Quantity>{3, 3});
    CHECK(fill_quantities({{4, 5}}, 4) == std::vector<Quantity>{4});
    CHECK(fill_quantities({{1, 3}, {1, 3}}, 5) == std::vector<Quantity>{3, 2});
    CHECK(fill_quantities({{2, 4}, {2, 4}}, 6) == std::vector<Quantity>{3, 3});
    CHECK(fill_quantities({{0, 1}, {0, 9}}, 7) == std::vector<Quantity>{1, 6});
    CHECK_THROWS_AS(fill_quantities({{1, 3}, {1, 3}}, 7), Error);
    CHECK_THROWS_AS(fill_quantities({{1, 3}, {1, 3}}, 1), Error);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ResponseRange> ranges;
      Quantity lo = 0, hi = 0;
      for (std::size_t i = 0; i <= fixtures::index(rng, 4); ++i) {
        const auto l = static_cast<Quantity>(fixtures::index(rng, 6));
        const auto u = l + static_cast<Quantity>(fixtures::index(rng, 6));
        ranges.push_back({l, u});
        lo += l;
        hi += u;
      }
      const Quantity Q = lo + static_cast<Quantity>(fixtures::index(rng, static_cast<std::size_t>(hi - lo + 1)));
      const auto q = fill_quantities(ranges, Q);
      CHECK(std::accumulate(q.begin(), q.end(), Quantity{0}) == Q);
      for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q[i] >= ranges[i].q_l);
        CHECK(q[i] <= ranges[i].q_u);
      }
    }
  }

  TEST_CASE("invalid instances are rejected") {
    CHECK_THROWS_AS(make_oligopoly(IntegerPrice(std::vector<double>{5, 6, 4}), {IntegerCost::quadratic(0, 0)}), Error);
    CHECK_THROWS_AS(make_oligopoly(IntegerPrice(std::vector<double>{10, 9, 5, 4}), {IntegerCost::quadratic(0, 0)}), Error);
    CHECK_THROWS_AS(make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)), {IntegerCost(std::vector<double>{0, 3, 4})}),
                    Error);
    CHECK_THROWS_AS(make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)), {}), Error);
  }

  TEST_CASE("decomposing separable networks") {
    const MarketNetwork sep = build_network(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}},
                                            {PriceFunction::linear(10, 1), PriceFunction::linear(20, 2)},
                                            {CostFunction::separable_quadratic({0, 1}, {1, 2}),
                                             CostFunction::separable_quadratic({2, 0}, {0, 3})});
    const auto parts = decompose_separable(sep);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].market == 0);
    CHECK(parts[0].edges == std::vector<std::size_t>{0, 1});
    CHECK(parts[1].edges == std::vector<std::size_t>{2, 3});
    CHECK(parts[1].oligopoly.price(3) == 14.0);
    // Firm B's market-2 term is lambda 0, mu 3.
    CHECK(parts[1].oligopoly.costs[1](2) == 6.0);
    CHECK(parts[0].oligopoly.costs[1](2) == 4.0);  // 2*4/2 + 0

    try {
      decompose_separable(fixtures::scenario2());
      FAIL("expected NotSeparable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotSeparable);
    }
    CHECK(decompose_separable(fixtures::scenario1()).size() == 1);
  }

  TEST_CASE("agreement with the exhaustive oracle") {
    std::mt19937_64 rng(41);
    int found = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Oligopoly o = fixtures::random_small_oligopoly(rng);
      const auto eqs = exhaustive_oligopoly_oracle(o);
      const OligopolySolution sol = solve_oligopoly(o);
      if (sol.found()) {
        ++found;
        CHECK(std::find(eqs.begin(), eqs.end(), *sol.quantities) != eqs.end());
        CHECK(no_profitable_deviation(o, *sol.quantities, 200));
        CHECK(is_integral_equilibrium(o, *sol.quantities));
      } else {
        CHECK(eqs.empty());
      }
    }
    CHECK(found > 100);
  }

  TEST_CASE("discarded totals hold no equilibrium") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
      const Oligopoly o = fixtures::random_small_oligopoly(rng);
      const auto eqs = exhaustive_oligopoly_oracle(o);
      const OligopolySolution sol = solve_oligopoly(o);
      for (Quantity guess : sol.probed_totals) {
        if (sol.found() && guess == sol.total) continue;
        Quantity sum_l = 0, sum_u = 0;
        for (std::size_t i = 0; i < o.n_firms(); ++i) {
          const ResponseRange r = best_response_range(o, i, guess);
          sum_l += r.q_l;
          sum_u += r.q_u;
        }
        if (sum_l > guess) {
          for (Quantity Q = 1; Q <= guess; ++Q) CHECK_FALSE(has_total(eqs, Q));
        } else {
          REQUIRE(sum_u < guess);
          for (Quantity Q = guess; Q <= sol.q_max + static_cast<Quantity>(o.n_firms()); ++Q) CHECK_FALSE(has_total(eqs, Q));
        }
      }
    }
  }

  TEST_CASE("discrete equilibrium check matches full deviation search") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 60; ++trial) {
      const Oligopoly o = fixtures::random_small_oligopoly(rng);
      for (int k = 0; k < 20; ++k) {
        std::vector<Quantity> q(o.n_firms());
        for (auto& x : q) x = static_cast<Quantity>(fixtures::index(rng, 12));
        if (std::accumulate(q.begin(), q.end(), Quantity{0}) + 1 > o.q_cap) continue;
        CHECK(is_integral_equilibrium(o, q) == no_profitable_deviation(o, q, o.q_cap));
      }
    }
  }

  TEST_CASE("increasing differences and monotone ranges") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial) {
      const Oligopoly o = fixtures::random_small_oligopoly(rng);
      const Quantity top = std::min<Quantity>(30, o.q_cap - 2);
      for (std::size_t i = 0; i < o.n_firms(); ++i) {
        for (Quantity Q1 = 1; Q1 <= top; ++Q1) {
          for (Quantity Q2 = Q1 + 1; Q2 <= top; ++Q2) {
            for (Quantity q = 0; q <= Q1; ++q) {
              for (Quantity q2 = q + 1; q2 <= Q1 + 1; ++q2) {
                const double lhs = lower_response_objective(o, i, q2, Q1) - lower_response_objective(o, i, q2, Q2);
                const double rhs = lower_response_objective(o, i, q, Q1) - lower_response_objective(o, i, q, Q2);
                CHECK(lhs >= rhs - 1e-9);
                const double ulhs = upper_response_objective(o, i, q2, Q1) - upper_response_objective(o, i, q2, Q2);
                const double urhs = upper_response_objective(o, i, q, Q1) - upper_response_objective(o, i, q, Q2);
                CHECK(ulhs >= urhs - 1e-9);
              }
            }
            // Capped or sentinel endpoints are clipped by Q, not by the response.
            const ResponseRange lo = best_response_range(o, i, Q1);
            const ResponseRange hi = best_response_range(o, i, Q2);
            if (lo.q_l <= Q1 + 1 && hi.q_l <= Q2 + 1) CHECK(lo.q_l >= hi.q_l);
            if (lo.q_u < Q1 + 1 && hi.q_u < Q2 + 1) CHECK(lo.q_u >= hi.q_u);
          }
        }
      }
    }
  }

  TEST_CASE("evaluation count stays within the bound") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 1 + fixtures::index(rng, 200);
      const double target = std::pow(10.0, fixtures::uniform(rng, 1.0, 6.0));
      const double alpha = std::ceil(2.77 * target / static_cast<double>(n)) + 10;
      std::vector<IntegerCost> costs;
      for (std::size_t i = 0; i < n; ++i) {
        costs.push_back(IntegerCost::quadratic(static_cast<double>(fixtures::index(rng, 3)), fixtures::uniform(rng, 0, 10)));
      }
      const Oligopoly o = make_oligopoly(IntegerPrice(PriceFunction::linear(alpha, 1)), std::move(costs));
      const OligopolySolution sol = solve_oligopoly(o);
      REQUIRE(sol.q_max >= 2);
      const double lg = std::log2(static_cast<double>(sol.q_max));
      CHECK(static_cast<double>(sol.f_evaluations) <= 4.0 * static_cast<double>(n) * lg * (lg + 2));
      if (sol.found()) CHECK(is_integral_equilibrium(o, *sol.quantities));
    }
  }
}
