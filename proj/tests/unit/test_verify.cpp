#include "doctest.h"

#include <algorithm>

#include "cournot/error.hpp"
#include "cournot/potential.hpp"
#include "cournot/verify.hpp"
#include "fixtures.hpp"

using namespace cournot;
using fixtures::vec;

TEST_SUITE("verify") {
  TEST_CASE("complementarity residual") {
    const auto at_eq = complementarity_residual(fixtures::scenario3(), vec({0.18, 0.1, 0.16}), 1e-9);
    CHECK(at_eq.feasible_q);
    CHECK(at_eq.feasible_F);
    CHECK(at_eq.mu <= 1e-12);

    const auto at_zero = complementarity_residual(fixtures::scenario1(), vec({0, 0}), 1e-9);
    CHECK(at_zero.feasible_q);
    CHECK_FALSE(at_zero.feasible_F);
    CHECK(at_zero.mu == 0.0);

    const auto at_one = complementarity_residual(fixtures::scenario1(), vec({1, 1}), 1e-9);
    CHECK(at_one.feasible_F);
    CHECK(at_one.mu == doctest::Approx(3.0));  // (1*3 + 1*3) / 2

    CHECK_FALSE(complementarity_residual(fixtures::scenario1(), vec({-0.1, 0.3}), 1e-9).feasible_q);
    CHECK_THROWS_AS(complementarity_residual(fixtures::scenario1(), vec({1}), 1e-9), Error);
  }

  TEST_CASE("best response check") {
    const auto s2 = best_response_check(fixtures::scenario2(), vec({0.125, 0.125, 0.125, 0.125}), 1e-9);
    CHECK(s2.verdict);
    CHECK(s2.max_gain() <= 1e-8);
    REQUIRE(s2.worst_deviation_gain.size() == 2);

    // A's best reply to 0.25 is 0.25 (profit 0.09375); at 0.5 revenue 0.125 equals cost.
    const auto off = best_response_check(fixtures::scenario1(), vec({0.5, 0.25}), 1e-9);
    CHECK_FALSE(off.verdict);
    CHECK(off.worst_deviation_gain[0] == doctest::Approx(0.09375).epsilon(1e-4));
    CHECK(off.worst_deviation_gain[1] <= off.worst_deviation_gain[0]);
  }

  TEST_CASE("potential solver outputs pass the check") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
      const MarketNetwork net = fixtures::random_network(rng);
      const auto r = solve_potential(PotentialProblem(net));
      REQUIRE(r.converged());
      CHECK(best_response_check(net, r.q, 1e-6, 1e-7).verdict);
    }
  }

  TEST_CASE("grid best-response dynamics") {
    const auto g1 = brute_force_grid_equilibrium(fixtures::scenario1(), 0.01, 1.0, 100);
    CHECK(g1.converged);
    CHECK((g1.q - vec({0.25, 0.25})).lpNorm<Eigen::Infinity>() < 1e-9);

    const auto g3 = brute_force_grid_equilibrium(fixtures::scenario3(), 0.01, 0.5, 200);
    CHECK(g3.converged);
    CHECK((g3.q - vec({0.18, 0.1, 0.16})).lpNorm<Eigen::Infinity>() < 1e-9);

    const MarketNetwork dead = build_network(2, 1, {{0, 0}, {0, 1}}, {PriceFunction::linear(0, 1)},
                                             {CostFunction::quadratic_total(1), CostFunction::quadratic_total(1)});
    const auto g0 = brute_force_grid_equilibrium(dead, 0.1, 1.0, 10);
    CHECK(g0.converged);
    CHECK(g0.rounds == 1);
    CHECK(g0.q.isZero());

    CHECK_THROWS_AS(brute_force_grid_equilibrium(fixtures::scenario1(), 0.0, 1.0, 10), Error);
  }

  TEST_CASE("exhaustive integral oracle") {
    const Oligopoly duo = make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)),
                                         {IntegerCost::quadratic(0, 1), IntegerCost::quadratic(0, 1)});
    const auto eqs = exhaustive_oligopoly_oracle(duo);
    CHECK(std::find(eqs.begin(), eqs.end(), std::vector<Quantity>{3, 3}) != eqs.end());
    // Weak equilibria: one firm is indifferent about moving one unit.
    CHECK(eqs == std::vector<std::vector<Quantity>>{{2, 4}, {3, 3}, {4, 2}});

    const Oligopoly mono = make_oligopoly(IntegerPrice(PriceFunction::linear(10, 1)), {IntegerCost::quadratic(0, 1)});
    CHECK(exhaustive_oligopoly_oracle(mono) == std::vector<std::vector<Quantity>>{{4}, {5}});

    const Oligopoly dead = make_oligopoly(IntegerPrice(std::vector<double>{0, -1, -2, -3}), {IntegerCost::quadratic(0, 0)});
    CHECK(exhaustive_oligopoly_oracle(dead) == std::vector<std::vector<Quantity>>{{0}});

    const Oligopoly huge = make_oligopoly(IntegerPrice(PriceFunction::linear(4000, 1)),
                                          std::vector<IntegerCost>(3, IntegerCost::quadratic(0, 0)));
    try {
      exhaustive_oligopoly_oracle(huge);
      FAIL("expected TooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooLarge);
    }
  }
}
