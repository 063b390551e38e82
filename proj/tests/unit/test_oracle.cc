#include <doctest.h>

#include <cmath>

#include "basketsdp/errors.h"
#include "basketsdp/oracle.h"

using namespace basketsdp;

namespace {

MarketSpec merton(double box = 2.0) {
  MarketSpec mk;
  mk.forwards = {1.0};
  mk.support = SupportKind::kCompact;
  mk.box_upper = {box};
  mk.baskets = {{{1.0}, 1.0}};
  return mk;
}

}  // namespace

TEST_CASE("straddle prices under discrete measures") {
  const BasketDef atm{{1.0}, 1.0};
  CHECK(price({{{{1.0}, 1.0}}}, atm) == 0.0);
  CHECK(price({{{{0.0}, 0.5}, {{2.0}, 0.5}}}, atm) == doctest::Approx(1.0));
  const BasketDef sum{{1.0, 1.0}, 1.0};
  CHECK(price({{{{1.0, 1.0}, 1.0}}}, sum) == doctest::Approx(1.0));
}

TEST_CASE("Jensen floor") {
  MarketSpec mk = merton();
  CHECK(jensen_floor(mk) == 0.0);
  mk.baskets[0].strike = 0.0;
  CHECK(jensen_floor(mk) == doctest::Approx(1.0));
  mk.forwards = {0.5, 0.5};
  mk.box_upper = {1.0, 1.0};
  mk.baskets = {{{2.0, 2.0}, 0.0}};
  CHECK(jensen_floor(mk) == doctest::Approx(2.0));
}

TEST_CASE("grid LP on the unit interval") {
  // Mean 0.5 on [0, 1]: E|x − 0.5| ranges over [0, 0.5].
  MarketSpec mk = merton(1.0);
  mk.forwards = {0.5};
  mk.baskets = {{{1.0}, 0.5}};
  const LpBounds b = lp_bounds(mk, {201}, InteriorPointSolver());
  CHECK(std::abs(b.min) <= 1e-7);
  CHECK(b.max == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(b.eps_grid == 0.0);
  CHECK(b.grid_points >= 201);
}

TEST_CASE("a quoted target pins the grid LP") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 1.0});
  mk.straddle_prices = {0.4};
  const LpBounds b = lp_bounds(mk, {101}, InteriorPointSolver());
  CHECK(b.min == doctest::Approx(0.4).epsilon(1e-7));
  CHECK(b.max == doctest::Approx(0.4).epsilon(1e-7));
}

TEST_CASE("unmatchable quotes are grid infeasible") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 1.0});
  mk.straddle_prices = {2.5};
  CHECK_THROWS_AS(lp_bounds(mk, {101}, InteriorPointSolver()), GridInfeasible);

  mk.baskets[1].strike = 0.5;
  mk.straddle_prices = {0.45};
  CHECK_THROWS_AS(lp_bounds(mk, {101}, InteriorPointSolver()), GridInfeasible);
}

TEST_CASE("the grid oracle needs a box") {
  MarketSpec mk = merton();
  mk.support = SupportKind::kUnbounded;
  mk.box_upper.clear();
  CHECK_THROWS_AS(lp_bounds(mk, {101}, InteriorPointSolver()), UnboundedSupport);
}

TEST_CASE("two-dimensional grids report a discretization slack") {
  const GeneratedMarket g = random_consistent_market(12, 2, 0, {1.0, 1.0});
  const LpBounds b = lp_bounds(g.market, {21}, InteriorPointSolver());
  CHECK(b.eps_grid > 0.0);
  CHECK(b.min <= g.target_price + b.eps_grid + 1e-7);
  CHECK(b.max >= g.target_price - b.eps_grid - 1e-7);
}

TEST_CASE("generated markets are priced by their measure") {
  for (int seed = 0; seed < 30; ++seed) {
    const int n = 1 + seed % 2, m = seed % 3;
    const std::vector<double> box(n, 1.0 + seed % 3);
    const GeneratedMarket g = random_consistent_market(seed, n, m, box);
    REQUIRE(g.market.baskets.size() == static_cast<std::size_t>(m + 1));
    REQUIRE(g.market.num_priced() == m);
    CHECK(validate(g.market).empty());

    double mass = 0.0;
    std::vector<double> mean(n, 0.0);
    for (const Atom& a : g.measure.atoms) {
      CHECK(a.weight > 0.0);
      mass += a.weight;
      for (int i = 0; i < n; ++i) {
        CHECK(a.x[i] >= 0.0);
        CHECK(a.x[i] <= box[i]);
        mean[i] += a.weight * a.x[i];
      }
    }
    CHECK(mass == doctest::Approx(1.0));
    for (int i = 0; i < n; ++i) CHECK(mean[i] == doctest::Approx(g.market.forwards[i]));
    CHECK(price(g.measure, g.market.target()) == doctest::Approx(g.target_price));
    for (int j = 0; j < m; ++j) {
      CHECK(price(g.measure, g.market.baskets[j + 1]) ==
            doctest::Approx(g.market.straddle_prices[j]));
    }
  }
}

TEST_CASE("the generator is deterministic in its seed") {
  const GeneratedMarket a = random_consistent_market(4, 2, 1, {2.0, 2.0});
  const GeneratedMarket b = random_consistent_market(4, 2, 1, {2.0, 2.0});
  CHECK(a.market.baskets == b.market.baskets);
  CHECK(a.target_price == b.target_price);
  CHECK_THROWS_AS(random_consistent_market(1, 0, 0, {}), DimensionMismatch);
}
