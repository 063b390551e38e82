#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "basketsdp/errors.h"
#include "basketsdp/oracle.h"
#include "basketsdp/semigroup.h"

using namespace basketsdp;

namespace {

MarketSpec merton() {
  MarketSpec mk;
  mk.forwards = {1.0};
  mk.support = SupportKind::kCompact;
  mk.box_upper = {2.0};
  mk.baskets = {{{1.0}, 1.0}};
  return mk;
}

// Layout for n=1, m=0: slots s_0, x_1, t.
Monomial mono(int s0, int x, int t = 0) { return Monomial({s0, x, t}); }

}  // namespace

TEST_CASE("free products add exponents") {
  const PayoffSemigroup sg(merton(), false);
  const PolyElement p = sg.multiply(sg.straddle(0), sg.straddle(0));
  REQUIRE(p.size() == 1);
  CHECK(p.coefficient(mono(2, 0)) == 1.0);
}

TEST_CASE("reduced squares of a straddle expand into asset monomials") {
  const PayoffSemigroup sg(merton(), true);
  const PolyElement p = sg.multiply(sg.straddle(0), sg.straddle(0));
  CHECK(p.size() == 3);
  CHECK(p.coefficient(mono(0, 2)) == 1.0);
  CHECK(p.coefficient(mono(0, 1)) == -2.0);
  CHECK(p.coefficient(mono(0, 0)) == 1.0);

  const PolyElement odd = sg.multiply(sg.asset(0), sg.straddle(0));
  REQUIRE(odd.size() == 1);
  CHECK(odd.coefficient(mono(1, 1)) == 1.0);
}

TEST_CASE("identical baskets share one generator when reducing") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 1.0});
  mk.straddle_prices = {0.4};
  const PayoffSemigroup on(mk, true);
  CHECK(on.representative(1) == 0);
  CHECK(on.canonical(on.straddle(1)).coefficient(on.straddle(0)) == 1.0);
  const PayoffSemigroup off(mk, false);
  CHECK(off.representative(1) == 1);
}

TEST_CASE("evaluation of units, straddles and the auxiliary generator") {
  const PayoffSemigroup sg(merton(), true);
  const double quarter[] = {0.25};
  CHECK(sg.evaluate(PolyElement(sg.unit()), quarter) == 1.0);
  CHECK(sg.evaluate(sg.straddle(0), quarter) == doctest::Approx(0.75));
  const double two[] = {2.0};
  CHECK(sg.theta(two) == doctest::Approx(1.0 / 6.0));
  CHECK(sg.evaluate(mono(1, 0, 1), two) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("graded-lex index listings") {
  const PayoffSemigroup free_sg(merton(), false);
  const MomentIndex a = free_sg.build_index(1, Mode::kCompact);
  REQUIRE(a.size() == 3);
  CHECK(a.monomial(0) == mono(0, 0));
  CHECK(a.monomial(1) == mono(1, 0));
  CHECK(a.monomial(2) == mono(0, 1));
  CHECK(a.count_up_to(1) == 3);

  const PayoffSemigroup sg(merton(), true);
  const MomentIndex b = sg.build_index(2, Mode::kCompact);
  REQUIRE(b.size() == 5);
  CHECK(b.monomial(3) == mono(1, 1));
  CHECK(b.monomial(4) == mono(0, 2));
  CHECK_FALSE(b.find(mono(2, 0)).has_value());
  CHECK_THROWS_AS(b.position(mono(0, 3)), IndexTooSmall);

  const MomentIndex c = free_sg.build_index(1, Mode::kUnbounded);
  REQUIRE(c.size() == 4);
  CHECK(c.monomial(3) == mono(0, 0, 1));
}

TEST_CASE("graded-lex order is total and starts at the unit") {
  const PayoffSemigroup sg(merton(), false);
  const MomentIndex idx = sg.build_index(4, Mode::kUnbounded);
  GradedLexLess less;
  CHECK(idx.monomial(0) == sg.unit());
  for (int i = 1; i < idx.size(); ++i) {
    CHECK(less(idx.monomial(i - 1), idx.monomial(i)));
    CHECK(idx.monomial(i - 1).degree() <= idx.monomial(i).degree());
  }
}

TEST_CASE("reduced index matches brute-force canonicalization") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 0.5});
  mk.straddle_prices = {0.6};
  const PayoffSemigroup sg(mk, true);
  const int d = 3;
  std::set<std::vector<int>> brute;
  for (int a = 0; a <= d; ++a) {
    for (int b = 0; a + b <= d; ++b) {
      for (int c = 0; a + b + c <= d; ++c) {
        const PolyElement p = sg.canonical(Monomial({a, b, c, 0}));
        for (const auto& [m, coeff] : p.terms()) {
          if (coeff != 0.0) brute.insert({m.exponents().begin(), m.exponents().end()});
        }
      }
    }
  }
  const MomentIndex idx = sg.build_index(d, Mode::kCompact);
  std::set<std::vector<int>> listed;
  for (const Monomial& m : idx.monomials()) {
    listed.insert({m.exponents().begin(), m.exponents().end()});
  }
  CHECK(listed == brute);
}

TEST_CASE("multiplication is a homomorphism under evaluation") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> e(0, 3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (bool reduce : {true, false}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 2;
      const GeneratedMarket g =
          random_consistent_market(300 + trial, n, trial % 3, std::vector<double>(n, 2.0));
      const PayoffSemigroup sg(g.market, reduce);
      auto draw = [&] {
        std::vector<int> exps(sg.layout().size(), 0);
        for (int s = 0; s < sg.layout().size(); ++s) exps[s] = e(rng) % 3;
        return Monomial(exps);
      };
      const Monomial a = draw(), b = draw();
      std::vector<double> x(n);
      for (double& xi : x) xi = u(rng);
      const double lhs = sg.evaluate(sg.multiply(a, b), x);
      const double rhs = sg.evaluate(a, x) * sg.evaluate(b, x);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("canonical forms are idempotent") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 0.5});
  mk.straddle_prices = {0.6};
  const PayoffSemigroup sg(mk, true);
  const PolyElement once = sg.canonical(Monomial({3, 2, 1, 0}));
  CHECK(sg.canonical(once).distance(once) == 0.0);
}
