#include <doctest.h>

#include "basketsdp/errors.h"
#include "basketsdp/market.h"

using namespace basketsdp;

namespace {

MarketSpec single(double forward, double strike, double price) {
  MarketSpec mk;
  mk.forwards = {forward};
  mk.support = SupportKind::kCompact;
  mk.box_upper = {2.0};
  mk.baskets = {{{1.0}, 1.0}, {{1.0}, strike}};
  mk.straddle_prices = {price};
  return mk;
}

}  // namespace

TEST_CASE("call-put parity converts quotes to straddles") {
  MarketSpec mk = single(1.0, 1.0, 0.0);
  CHECK(to_straddle({1, QuoteKind::kCall, 0.5}, mk) == doctest::Approx(1.0));
  CHECK(to_straddle({1, QuoteKind::kStraddle, 0.7}, mk) == doctest::Approx(0.7));

  mk.forwards = {1.5};
  CHECK(to_straddle({1, QuoteKind::kPut, 0.2}, mk) == doctest::Approx(0.9));
  CHECK(to_call(to_straddle({1, QuoteKind::kCall, 0.8}, mk), 1, mk) ==
        doctest::Approx(0.8));
}

TEST_CASE("a call quoted under intrinsic value is rejected") {
  const MarketSpec mk = single(3.0, 1.0, 0.0);
  CHECK_THROWS_AS(to_straddle({1, QuoteKind::kCall, 0.5}, mk), NegativeResult);
}

TEST_CASE("validate accepts prices above the Jensen floor") {
  CHECK(validate(single(1.0, 1.0, 0.5)).empty());
}

TEST_CASE("validate flags negative prices") {
  const auto v = validate(single(1.0, 1.0, -0.1));
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::kNegativePrice);
}

TEST_CASE("validate flags a price under the Jensen floor and names the basket") {
  MarketSpec mk = single(1.0, 3.0, 1.0);
  mk.box_upper = {4.0};
  const auto v = validate(mk);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::kJensenFloor);
  CHECK(v[0].basket == 1);
  CHECK(v[0].is_arbitrage());
  CHECK(v[0].message.find("basket 1") != std::string::npos);
}

TEST_CASE("validate flags prices above the box maximum and forwards outside the box") {
  const auto above = validate(single(1.0, 1.0, 2.5));
  REQUIRE(above.size() == 1);
  CHECK(above[0].kind == Violation::Kind::kAboveBoxMax);

  const auto outside = validate(single(2.0, 1.0, 1.0));
  REQUIRE_FALSE(outside.empty());
  CHECK(outside[0].kind == Violation::Kind::kForwardOutsideBox);
  CHECK_FALSE(outside[0].is_arbitrage());
}

TEST_CASE("beta is the box mass plus the largest payoff at a vertex") {
  MarketSpec a;
  a.forwards = {1.0};
  a.support = SupportKind::kCompact;
  a.box_upper = {2.0};
  a.baskets = {{{1.0}, 1.0}};
  CHECK(beta_bound(a) == doctest::Approx(3.0));

  MarketSpec b;
  b.forwards = {0.5, 0.5};
  b.support = SupportKind::kCompact;
  b.box_upper = {1.0, 1.0};
  b.baskets = {{{1.0, 0.0}, 0.0}, {{1.0, 1.0}, 1.0}};
  b.straddle_prices = {0.5};
  CHECK(beta_bound(b) == doctest::Approx(4.0));

  MarketSpec c = a;
  c.box_upper = {1.0};
  c.forwards = {0.5};
  c.baskets = {{{1.0}, 0.0}};
  CHECK(beta_bound(c) == doctest::Approx(2.0));

  c.beta_override = 7.5;
  CHECK(effective_beta(c) == doctest::Approx(7.5));
}

TEST_CASE("beta needs a compact support") {
  MarketSpec mk;
  mk.forwards = {1.0};
  mk.baskets = {{{1.0}, 1.0}};
  CHECK_THROWS_AS(beta_bound(mk), UnboundedSupport);
}

TEST_CASE("market files round-trip and move the target first") {
  const std::string text = R"({
    "n": 1,
    "forwards": [1.0],
    "support": {"box": [2.0]},
    "baskets": [
      {"weights": [1.0], "strike": 0.5, "quote": {"kind": "call", "price": 0.6}},
      {"weights": [1.0], "strike": 1.0, "quote": null}
    ]
  })";
  const MarketSpec mk = parse_market(text);
  REQUIRE(mk.num_priced() == 1);
  CHECK(mk.target().strike == doctest::Approx(1.0));
  CHECK(mk.straddle_prices[0] == doctest::Approx(2 * 0.6 - 0.5));
  CHECK(mk.compact());

  const MarketSpec again = parse_market(market_to_json(mk));
  CHECK(again.baskets == mk.baskets);
  CHECK(again.straddle_prices == mk.straddle_prices);
  CHECK(again.box_upper == mk.box_upper);
}

TEST_CASE("malformed market files report where they fail") {
  CHECK_THROWS_AS(parse_market("{\"forwards\": [1.0],"), ParseError);
  CHECK_THROWS_AS(parse_market(R"({"forwards": [1.0], "support": "unbounded",
      "baskets": [{"weights": [1.0], "strike": 1.0, "quote": {"kind": "straddle", "price": 1}}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_market(R"({"n": 2, "forwards": [1.0], "support": "unbounded",
      "baskets": [{"weights": [1.0], "strike": 1.0, "quote": null}]})"),
                  ParseError);
  try {
    parse_market("{\n  \"forwards\": [1.0,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}
