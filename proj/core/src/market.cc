#include "basketsdp/market.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "basketsdp/errors.h"

namespace basketsdp {

using nlohmann::json;

namespace {

constexpr double kPriceTol = 1e-10;

std::string basket_name(int j) {
  return j == 0 ? std::string("target basket") : "basket " + std::to_string(j);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("basket weights have " + std::to_string(a.size()) +
                            " entries, point has " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::vector<double> number_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

double BasketDef::affine(std::span<const double> x) const {
  return dot(weights, x) - strike;
}

double BasketDef::payoff(std::span<const double> x) const {
  return std::abs(affine(x));
}

double BasketDef::max_payoff_on_box(std::span<const double> upper) const {
  if (upper.size() != weights.size()) {
    throw DimensionMismatch("box has " + std::to_string(upper.size()) +
                            " bounds, basket has " +
                            std::to_string(weights.size()) + " weights");
  }
  double hi = 0.0, lo = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    hi += std::max(weights[i], 0.0) * upper[i];
    lo += std::min(weights[i], 0.0) * upper[i];
  }
  return std::max(std::abs(hi - strike), std::abs(lo - strike));
}

double MarketSpec::forward_moneyness(int j) const {
  return baskets.at(j).affine(forwards);
}

double to_straddle(const QuoteSet& quote, const MarketSpec& market) {
  if (quote.basket_index < 0 || quote.basket_index > market.num_priced()) {
    throw DimensionMismatch("quote references basket " +
                            std::to_string(quote.basket_index) +
                            " outside the market");
  }
  const double moneyness = market.forward_moneyness(quote.basket_index);
  double s = quote.price;
  switch (quote.kind) {
    case QuoteKind::kCall:
      s = 2.0 * quote.price - moneyness;
      break;
    case QuoteKind::kPut:
      s = 2.0 * quote.price + moneyness;
      break;
    case QuoteKind::kStraddle:
      break;
  }
  if (s < 0.0) {
    throw NegativeResult(std::string(to_string(quote.kind)) + " quote on " +
                         basket_name(quote.basket_index) +
                         " converts to negative straddle price " +
                         std::to_string(s));
  }
  return s;
}

double to_call(double straddle_price, int basket_index,
               const MarketSpec& market) {
  return 0.5 * (straddle_price + market.forward_moneyness(basket_index));
}

std::vector<Violation> validate(const MarketSpec& market) {
  using K = Violation::Kind;
  std::vector<Violation> out;
  const int n = market.num_assets();
  if (n < 1) {
    out.push_back({K::kStructure, -1, "market needs at least one asset"});
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (!(market.forwards[i] > 0.0)) {
      out.push_back({K::kStructure, -1,
                     "forward " + std::to_string(i + 1) + " must be positive"});
    }
  }
  if (market.baskets.empty()) {
    out.push_back({K::kStructure, -1, "market has no target basket"});
    return out;
  }
  bool shapes_ok = true;
  for (int j = 0; j <= market.num_priced(); ++j) {
    const BasketDef& b = market.baskets[j];
    if (static_cast<int>(b.weights.size()) != n) {
      out.push_back({K::kStructure, j,
                     basket_name(j) + " has " +
                         std::to_string(b.weights.size()) + " weights, expected " +
                         std::to_string(n)});
      shapes_ok = false;
      continue;
    }
    if (std::all_of(b.weights.begin(), b.weights.end(),
                    [](double w) { return w == 0.0; })) {
      out.push_back({K::kStructure, j, basket_name(j) + " has all-zero weights"});
    }
    if (!(b.strike >= 0.0)) {
      out.push_back({K::kStructure, j, basket_name(j) + " has negative strike"});
    }
  }
  if (static_cast<int>(market.straddle_prices.size()) != market.num_priced()) {
    out.push_back({K::kStructure, -1,
                   "expected " + std::to_string(market.num_priced()) +
                       " straddle prices, got " +
                       std::to_string(market.straddle_prices.size())});
    shapes_ok = false;
  }
  if (market.compact()) {
    if (static_cast<int>(market.box_upper.size()) != n) {
      out.push_back({K::kStructure, -1, "support box dimension mismatch"});
      shapes_ok = false;
    } else {
      for (int i = 0; i < n; ++i) {
        if (!(market.box_upper[i] > 0.0)) {
          out.push_back({K::kStructure, -1,
                         "box bound " + std::to_string(i + 1) +
                             " must be positive"});
          shapes_ok = false;
        } else if (!(market.forwards[i] < market.box_upper[i])) {
          out.push_back({K::kForwardOutsideBox, -1,
                         "forward " + std::to_string(i + 1) +
                             " is not inside (0, " +
                             std::to_string(market.box_upper[i]) + ")"});
        }
      }
    }
  }
  if (market.beta_override && !(*market.beta_override > 0.0)) {
    out.push_back({K::kStructure, -1, "beta override must be positive"});
  }
  if (!shapes_ok) return out;

  for (int j = 1; j <= market.num_priced(); ++j) {
    const double price = market.straddle_prices[j - 1];
    if (price < 0.0) {
      out.push_back({K::kNegativePrice, j,
                     basket_name(j) + " has negative price " +
                         std::to_string(price)});
      continue;
    }
    const double floor = std::abs(market.forward_moneyness(j));
    if (price < floor - kPriceTol * (1.0 + floor)) {
      out.push_back({K::kJensenFloor, j,
                     basket_name(j) + " price " + std::to_string(price) +
                         " is below its Jensen floor |w'p - K| = " +
                         std::to_string(floor)});
    }
    if (market.compact()) {
      const double cap = market.baskets[j].max_payoff_on_box(market.box_upper);
      if (price > cap + kPriceTol * (1.0 + cap)) {
        out.push_back({K::kAboveBoxMax, j,
                       basket_name(j) + " price " + std::to_string(price) +
                           " exceeds the largest payoff on the support box " +
                           std::to_string(cap)});
      }
    }
  }
  return out;
}

double beta_bound(const MarketSpec& market) {
  if (!market.compact()) {
    throw UnboundedSupport("beta requires a compact support box");
  }
  double beta = 0.0;
  for (double b : market.box_upper) beta += b;
  for (const BasketDef& basket : market.baskets) {
    beta += basket.max_payoff_on_box(market.box_upper);
  }
  return beta;
}

double effective_beta(const MarketSpec& market) {
  if (market.beta_override) return *market.beta_override;
  return beta_bound(market);
}

QuoteKind parse_quote_kind(std::string_view text) {
  if (text == "call") return QuoteKind::kCall;
  if (text == "put") return QuoteKind::kPut;
  if (text == "straddle") return QuoteKind::kStraddle;
  throw ParseError("unknown quote kind '" + std::string(text) +
                   "' (expected call, put or straddle)");
}

std::string_view to_string(QuoteKind kind) {
  switch (kind) {
    case QuoteKind::kCall:
      return "call";
    case QuoteKind::kPut:
      return "put";
    case QuoteKind::kStraddle:
      return "straddle";
  }
  return "?";
}

MarketSpec parse_market(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("market file: " + line_column(text, e.byte) + ": " +
                     e.what());
  }
  try {
    MarketSpec market;
    market.forwards = number_array(doc.at("forwards"), "forwards");
    if (doc.contains("n") && doc.at("n").get<int>() != market.num_assets()) {
      throw ParseError("field n = " + std::to_string(doc.at("n").get<int>()) +
                       " disagrees with " +
                       std::to_string(market.num_assets()) + " forwards");
    }

    struct Pending {
      BasketDef basket;
      std::optional<QuoteSet> quote;
    };
    std::vector<Pending> pending;
    int target = -1;
    for (const auto& jb : doc.at("baskets")) {
      Pending p;
      p.basket.weights = number_array(jb.at("weights"), "basket weights");
      p.basket.strike = jb.at("strike").get<double>();
      const json& q = jb.contains("quote") ? jb.at("quote") : json();
      if (q.is_null()) {
        if (target >= 0) {
          throw ParseError("more than one basket has a null quote");
        }
        target = static_cast<int>(pending.size());
      } else {
        p.quote = QuoteSet{0, parse_quote_kind(q.at("kind").get<std::string>()),
                           q.at("price").get<double>()};
      }
      pending.push_back(std::move(p));
    }
    if (target < 0) throw ParseError("no target basket (quote: null)");

    market.baskets.push_back(pending[target].basket);
    for (int i = 0; i < static_cast<int>(pending.size()); ++i) {
      if (i != target) market.baskets.push_back(pending[i].basket);
    }

    const json& support = doc.at("support");
    if (support.is_string()) {
      if (support.get<std::string>() != "unbounded") {
        throw ParseError("support must be \"unbounded\" or {\"box\": [...]}");
      }
      market.support = SupportKind::kUnbounded;
    } else {
      market.support = SupportKind::kCompact;
      market.box_upper = number_array(support.at("box"), "support box");
    }
    if (doc.contains("beta") && !doc.at("beta").is_null()) {
      market.beta_override = doc.at("beta").get<double>();
    }

    // Straddle conversion needs forwards and basket weights in place.
    int j = 1;
    for (int i = 0; i < static_cast<int>(pending.size()); ++i) {
      if (i == target) continue;
      QuoteSet q = *pending[i].quote;
      q.basket_index = j++;
      if (static_cast<int>(market.baskets[q.basket_index].weights.size()) !=
          market.num_assets()) {
        market.straddle_prices.push_back(q.price);
        continue;  // reported by validate()
      }
      market.straddle_prices.push_back(to_straddle(q, market));
    }
    return market;
  } catch (const json::exception& e) {
    throw ParseError(std::string("market file: ") + e.what());
  }
}

MarketSpec load_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open market file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_market(ss.str());
}

std::string market_to_json(const MarketSpec& market) {
  json doc;
  doc["n"] = market.num_assets();
  doc["forwards"] = market.forwards;
  json baskets = json::array();
  for (int j = 0; j <= market.num_priced(); ++j) {
    json b;
    b["weights"] = market.baskets[j].weights;
    b["strike"] = market.baskets[j].strike;
    if (j == 0) {
      b["quote"] = nullptr;
    } else {
      b["quote"] = {{"kind", "straddle"},
                    {"price", market.straddle_prices.at(j - 1)}};
    }
    baskets.push_back(std::move(b));
  }
  doc["baskets"] = std::move(baskets);
  if (market.compact()) {
    doc["support"] = {{"box", market.box_upper}};
  } else {
    doc["support"] = "unbounded";
  }
  if (market.beta_override) doc["beta"] = *market.beta_override;
  return doc.dump(2);
}

}  // namespace basketsdp
