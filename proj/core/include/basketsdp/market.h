#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace basketsdp {

// Straddle on a basket: payoff |wᵀx − K|.
struct BasketDef {
  std::vector<double> weights;
  double strike = 0.0;

  // wᵀx − K.
  double affine(std::span<const double> x) const;
  double payoff(std::span<const double> x) const;
  // max over the box [0, upper] of |wᵀx − K|, attained at a vertex.
  double max_payoff_on_box(std::span<const double> upper) const;

  bool operator==(const BasketDef&) const = default;
};

enum class SupportKind { kCompact, kUnbounded };

// One-period market at zero rate. baskets[0] is the unpriced target; baskets[j]
// for j >= 1 carries the observed straddle price straddle_prices[j - 1].
struct MarketSpec {
  std::vector<double> forwards;
  std::vector<BasketDef> baskets;
  std::vector<double> straddle_prices;
  SupportKind support = SupportKind::kUnbounded;
  std::vector<double> box_upper;
  std::optional<double> beta_override;

  int num_assets() const { return static_cast<int>(forwards.size()); }
  // m: number of priced baskets.
  int num_priced() const { return static_cast<int>(baskets.size()) - 1; }
  bool compact() const { return support == SupportKind::kCompact; }
  const BasketDef& target() const { return baskets.front(); }
  // wᵀp − K for basket j.
  double forward_moneyness(int j) const;
};

enum class QuoteKind { kCall, kPut, kStraddle };

struct QuoteSet {
  int basket_index = 0;
  QuoteKind kind = QuoteKind::kStraddle;
  double price = 0.0;
};

// Straddle = call + put and call − put = wᵀp − K, so a call c maps to
// 2c − (wᵀp − K) and a put v to 2v + (wᵀp − K). Throws NegativeResult when the
// converted price is negative.
double to_straddle(const QuoteSet& quote, const MarketSpec& market);
// Inverse of to_straddle for a call quote.
double to_call(double straddle_price, int basket_index, const MarketSpec& market);

struct Violation {
  enum class Kind {
    kStructure,       // malformed dimensions or parameters
    kNegativePrice,
    kForwardOutsideBox,
    kJensenFloor,     // price < |wᵀp − K|
    kAboveBoxMax,     // price > max over the box of |wᵀx − K|
  };
  Kind kind;
  int basket = -1;
  std::string message;

  // Price-level violations are static arbitrage rather than malformed input.
  bool is_arbitrage() const {
    return kind == Kind::kJensenFloor || kind == Kind::kAboveBoxMax ||
           kind == Kind::kNegativePrice;
  }
};

std::vector<Violation> validate(const MarketSpec& market);

// Σ_i b_i + Σ_j max_{x ∈ [0,b]} |w_jᵀx − K_j|. Throws UnboundedSupport.
double beta_bound(const MarketSpec& market);
// beta_override when set, beta_bound otherwise.
double effective_beta(const MarketSpec& market);

QuoteKind parse_quote_kind(std::string_view text);
std::string_view to_string(QuoteKind kind);

// Market files are JSON; see docs/file-formats.md. The target is the unique
// basket whose quote is null and is moved to index 0.
MarketSpec parse_market(std::string_view text);
MarketSpec load_market(const std::string& path);
std::string market_to_json(const MarketSpec& market);

}  // namespace basketsdp
