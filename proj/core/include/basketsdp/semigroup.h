#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "basketsdp/market.h"

namespace basketsdp {

enum class Mode { kCompact, kUnbounded };

// Generator slots in graded-lex priority order: straddles s_0..s_m, asset
// coordinates x_1..x_n, then the auxiliary generator t of the product
// semigroup (only active in unbounded mode).
struct GeneratorLayout {
  int num_straddles = 0;  // m + 1
  int num_assets = 0;     // n

  int size() const { return num_straddles + num_assets + 1; }
  int straddle(int j) const { return j; }
  int asset(int i) const { return num_straddles + i; }
  int aux() const { return num_straddles + num_assets; }
  bool is_straddle(int slot) const { return slot < num_straddles; }
  bool is_asset(int slot) const {
    return slot >= num_straddles && slot < aux();
  }
};

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial unit(const GeneratorLayout& layout);
  static Monomial generator(const GeneratorLayout& layout, int slot);

  int size() const { return static_cast<int>(exps_.size()); }
  int operator[](int slot) const { return exps_[slot]; }
  std::span<const int> exponents() const { return exps_; }
  int degree() const;

  // Exponentwise sum (the free-monoid product).
  Monomial operator*(const Monomial& other) const;

  std::string to_string(const GeneratorLayout& layout) const;

  bool operator==(const Monomial&) const = default;

 private:
  std::vector<int> exps_;
};

// Graded lexicographic order: by total degree, then larger exponents on
// earlier generators first. The unit monomial is the smallest element.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Element of the payoff algebra: a finite real combination of monomials.
class PolyElement {
 public:
  using Terms = std::map<Monomial, double, GradedLexLess>;

  PolyElement() = default;
  PolyElement(const Monomial& m, double coeff = 1.0);

  void add(const Monomial& m, double coeff);
  PolyElement& operator+=(const PolyElement& other);
  PolyElement operator+(const PolyElement& other) const;
  PolyElement operator-(const PolyElement& other) const;
  PolyElement operator*(double scale) const;

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int degree() const;
  double coefficient(const Monomial& m) const;

  // Distance in max-norm on coefficients.
  double distance(const PolyElement& other) const;

 private:
  Terms terms_;
};

class MomentIndex {
 public:
  MomentIndex() = default;
  MomentIndex(std::vector<Monomial> ordered, int degree_cap, Mode mode);

  int size() const { return static_cast<int>(monomials_.size()); }
  int degree_cap() const { return degree_cap_; }
  Mode mode() const { return mode_; }
  const Monomial& monomial(int position) const { return monomials_.at(position); }
  std::span<const Monomial> monomials() const { return monomials_; }

  std::optional<int> find(const Monomial& m) const;
  // Throws IndexTooSmall when m is not indexed.
  int position(const Monomial& m) const;
  // s(d): number of indexed monomials of degree at most d (a prefix).
  int count_up_to(int degree) const;

 private:
  std::vector<Monomial> monomials_;
  std::map<Monomial, int, GradedLexLess> lookup_;
  int degree_cap_ = 0;
  Mode mode_ = Mode::kCompact;
};

// The commutative semigroup generated by the asset coordinates, the basket
// straddle payoffs and cash, viewed as functions of x.
//
// With reduce_squares on, monomials are kept canonical: every straddle has
// exponent 0 or 1 (|u|² = u² is expanded into asset monomials) and straddles
// on identical baskets share one generator. With it off, the semigroup is
// treated as free.
class PayoffSemigroup {
 public:
  PayoffSemigroup(const MarketSpec& market, bool reduce_squares);

  const GeneratorLayout& layout() const { return layout_; }
  bool reduce_squares() const { return reduce_; }
  int num_assets() const { return layout_.num_assets; }
  int num_straddles() const { return layout_.num_straddles; }
  const BasketDef& basket(int j) const { return baskets_.at(j); }
  // Representative generator for straddle j (itself unless aliased).
  int representative(int j) const { return alias_.at(j); }

  Monomial unit() const { return Monomial::unit(layout_); }
  Monomial straddle(int j) const;
  Monomial asset(int i) const;
  Monomial aux() const;

  // Rewrites an arbitrary monomial into canonical form.
  PolyElement canonical(const Monomial& m) const;
  PolyElement canonical(const PolyElement& p) const;
  PolyElement multiply(const Monomial& a, const Monomial& b) const;
  PolyElement multiply(const PolyElement& a, const PolyElement& b) const;

  // Σ_k e_k over all payoffs x_1..x_n, s_0..s_m.
  PolyElement payoff_sum() const;
  // Σ_k e_k², canonicalized.
  PolyElement square_sum() const;

  // θ(x) = 1 / (1 + Σ_k e_k(x)²).
  double theta(std::span<const double> x) const;
  double evaluate(const Monomial& m, std::span<const double> x) const;
  double evaluate(const PolyElement& p, std::span<const double> x) const;

  // Canonical monomials of degree ≤ d in graded-lex order. Compact mode never
  // uses the auxiliary generator.
  MomentIndex build_index(int degree, Mode mode) const;

 private:
  // (w_jᵀx − K_j)^{2q} expanded in the asset coordinates.
  PolyElement even_power(int j, int q) const;

  GeneratorLayout layout_;
  bool reduce_ = true;
  std::vector<BasketDef> baskets_;
  std::vector<int> alias_;
  std::vector<PolyElement> affine_squares_;
};

// One line per monomial: position (1-based), degree, monomial.
std::string dump_index(const MomentIndex& index, const GeneratorLayout& layout);

}  // namespace basketsdp
