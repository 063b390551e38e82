#include "basketsdp/semigroup.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "basketsdp/errors.h"

namespace basketsdp {

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {}

Monomial Monomial::unit(const GeneratorLayout& layout) {
  return Monomial(std::vector<int>(layout.size(), 0));
}

Monomial Monomial::generator(const GeneratorLayout& layout, int slot) {
  std::vector<int> e(layout.size(), 0);
  e.at(slot) = 1;
  return Monomial(std::move(e));
}

int Monomial::degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), 0);
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.exps_.size() != exps_.size()) {
    throw DimensionMismatch("monomials over different generator sets");
  }
  std::vector<int> e(exps_);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] += other.exps_[k];
  return Monomial(std::move(e));
}

std::string Monomial::to_string(const GeneratorLayout& layout) const {
  std::string out;
  for (int slot = 0; slot < size(); ++slot) {
    const int e = exps_[slot];
    if (e == 0) continue;
    if (!out.empty()) out += '*';
    if (layout.is_straddle(slot)) {
      out += "s" + std::to_string(slot);
    } else if (layout.is_asset(slot)) {
      out += "x" + std::to_string(slot - layout.num_straddles + 1);
    } else {
      out += "t";
    }
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  // Within a grade the monomial with the larger leading exponent comes first.
  return std::lexicographical_compare(b.exponents().begin(),
                                      b.exponents().end(),
                                      a.exponents().begin(),
                                      a.exponents().end());
}

PolyElement::PolyElement(const Monomial& m, double coeff) { add(m, coeff); }

void PolyElement::add(const Monomial& m, double coeff) {
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

PolyElement& PolyElement::operator+=(const PolyElement& other) {
  for (const auto& [m, c] : other.terms_) add(m, c);
  return *this;
}

PolyElement PolyElement::operator+(const PolyElement& other) const {
  PolyElement out(*this);
  out += other;
  return out;
}

PolyElement PolyElement::operator-(const PolyElement& other) const {
  return *this + other * -1.0;
}

PolyElement PolyElement::operator*(double scale) const {
  PolyElement out;
  for (const auto& [m, c] : terms_) out.add(m, c * scale);
  return out;
}

int PolyElement::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double PolyElement::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double PolyElement::distance(const PolyElement& other) const {
  double d = 0.0;
  const PolyElement diff = *this - other;
  for (const auto& [m, c] : diff.terms()) d = std::max(d, std::abs(c));
  return d;
}

namespace {

PolyElement free_product(const PolyElement& a, const PolyElement& b) {
  PolyElement out;
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) out.add(ma * mb, ca * cb);
  }
  return out;
}

}  // namespace

MomentIndex::MomentIndex(std::vector<Monomial> ordered, int degree_cap,
                         Mode mode)
    : monomials_(std::move(ordered)), degree_cap_(degree_cap), mode_(mode) {
  for (int i = 0; i < size(); ++i) lookup_.emplace(monomials_[i], i);
}

std::optional<int> MomentIndex::find(const Monomial& m) const {
  auto it = lookup_.find(m);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int MomentIndex::position(const Monomial& m) const {
  auto pos = find(m);
  if (!pos) {
    throw IndexTooSmall("monomial of degree " + std::to_string(m.degree()) +
                        " is not in the moment index (degree cap " +
                        std::to_string(degree_cap_) + ")");
  }
  return *pos;
}

int MomentIndex::count_up_to(int degree) const {
  auto it = std::find_if(monomials_.begin(), monomials_.end(),
                         [degree](const Monomial& m) { return m.degree() > degree; });
  return static_cast<int>(it - monomials_.begin());
}

PayoffSemigroup::PayoffSemigroup(const MarketSpec& market, bool reduce_squares)
    : reduce_(reduce_squares), baskets_(market.baskets) {
  layout_.num_straddles = static_cast<int>(baskets_.size());
  layout_.num_assets = market.num_assets();
  for (const BasketDef& b : baskets_) {
    if (static_cast<int>(b.weights.size()) != layout_.num_assets) {
      throw DimensionMismatch("basket weight count differs from asset count");
    }
  }

  alias_.resize(baskets_.size());
  for (int j = 0; j < layout_.num_straddles; ++j) {
    alias_[j] = j;
    if (!reduce_) continue;
    for (int k = 0; k < j; ++k) {
      if (baskets_[k] == baskets_[j]) {
        alias_[j] = alias_[k];
        break;
      }
    }
  }

  for (const BasketDef& b : baskets_) {
    PolyElement u;
    for (int i = 0; i < layout_.num_assets; ++i) {
      u.add(asset(i), b.weights[i]);
    }
    u.add(unit(), -b.strike);
    affine_squares_.push_back(free_product(u, u));
  }
}

Monomial PayoffSemigroup::straddle(int j) const {
  return Monomial::generator(layout_, layout_.straddle(j));
}

Monomial PayoffSemigroup::asset(int i) const {
  return Monomial::generator(layout_, layout_.asset(i));
}

Monomial PayoffSemigroup::aux() const {
  return Monomial::generator(layout_, layout_.aux());
}

PolyElement PayoffSemigroup::even_power(int j, int q) const {
  PolyElement out(unit());
  for (int r = 0; r < q; ++r) out = free_product(out, affine_squares_[j]);
  return out;
}

PolyElement PayoffSemigroup::canonical(const Monomial& m) const {
  if (m.size() != layout_.size()) {
    throw DimensionMismatch("monomial has " + std::to_string(m.size()) +
                            " slots, semigroup has " +
                            std::to_string(layout_.size()));
  }
  if (!reduce_) return PolyElement(m);

  std::vector<int> e(m.exponents().begin(), m.exponents().end());
  for (int j = 0; j < layout_.num_straddles; ++j) {
    if (alias_[j] != j) {
      e[alias_[j]] += e[j];
      e[j] = 0;
    }
  }
  PolyElement factor(unit());
  for (int j = 0; j < layout_.num_straddles; ++j) {
    if (e[j] >= 2) {
      factor = free_product(factor, even_power(j, e[j] / 2));
      e[j] %= 2;
    }
  }
  return free_product(PolyElement(Monomial(std::move(e))), factor);
}

PolyElement PayoffSemigroup::canonical(const PolyElement& p) const {
  PolyElement out;
  for (const auto& [m, c] : p.terms()) out += canonical(m) * c;
  return out;
}

PolyElement PayoffSemigroup::multiply(const Monomial& a,
                                      const Monomial& b) const {
  return canonical(a * b);
}

PolyElement PayoffSemigroup::multiply(const PolyElement& a,
                                      const PolyElement& b) const {
  PolyElement out;
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) out += multiply(ma, mb) * (ca * cb);
  }
  return out;
}

PolyElement PayoffSemigroup::payoff_sum() const {
  PolyElement sum;
  for (int i = 0; i < layout_.num_assets; ++i) sum.add(asset(i), 1.0);
  for (int j = 0; j < layout_.num_straddles; ++j) {
    sum += canonical(straddle(j));
  }
  return sum;
}

PolyElement PayoffSemigroup::square_sum() const {
  PolyElement sum;
  for (int i = 0; i < layout_.num_assets; ++i) {
    sum += multiply(asset(i), asset(i));
  }
  for (int j = 0; j < layout_.num_straddles; ++j) {
    sum += multiply(straddle(j), straddle(j));
  }
  return sum;
}

double PayoffSemigroup::theta(std::span<const double> x) const {
  double s = 1.0;
  for (double xi : x) s += xi * xi;
  for (const BasketDef& b : baskets_) {
    const double u = b.affine(x);
    s += u * u;
  }
  return 1.0 / s;
}

double PayoffSemigroup::evaluate(const Monomial& m,
                                 std::span<const double> x) const {
  if (static_cast<int>(x.size()) != layout_.num_assets) {
    throw DimensionMismatch("point has " + std::to_string(x.size()) +
                            " coordinates, market has " +
                            std::to_string(layout_.num_assets) + " assets");
  }
  if (m.size() != layout_.size()) {
    throw DimensionMismatch("monomial does not match the semigroup layout");
  }
  double v = 1.0;
  for (int j = 0; j < layout_.num_straddles; ++j) {
    if (m[j] > 0) v *= std::pow(baskets_[j].payoff(x), m[j]);
  }
  for (int i = 0; i < layout_.num_assets; ++i) {
    const int e = m[layout_.asset(i)];
    if (e > 0) v *= std::pow(x[i], e);
  }
  const int k = m[layout_.aux()];
  if (k > 0) v *= std::pow(theta(x), k);
  return v;
}

double PayoffSemigroup::evaluate(const PolyElement& p,
                                 std::span<const double> x) const {
  double v = 0.0;
  for (const auto& [m, c] : p.terms()) v += c * evaluate(m, x);
  return v;
}

MomentIndex PayoffSemigroup::build_index(int degree, Mode mode) const {
  if (degree < 0) throw InfeasibleDegree("index degree must be nonnegative");
  std::vector<int> slots;
  std::vector<int> caps;
  for (int j = 0; j < layout_.num_straddles; ++j) {
    if (reduce_ && alias_[j] != j) continue;
    slots.push_back(layout_.straddle(j));
    caps.push_back(reduce_ ? 1 : degree);
  }
  for (int i = 0; i < layout_.num_assets; ++i) {
    slots.push_back(layout_.asset(i));
    caps.push_back(degree);
  }
  if (mode == Mode::kUnbounded) {
    slots.push_back(layout_.aux());
    caps.push_back(degree);
  }

  std::vector<Monomial> out;
  std::vector<int> e(layout_.size(), 0);
  auto recurse = [&](auto&& self, std::size_t k, int remaining) -> void {
    if (k == slots.size()) {
      out.emplace_back(e);
      return;
    }
    for (int p = 0; p <= std::min(caps[k], remaining); ++p) {
      e[slots[k]] = p;
      self(self, k + 1, remaining - p);
    }
    e[slots[k]] = 0;
  };
  recurse(recurse, 0, degree);
  std::sort(out.begin(), out.end(), GradedLexLess{});
  return MomentIndex(std::move(out), degree, mode);
}

std::string dump_index(const MomentIndex& index, const GeneratorLayout& layout) {
  std::ostringstream os;
  for (int i = 0; i < index.size(); ++i) {
    const Monomial& m = index.monomial(i);
    os << (i + 1) << ' ' << m.degree() << ' ' << m.to_string(layout) << '\n';
  }
  return os.str();
}

}  // namespace basketsdp
