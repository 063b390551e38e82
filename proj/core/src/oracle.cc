#include "basketsdp/oracle.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "basketsdp/errors.h"

namespace basketsdp {

double price(const DiscreteMeasure& measure, const BasketDef& basket) {
  double v = 0.0;
  for (const Atom& a : measure.atoms) v += a.weight * basket.payoff(a.x);
  return v;
}

std::vector<double> moment_vector(const MomentIndex& index,
                                  const PayoffSemigroup& semigroup,
                                  const DiscreteMeasure& measure) {
  std::vector<double> y(index.size(), 0.0);
  for (const Atom& a : measure.atoms) {
    for (int i = 0; i < index.size(); ++i) {
      y[i] += a.weight * semigroup.evaluate(index.monomial(i), a.x);
    }
  }
  return y;
}

namespace {

constexpr int kMaxOracleDim = 3;
constexpr long kMaxGridPoints = 100000;
// Baskets whose (w, K) directions are within one degree are treated as
// duplicates by the market generator.
constexpr double kMinBasketCosine = 0.99985;

std::vector<std::vector<double>> grid_points(const MarketSpec& market,
                                             const GridSpec& grid) {
  const int n = market.num_assets();
  std::vector<std::vector<double>> axes(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < grid.points_per_axis; ++k) {
      axes[i].push_back(market.box_upper[i] * k / (grid.points_per_axis - 1));
    }
  }
  if (n == 1) {
    for (const BasketDef& b : market.baskets) {
      if (b.weights[0] == 0.0) continue;
      const double kink = b.strike / b.weights[0];
      if (kink > 0.0 && kink < market.box_upper[0]) axes[0].push_back(kink);
    }
    std::sort(axes[0].begin(), axes[0].end());
    axes[0].erase(std::unique(axes[0].begin(), axes[0].end()), axes[0].end());
  }

  std::vector<std::vector<double>> out;
  std::vector<double> x(n);
  auto recurse = [&](auto&& self, int i) -> void {
    if (i == n) {
      out.push_back(x);
      return;
    }
    for (double v : axes[i]) {
      x[i] = v;
      self(self, i + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

// Rejects degenerate draws: forwards on a face of the box, prices at their
// Jensen floor or near-duplicate baskets leave the moment cone without interior
// points.
bool interior(const GeneratedMarket& g) {
  const MarketSpec& mk = g.market;
  for (int i = 0; i < mk.num_assets(); ++i) {
    const double margin = 0.05 * mk.box_upper[i];
    if (mk.forwards[i] < margin || mk.forwards[i] > mk.box_upper[i] - margin) {
      return false;
    }
  }
  for (int j = 0; j <= mk.num_priced(); ++j) {
    const double p = j == 0 ? g.target_price : mk.straddle_prices[j - 1];
    if (p - std::abs(mk.forward_moneyness(j)) < 1e-3) return false;
  }
  // Nearly proportional baskets give nearly proportional payoffs, so every
  // moment matrix is close to singular.
  for (int a = 0; a <= mk.num_priced(); ++a) {
    for (int b = a + 1; b <= mk.num_priced(); ++b) {
      const BasketDef& u = mk.baskets[a];
      const BasketDef& v = mk.baskets[b];
      double uv = u.strike * v.strike, uu = u.strike * u.strike,
             vv = v.strike * v.strike;
      for (int i = 0; i < mk.num_assets(); ++i) {
        uv += u.weights[i] * v.weights[i];
        uu += u.weights[i] * u.weights[i];
        vv += v.weights[i] * v.weights[i];
      }
      if (std::abs(uv) > kMinBasketCosine * std::sqrt(uu * vv)) return false;
    }
  }
  return true;
}

}  // namespace

LpBounds lp_bounds(const MarketSpec& market, const GridSpec& grid,
                   const SolverBackend& solver, double tol) {
  if (!market.compact()) {
    throw UnboundedSupport("the grid oracle needs a compact support box");
  }
  const int n = market.num_assets();
  if (n > kMaxOracleDim) {
    throw Error("the grid oracle handles at most " +
                std::to_string(kMaxOracleDim) + " assets");
  }
  if (grid.points_per_axis < 2) throw Error("grid needs at least 2 points per axis");
  if (std::pow(static_cast<double>(grid.points_per_axis), n) > kMaxGridPoints) {
    throw Error("grid exceeds " + std::to_string(kMaxGridPoints) + " points");
  }

  const double beta = effective_beta(market);
  std::vector<std::vector<double>> points;
  for (auto& x : grid_points(market, grid)) {
    double total = 0.0;
    for (double xi : x) total += xi;
    for (const BasketDef& b : market.baskets) total += b.payoff(x);
    if (total <= beta * (1.0 + 1e-12)) points.push_back(std::move(x));
  }
  const int g = static_cast<int>(points.size());

  StandardForm sf;
  const int m = market.num_priced();
  sf.c = Eigen::VectorXd::Zero(g);
  sf.E = Eigen::MatrixXd::Zero(1 + n + m, g);
  sf.f = Eigen::VectorXd::Zero(1 + n + m);
  sf.f(0) = 1.0;
  sf.row_labels.push_back("mass");
  for (int i = 0; i < n; ++i) {
    sf.f(1 + i) = market.forwards[i];
    sf.row_labels.push_back("forward x" + std::to_string(i + 1));
  }
  for (int j = 1; j <= m; ++j) {
    sf.f(n + j) = market.straddle_prices[j - 1];
    sf.row_labels.push_back("price s" + std::to_string(j));
  }
  for (int p = 0; p < g; ++p) {
    const auto& x = points[p];
    sf.c(p) = market.target().payoff(x);
    sf.E(0, p) = 1.0;
    for (int i = 0; i < n; ++i) sf.E(1 + i, p) = x[i];
    for (int j = 1; j <= m; ++j) sf.E(n + j, p) = market.baskets[j].payoff(x);
    PsdBlock block;
    block.dim = 1;
    block.terms.push_back({p, Eigen::MatrixXd::Ones(1, 1)});
    sf.blocks.push_back(std::move(block));
  }

  SolverOptions options;
  options.tol = tol;
  options.max_iter = 300;
  auto run = [&](double sign) {
    StandardForm side = sf;
    side.c *= sign;
    const ConicSolution sol = solver.solve(side, options);
    if (sol.status == SolveStatus::kPrimalInfeasible) {
      throw GridInfeasible(
          "no measure on the " + std::to_string(g) +
          "-point grid matches the observed prices (static arbitrage, or the "
          "grid is too coarse; refine points_per_axis)");
    }
    if (sol.status != SolveStatus::kOptimal) {
      throw SolverFailure("grid LP ended with status " +
                          std::string(to_string(sol.status)) +
                          ", dual residual " + std::to_string(sol.residuals.dual));
    }
    return sign * sol.primal_objective;
  };

  LpBounds out;
  out.grid_points = g;
  out.min = run(1.0);
  out.max = run(-1.0);
  if (n > 1) {
    double lipschitz = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i) {
      lipschitz += market.target().weights[i] * market.target().weights[i];
      const double h = market.box_upper[i] / (grid.points_per_axis - 1);
      diag += h * h;
    }
    out.eps_grid = 0.5 * std::sqrt(lipschitz) * std::sqrt(diag);
  }
  return out;
}

double jensen_floor(const MarketSpec& market) {
  return std::abs(market.forward_moneyness(0));
}

GeneratedMarket random_consistent_market(std::uint64_t seed, int n, int m,
                                         const std::vector<double>& box) {
  if (n < 1 || m < 0 || static_cast<int>(box.size()) != n) {
    throw DimensionMismatch("random market needs n >= 1, m >= 0 and n box bounds");
  }
  constexpr int kLattice = 10;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> lattice(0, kLattice);
  std::uniform_int_distribution<int> atom_count(3, 6);

  for (;;) {
    GeneratedMarket out;
    const int atoms = atom_count(rng);
    double total = 0.0;
    for (int a = 0; a < atoms; ++a) {
      Atom atom;
      for (int i = 0; i < n; ++i) {
        atom.x.push_back(box[i] * lattice(rng) / kLattice);
      }
      atom.weight = 0.1 + unit(rng);
      total += atom.weight;
      out.measure.atoms.push_back(std::move(atom));
    }
    for (Atom& a : out.measure.atoms) a.weight /= total;

    MarketSpec& mk = out.market;
    mk.support = SupportKind::kCompact;
    mk.box_upper = box;
    mk.forwards.assign(n, 0.0);
    for (const Atom& a : out.measure.atoms) {
      for (int i = 0; i < n; ++i) mk.forwards[i] += a.weight * a.x[i];
    }
    for (int j = 0; j <= m; ++j) {
      BasketDef b;
      double reach = 0.0;
      for (int i = 0; i < n; ++i) {
        const double mag = 0.25 + 0.75 * unit(rng);
        const double w = unit(rng) < 0.75 ? mag : -mag;
        b.weights.push_back(w);
        reach += std::max(w, 0.0) * box[i];
      }
      b.strike = reach * unit(rng);
      mk.baskets.push_back(std::move(b));
    }
    for (int j = 1; j <= m; ++j) {
      mk.straddle_prices.push_back(price(out.measure, mk.baskets[j]));
    }
    out.target_price = price(out.measure, mk.baskets[0]);
    if (validate(mk).empty() && interior(out)) return out;
  }
}

}  // namespace basketsdp
