#pragma once

#include <cstdint>
#include <vector>

#include "basketsdp/market.h"
#include "basketsdp/semigroup.h"
#include "basketsdp/solver.h"

namespace basketsdp {

struct Atom {
  std::vector<double> x;
  double weight = 0.0;
};

struct DiscreteMeasure {
  std::vector<Atom> atoms;
};

struct GridSpec {
  int points_per_axis = 101;
};

// E_ν |wᵀx − K|.
double price(const DiscreteMeasure& measure, const BasketDef& basket);

// y(i) = E_ν[monomial_i(x)] for every indexed monomial.
std::vector<double> moment_vector(const MomentIndex& index,
                                  const PayoffSemigroup& semigroup,
                                  const DiscreteMeasure& measure);

struct LpBounds {
  double min = 0.0;
  double max = 0.0;
  int grid_points = 0;
  // Reported discretization slack: zero in one dimension (kinks are grid
  // points), otherwise Lipschitz constant of e_0 times half a cell diagonal.
  double eps_grid = 0.0;
};

// Min and max of E_ν e_0 over measures supported on a uniform grid of the
// support box (restricted to Σ e_k ≤ β), matching forwards and quoted prices.
// In one dimension the strike kinks are added to the grid. Throws
// GridInfeasible when no grid measure matches the prices.
LpBounds lp_bounds(const MarketSpec& market, const GridSpec& grid,
                   const SolverBackend& solver, double tol = 1e-10);

// |w_0ᵀp − K_0|.
double jensen_floor(const MarketSpec& market);

struct GeneratedMarket {
  MarketSpec market;
  DiscreteMeasure measure;
  double target_price = 0.0;
};

// Random discrete measure with atoms on the lattice {k·b_i/10}, used to price
// the forwards and m + 1 random baskets. Arbitrage-free by construction; draws
// with a forward near the box faces, a price at its Jensen floor, or two nearly
// proportional baskets are redrawn.
GeneratedMarket random_consistent_market(std::uint64_t seed, int n, int m,
                                         const std::vector<double>& box);

}  // namespace basketsdp
