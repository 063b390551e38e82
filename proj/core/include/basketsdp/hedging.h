#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "basketsdp/conic_problem.h"
#include "basketsdp/market.h"
#include "basketsdp/solver.h"

namespace basketsdp {

// weight(x) · z(x)ᵀ G z(x), with z the basis monomials evaluated at x.
struct SosPoly {
  std::string label;
  PolyElement weight;
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;

  double value(const PayoffSemigroup& semigroup, std::span<const double> x) const;
};

// Static portfolio of forwards, quoted straddles and cash. For the lower side
//   e_0(x) − portfolio(x) = Σ_k SOS_k(x)
// (sub-replication); for the upper side portfolio(x) − e_0(x) = Σ_k SOS_k(x).
struct HedgeCertificate {
  Side side = Side::kLower;
  double bound = 0.0;
  // Positions in x_1..x_n followed by straddles s_1..s_m.
  std::vector<double> lambda;
  double cash = 0.0;
  std::vector<SosPoly> sos;
  double beta = 0.0;
  int order = 1;
  int num_assets = 0;
  int num_priced = 0;
};

// Throws NotOptimal unless the solution is optimal, and Error for unbounded
// relaxations (no certificate form is provided for them). Gram matrices are
// symmetrized and eigenvalue-clipped at zero; clipping beyond −10·tol·scale
// is rejected.
HedgeCertificate extract(const ConicProblem& problem,
                         const ConicSolution& solution, double tol = 1e-8);

// Σ λ_i x_i + Σ λ_j s_j(x) + cash.
double evaluate_portfolio(const HedgeCertificate& cert,
                          const MarketSpec& market, std::span<const double> x);

struct CheckReport {
  double max_residual = 0.0;
  // Minimum over samples of the signed hedge slack: e_0 − portfolio for the
  // lower side, portfolio − e_0 for the upper side.
  double min_slack = 0.0;
  // Smallest SOS term value relative to ‖z(x)‖².
  double min_sos = 0.0;
  int samples = 0;
};

// Samples uniformly in the box ∩ {Σ e_k ≤ β} with a seeded generator.
CheckReport check_certificate(const HedgeCertificate& cert,
                              const MarketSpec& market, int samples,
                              std::uint64_t seed);

std::string certificate_to_json(const HedgeCertificate& cert);
HedgeCertificate certificate_from_json(std::string_view text);

}  // namespace basketsdp
