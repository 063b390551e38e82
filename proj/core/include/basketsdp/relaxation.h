#pragma once

#include <string>
#include <vector>

#include "basketsdp/conic_problem.h"
#include "basketsdp/market.h"
#include "basketsdp/solver.h"

namespace basketsdp {

// Order-N moment relaxation over a compact support: variables are moments up
// to degree 2N; blocks are M_N(y), M_{N−1}(g·y) for each localizer g and the
// compactness localizer β − Σ_k e_k. Throws InfeasibleDegree for N < 1 and
// UnboundedSupport when β cannot be derived.
ConicProblem assemble_compact(const MarketSpec& market,
                              const RelaxationSpec& spec);

// Relaxation over the product semigroup with the auxiliary generator t
// standing for θ(x) = 1 / (1 + Σ e_k²). Linkage rows
//   y(s t^k) = y(s t^{k+1}) + Σ_k y(e_k² s t^{k+1})
// are imposed for every s t^k whose terms all stay within degree 2N.
ConicProblem assemble_unbounded(const MarketSpec& market,
                                const RelaxationSpec& spec);

ConicProblem assemble(const MarketSpec& market, const RelaxationSpec& spec);

struct BoundResult {
  // Bound on the target straddle price (NaN unless status is optimal).
  double value = 0.0;
  std::vector<double> y;
  ConicSolution dual;
  SolveStatus status = SolveStatus::kInaccurate;
};

// Throws SolverFailure with residual diagnostics on numerical breakdown.
BoundResult solve_bound(const ConicProblem& problem,
                        const SolverBackend& solver, double tol);

std::string export_problem(const ConicProblem& problem);

}  // namespace basketsdp
