#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "basketsdp/conic_problem.h"

namespace basketsdp {

struct BlockTerm {
  int var = 0;
  Eigen::MatrixXd coeff;  // symmetric
};

// Block slack S_k(y) = Σ_j y_j B_{k,j}; only nonzero B_{k,j} are stored.
struct PsdBlock {
  int dim = 0;
  std::vector<BlockTerm> terms;
  std::string label;
};

// min cᵀy  s.t.  E y = f,  S_k(y) ⪰ 0 for every block.
// Dual:  max fᵀλ  s.t.  Eᵀλ + Σ_k A_k*(Q_k) = c,  Q_k ⪰ 0,
// where A_k*(Q)_j = ⟨B_{k,j}, Q⟩.
struct StandardForm {
  Eigen::VectorXd c;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;
  std::vector<PsdBlock> blocks;
  std::vector<std::string> row_labels;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(f.size()); }

  Eigen::MatrixXd slack(int block, const Eigen::VectorXd& y) const;
  // A*(Q) summed over all blocks.
  Eigen::VectorXd adjoint(const std::vector<Eigen::MatrixXd>& q) const;
};

enum class SolveStatus { kOptimal, kPrimalInfeasible, kDualInfeasible, kInaccurate };

std::string_view to_string(SolveStatus status);

struct Residuals {
  double primal_eq = 0.0;  // ‖E y − f‖
  double dual = 0.0;       // ‖c − Eᵀλ − A*(Q)‖
  double gap = 0.0;        // cᵀy − fᵀλ
  double min_slack_eig = 0.0;
};

struct ConicSolution {
  Eigen::VectorXd y;
  Eigen::VectorXd lambda;
  std::vector<Eigen::MatrixXd> Q;
  SolveStatus status = SolveStatus::kInaccurate;
  Residuals residuals;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  // Candidate infeasibility ray (Eᵀλ + A*(Q) ≈ 0, fᵀλ > 0) left by a run that
  // could not certify it to tolerance; empty otherwise.
  Eigen::VectorXd ray_lambda;
  std::vector<Eigen::MatrixXd> ray_Q;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
};

// Backend contract. Implementations must be reentrant: one instance may solve
// distinct problems concurrently.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution solve(const StandardForm& problem,
                              const SolverOptions& options) const = 0;
};

// Dense primal-dual path-following method with HKM scaling and a Mehrotra
// predictor-corrector. Aimed at desk-scale problems (block sizes up to a few
// dozen, a few hundred variables); blocks of size one with a single variable
// are recognised so grid linear programs stay cheap.
class InteriorPointSolver final : public SolverBackend {
 public:
  std::string name() const override { return "dense-ipm"; }
  ConicSolution solve(const StandardForm& problem,
                      const SolverOptions& options) const override;
};

// Lossless translation; block and row labels carry the mapping back to named
// multipliers.
StandardForm canonicalize(const ConicProblem& problem);

// Sparse text format, see docs/file-formats.md.
std::string write_standard_form(const StandardForm& problem);
StandardForm read_standard_form(std::string_view text);

}  // namespace basketsdp
