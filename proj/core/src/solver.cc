#include "basketsdp/solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "basketsdp/errors.h"

namespace basketsdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Real = long double;
using MatrixXr = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXr = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kPrimalInfeasible:
      return "primal_infeasible";
    case SolveStatus::kDualInfeasible:
      return "dual_infeasible";
    case SolveStatus::kInaccurate:
      return "inaccurate";
  }
  return "?";
}

MatrixXd StandardForm::slack(int block, const VectorXd& y) const {
  const PsdBlock& b = blocks.at(block);
  MatrixXd s = MatrixXd::Zero(b.dim, b.dim);
  for (const BlockTerm& t : b.terms) s.noalias() += y(t.var) * t.coeff;
  return s;
}

VectorXd StandardForm::adjoint(const std::vector<MatrixXd>& q) const {
  VectorXd out = VectorXd::Zero(num_vars());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (const BlockTerm& t : blocks[k].terms) {
      out(t.var) += t.coeff.cwiseProduct(q[k]).sum();
    }
  }
  return out;
}

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kRegularization = 1e-9;
constexpr double kStepFraction = 0.95;
constexpr double kShortStep = 0.2;
constexpr double kStartScales[] = {1.0, 100.0, 0.01};
constexpr double kLagFactor = 10.0;
constexpr double kLagSigma = 0.5;
constexpr int kStallLimit = 40;
// Elastic violations above this multiple of tol·(1 + ‖f‖) count as
// infeasibility rather than roundoff.
constexpr double kInfeasibleMargin = 100.0;
constexpr int kBacktrackLimit = 20;

double min_eigenvalue(const MatrixXd& m) {
  if (m.rows() == 0) return kInfinity;
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Largest α ≤ 1/fraction with X + αΔX ⪰ 0, given the Cholesky factor of X.
double max_step(const Eigen::LLT<MatrixXd>& chol, const MatrixXd& dx) {
  if (dx.rows() == 1) {
    const double l = chol.matrixL()(0, 0);
    const double r = dx(0, 0) / (l * l);
    return r < 0.0 ? -1.0 / r : kInfinity;
  }
  MatrixXd m = chol.matrixL().solve(dx);
  m = chol.matrixL().solve(m.transpose()).transpose();
  const double lmin = min_eigenvalue(0.5 * (m + m.transpose()));
  return lmin < 0.0 ? -1.0 / lmin : kInfinity;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

ConicSolution solve_without_blocks(const StandardForm& p,
                                   const SolverOptions& options) {
  // With no cone, y is free: feasible iff f ∈ range(E); bounded iff
  // c ∈ range(Eᵀ).
  ConicSolution sol;
  const int n = p.num_vars(), m = p.num_rows();
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(p.E);
  sol.y = m > 0 ? VectorXd(cod.solve(p.f)) : VectorXd::Zero(n);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> codt(p.E.transpose());
  sol.lambda = m > 0 ? VectorXd(codt.solve(p.c)) : VectorXd::Zero(0);
  const VectorXd rp = p.E * sol.y - p.f;
  const VectorXd rd = p.c - p.E.transpose() * sol.lambda;
  sol.residuals.primal_eq = rp.norm();
  sol.residuals.dual = rd.norm();
  sol.primal_objective = p.c.dot(sol.y);
  sol.dual_objective = p.f.dot(sol.lambda);
  sol.residuals.gap = sol.primal_objective - sol.dual_objective;
  sol.residuals.min_slack_eig = kInfinity;
  if (sol.residuals.primal_eq > options.tol * (1.0 + p.f.norm())) {
    sol.status = SolveStatus::kPrimalInfeasible;
    sol.lambda = -rp;  // Eᵀλ = 0 and fᵀλ > 0
  } else if (sol.residuals.dual > options.tol * (1.0 + p.c.norm())) {
    sol.status = SolveStatus::kDualInfeasible;
    sol.y = rd;  // E y = 0 and cᵀy < 0 after negation
    sol.y = -sol.y;
  } else {
    sol.status = SolveStatus::kOptimal;
  }
  return sol;
}

class IpmState {
 public:
  IpmState(const StandardForm& p, const SolverOptions& options,
           double start_scale)
      : p_(p), options_(options), start_scale_(start_scale) {
    nv_ = p.num_vars();
    nr_ = p.num_rows();
    nb_ = static_cast<int>(p.blocks.size());
    diagonal_ = true;
    total_dim_ = 0;
    for (const PsdBlock& b : p.blocks) {
      total_dim_ += b.dim;
      if (b.terms.size() > 1) diagonal_ = false;
    }
    in_block_.assign(nv_, false);
    for (const PsdBlock& b : p.blocks) {
      for (const BlockTerm& t : b.terms) in_block_[t.var] = true;
    }
    if (diagonal_ && std::find(in_block_.begin(), in_block_.end(), false) !=
                         in_block_.end()) {
      diagonal_ = false;
    }
  }

  ConicSolution run();
  // Largest stopping measure of the returned iterate.
  double merit() const { return merit_; }

 private:
  struct Direction {
    VectorXd dy, dlambda;
    std::vector<MatrixXd> dS, dQ;
  };

  std::vector<MatrixXd> apply(const VectorXd& y) const {
    std::vector<MatrixXd> out(nb_);
    for (int k = 0; k < nb_; ++k) out[k] = p_.slack(k, y);
    return out;
  }

  void build_schur();
  Direction solve_direction(const std::vector<MatrixXd>& rc);
  double primal_step(const Direction& d) const;
  double dual_step(const Direction& d) const;
  bool in_cone(const std::vector<MatrixXd>& m) const;

  const StandardForm& p_;
  const SolverOptions& options_;
  double start_scale_ = 1.0;
  double merit_ = kInfinity;
  int nv_ = 0, nr_ = 0, nb_ = 0, total_dim_ = 0;
  bool diagonal_ = true;
  std::vector<bool> in_block_;

  VectorXd y_, lambda_;
  std::vector<MatrixXd> S_, Q_;
  std::vector<MatrixXr> s_inv_, q_ext_;
  std::vector<Eigen::LLT<MatrixXd>> s_chol_, q_chol_;

  VectorXd rp_, rd_;
  std::vector<MatrixXd> rs_;
  VectorXd h_diag_;
  Eigen::PartialPivLU<MatrixXr> kkt_lu_;
  MatrixXr kkt_;
  Eigen::LLT<MatrixXd> reduced_chol_;
};

void IpmState::build_schur() {
  for (int k = 0; k < nb_; ++k) {
    s_chol_[k].compute(S_[k]);
    q_chol_[k].compute(Q_[k]);
    if (s_chol_[k].info() != Eigen::Success ||
        q_chol_[k].info() != Eigen::Success) {
      throw NumericalBreakdown("iterate left the cone in block '" +
                               p_.blocks[k].label + "'");
    }
  }

  if (diagonal_) {
    h_diag_ = VectorXd::Zero(nv_);
    for (int k = 0; k < nb_; ++k) {
      for (const BlockTerm& t : p_.blocks[k].terms) {
        const double b = t.coeff(0, 0);
        h_diag_(t.var) += b * b * Q_[k](0, 0) / S_[k](0, 0);
      }
    }
    // (E D⁻¹ Eᵀ + δI) z = rhs, with D = H + δI.
    const VectorXd dinv = (h_diag_.array() + kRegularization).inverse();
    const MatrixXd reduced = p_.E * dinv.asDiagonal() * p_.E.transpose();
    // Near a vertex a handful of columns dominate and the system is close to
    // singular at working precision; escalate a relative shift until it
    // factors.
    const double scale = reduced.diagonal().cwiseAbs().maxCoeff();
    double shift = kRegularization;
    for (int attempt = 0; attempt < 8; ++attempt) {
      MatrixXd shifted = reduced;
      shifted.diagonal().array() += shift;
      reduced_chol_.compute(shifted);
      if (reduced_chol_.info() == Eigen::Success) return;
      shift = std::max(shift * 100.0, 1e-14 * scale);
    }
    throw NumericalBreakdown("reduced Newton system is not positive definite");
  }

  // Near the optimum S is close to singular and H = A*(Q · S⁻¹) spans many
  // orders of magnitude; forming and solving it in extended precision keeps
  // the Newton equations accurate enough to reach tight tolerances.
  for (int k = 0; k < nb_; ++k) {
    const int n = S_[k].rows();
    const MatrixXr s = S_[k].cast<Real>();
    Eigen::LLT<MatrixXr> chol(s);
    if (chol.info() != Eigen::Success) {
      throw NumericalBreakdown("iterate left the cone in block '" +
                               p_.blocks[k].label + "'");
    }
    s_inv_[k] = chol.solve(MatrixXr::Identity(n, n));
    q_ext_[k] = Q_[k].cast<Real>();
  }
  MatrixXr h = MatrixXr::Zero(nv_, nv_);
  for (int k = 0; k < nb_; ++k) {
    const auto& terms = p_.blocks[k].terms;
    std::vector<MatrixXr> prod(terms.size());
    for (std::size_t u = 0; u < terms.size(); ++u) {
      prod[u] = q_ext_[k] * terms[u].coeff.cast<Real>() * s_inv_[k];
    }
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const MatrixXr bt = terms[t].coeff.cast<Real>();
      for (std::size_t u = t; u < terms.size(); ++u) {
        const Real v = bt.cwiseProduct(prod[u].transpose()).sum();
        h(terms[t].var, terms[u].var) += v;
        if (terms[t].var != terms[u].var) h(terms[u].var, terms[t].var) += v;
      }
    }
  }
  kkt_ = MatrixXr::Zero(nv_ + nr_, nv_ + nr_);
  kkt_.topLeftCorner(nv_, nv_) = Real(0.5) * (h + h.transpose());
  kkt_.topRightCorner(nv_, nr_) = p_.E.transpose().cast<Real>();
  kkt_.bottomLeftCorner(nr_, nv_) = p_.E.cast<Real>();
  MatrixXr regularized = kkt_;
  regularized.diagonal().head(nv_).array() += Real(kRegularization);
  regularized.diagonal().tail(nr_).array() -= Real(kRegularization);
  kkt_lu_.compute(regularized);
}

// Solves for the HKM direction targeting Q S = rc-adjusted complementarity:
//   ΔS = A(Δy) − rs
//   ΔQ = sym((rc + Q rs − Q A(Δy)) S⁻¹)
//   Eᵀ Δλ + A*(ΔQ) = rd,  E Δy = rp
IpmState::Direction IpmState::solve_direction(const std::vector<MatrixXd>& rc) {
  Direction d;
  d.dS.resize(nb_);
  d.dQ.resize(nb_);

  if (diagonal_) {
    VectorXd w_adj = VectorXd::Zero(nv_);
    std::vector<double> w(nb_);
    for (int k = 0; k < nb_; ++k) {
      w[k] = (rc[k](0, 0) + Q_[k](0, 0) * rs_[k](0, 0)) / S_[k](0, 0);
      for (const BlockTerm& t : p_.blocks[k].terms) w_adj(t.var) += t.coeff(0, 0) * w[k];
    }
    const VectorXd g = rd_ - w_adj;
    // H Δy − Eᵀ Δλ = −g,  E Δy = rp.
    const VectorXd dinv = (h_diag_.array() + kRegularization).inverse();
    const VectorXd rhs = -(p_.E * (dinv.asDiagonal() * g)) - rp_;
    const VectorXd z = reduced_chol_.solve(rhs);
    d.dlambda = -z;
    d.dy = dinv.asDiagonal() * (-g - p_.E.transpose() * z);
    if (!d.dy.allFinite() || !d.dlambda.allFinite()) {
      throw NumericalBreakdown("Newton system produced non-finite direction");
    }
    const std::vector<MatrixXd> ady = apply(d.dy);
    for (int k = 0; k < nb_; ++k) {
      d.dS[k] = ady[k] - rs_[k];
      d.dQ[k] = MatrixXd::Constant(1, 1, w[k] - Q_[k](0, 0) * ady[k](0, 0) / S_[k](0, 0));
    }
    return d;
  }

  std::vector<MatrixXr> w(nb_);
  VectorXr w_adj = VectorXr::Zero(nv_);
  for (int k = 0; k < nb_; ++k) {
    w[k] = (rc[k].cast<Real>() + q_ext_[k] * rs_[k].cast<Real>()) * s_inv_[k];
    for (const BlockTerm& t : p_.blocks[k].terms) {
      w_adj(t.var) += t.coeff.cast<Real>().cwiseProduct(w[k]).sum();
    }
  }
  VectorXr rhs(nv_ + nr_);
  rhs.head(nv_) = w_adj - rd_.cast<Real>();
  rhs.tail(nr_) = rp_.cast<Real>();
  VectorXr sol = kkt_lu_.solve(rhs);
  // One step of refinement against the unregularized system.
  const VectorXr res = rhs - kkt_ * sol;
  sol += kkt_lu_.solve(res);
  d.dy = sol.head(nv_).cast<double>();
  d.dlambda = -sol.tail(nr_).cast<double>();
  if (!d.dy.allFinite() || !d.dlambda.allFinite()) {
    throw NumericalBreakdown("Newton system produced non-finite direction");
  }

  const VectorXr dy = sol.head(nv_);
  for (int k = 0; k < nb_; ++k) {
    const int n = p_.blocks[k].dim;
    MatrixXr ady = MatrixXr::Zero(n, n);
    for (const BlockTerm& t : p_.blocks[k].terms) {
      ady += dy(t.var) * t.coeff.cast<Real>();
    }
    d.dS[k] = (ady - rs_[k].cast<Real>()).cast<double>();
    const MatrixXr dq = w[k] - q_ext_[k] * ady * s_inv_[k];
    d.dQ[k] = (Real(0.5) * (dq + dq.transpose())).cast<double>();
  }
  return d;
}

double IpmState::primal_step(const Direction& d) const {
  double a = kInfinity;
  for (int k = 0; k < nb_; ++k) a = std::min(a, max_step(s_chol_[k], d.dS[k]));
  return a;
}

double IpmState::dual_step(const Direction& d) const {
  double a = kInfinity;
  for (int k = 0; k < nb_; ++k) a = std::min(a, max_step(q_chol_[k], d.dQ[k]));
  return a;
}

bool IpmState::in_cone(const std::vector<MatrixXd>& m) const {
  Eigen::LLT<MatrixXd> chol;
  for (const MatrixXd& block : m) {
    chol.compute(block);
    if (chol.info() != Eigen::Success) return false;
  }
  return true;
}

ConicSolution IpmState::run() {
  const double tol = options_.tol;
  const double norm_c = p_.c.norm(), norm_f = p_.f.norm();

  double data_scale = 1.0;
  for (const PsdBlock& b : p_.blocks) {
    for (const BlockTerm& t : b.terms) {
      data_scale = std::max(data_scale, t.coeff.cwiseAbs().maxCoeff());
    }
  }

  y_ = VectorXd::Zero(nv_);
  lambda_ = VectorXd::Zero(nr_);
  S_.resize(nb_);
  Q_.resize(nb_);
  s_inv_.resize(nb_);
  q_ext_.resize(nb_);
  s_chol_.resize(nb_);
  q_chol_.resize(nb_);
  rs_.resize(nb_);
  const double start =
      start_scale_ * std::max({1.0, std::sqrt(norm_c), std::sqrt(norm_f)});
  for (int k = 0; k < nb_; ++k) {
    const int n = p_.blocks[k].dim;
    S_[k] = start * MatrixXd::Identity(n, n);
    Q_[k] = start * MatrixXd::Identity(n, n);
  }

  // Best iterate by the largest of the four stopping measures; returned when
  // the method stalls before reaching the tolerance.
  double best_merit = kInfinity;
  VectorXd best_y, best_lambda;
  std::vector<MatrixXd> best_q;
  int stalled = 0;
  double initial_lag = 0.0;

  ConicSolution sol;
  sol.status = SolveStatus::kInaccurate;
  int it = 0;
  bool finished = false;
  for (; it <= options_.max_iter; ++it) {
    const std::vector<MatrixXd> ay = apply(y_);
    rp_ = p_.f - p_.E * y_;
    double rs_norm = 0.0;
    for (int k = 0; k < nb_; ++k) {
      rs_[k] = S_[k] - ay[k];
      rs_norm = std::max(rs_norm, rs_[k].norm());
    }
    rd_ = p_.c - p_.E.transpose() * lambda_ - p_.adjoint(Q_);
    double sq = 0.0;
    for (int k = 0; k < nb_; ++k) sq += S_[k].cwiseProduct(Q_[k]).sum();
    const double mu = sq / total_dim_;
    const double pobj = p_.c.dot(y_), dobj = p_.f.dot(lambda_);
    const double pinf =
        std::max(rp_.norm() / (1.0 + norm_f), rs_norm / (1.0 + data_scale));
    const double dinf = rd_.norm() / (1.0 + norm_c);
    const double relgap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double relcomp = sq / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (options_.verbose) {
      std::fprintf(stderr,
                   "ipm %3d  pobj %+.9e  dobj %+.9e  pinf %.2e  dinf %.2e  "
                   "gap %.2e  mu %.2e\n",
                   it, pobj, dobj, pinf, dinf, relgap, mu);
    }

    const double merit = std::max({pinf, dinf, relgap, relcomp});
    if (merit < best_merit) {
      stalled = merit < 0.5 * best_merit ? 0 : stalled + 1;
      best_merit = merit;
      best_y = y_;
      best_lambda = lambda_;
      best_q = Q_;
    } else {
      ++stalled;
    }

    if (merit <= tol) {
      sol.status = SolveStatus::kOptimal;
      finished = true;
      break;
    }
    // Improving rays: (λ, Q) with Eᵀλ + A*(Q) ≈ 0 and fᵀλ > 0 certifies
    // primal infeasibility; y with E y ≈ 0, A(y) ⪰ 0, cᵀy < 0 certifies dual
    // infeasibility.
    if (dobj > 0.0) {
      const double ray = (p_.c - rd_).norm() / dobj;
      if (ray <= tol && pinf > tol) {
        sol.status = SolveStatus::kPrimalInfeasible;
        finished = true;
        break;
      }
    }
    if (pobj < 0.0) {
      double lmin = kInfinity;
      for (int k = 0; k < nb_; ++k) lmin = std::min(lmin, min_eigenvalue(ay[k]));
      const double ray = (p_.E * y_).norm() / -pobj;
      if (ray <= tol && lmin / -pobj >= -tol && dinf > tol) {
        sol.status = SolveStatus::kDualInfeasible;
        finished = true;
        break;
      }
    }
    if (it == options_.max_iter || stalled >= kStallLimit) break;

    try {
      build_schur();

      std::vector<MatrixXd> rc(nb_);
      for (int k = 0; k < nb_; ++k) rc[k] = -Q_[k] * S_[k];
      const Direction pred = solve_direction(rc);
      const double ap = std::min(1.0, primal_step(pred));
      const double ad = std::min(1.0, dual_step(pred));
      double sq_aff = 0.0;
      for (int k = 0; k < nb_; ++k) {
        sq_aff += (S_[k] + ap * pred.dS[k]).cwiseProduct(Q_[k] + ad * pred.dQ[k]).sum();
      }
      double sigma =
          std::clamp(std::pow(std::max(sq_aff, 0.0) / sq, 3.0), 0.0, 1.0);
      // Keep infeasibility and complementarity shrinking together: when mu
      // runs ahead of the residuals the iterates jam against the boundary.
      const double lag = std::max(pinf, dinf) / mu;
      if (it == 0) initial_lag = lag;
      if (lag > kLagFactor * initial_lag) sigma = std::max(sigma, kLagSigma);

      for (int k = 0; k < nb_; ++k) {
        const int n = p_.blocks[k].dim;
        rc[k] = sigma * mu * MatrixXd::Identity(n, n) - Q_[k] * S_[k] -
                pred.dQ[k] * pred.dS[k];
      }
      Direction corr = solve_direction(rc);
      double max_p = primal_step(corr), max_d = dual_step(corr);
      if (std::min(max_p, max_d) < kShortStep) {
        // The second-order term can pull a poorly centred iterate into the
        // boundary; try a first-order step with stronger centring and keep
        // whichever goes further.
        const double centring = std::max(sigma, 0.5);
        for (int k = 0; k < nb_; ++k) {
          const int n = p_.blocks[k].dim;
          rc[k] = centring * mu * MatrixXd::Identity(n, n) - Q_[k] * S_[k];
        }
        Direction centre = solve_direction(rc);
        const double cp = primal_step(centre), cd = dual_step(centre);
        if (std::min(cp, cd) > std::min(max_p, max_d)) {
          corr = std::move(centre);
          max_p = cp;
          max_d = cd;
        }
      }
      double step_p = std::min(1.0, kStepFraction * max_p);
      double step_d = std::min(1.0, kStepFraction * max_d);

      // The step-length test is exact only up to roundoff; back off until the
      // new iterates factor.
      std::vector<MatrixXd> s_next(nb_), q_next(nb_);
      bool accepted = false;
      for (int attempt = 0; attempt < kBacktrackLimit; ++attempt) {
        for (int k = 0; k < nb_; ++k) {
          s_next[k] = sym(S_[k] + step_p * corr.dS[k]);
          q_next[k] = sym(Q_[k] + step_d * corr.dQ[k]);
        }
        if (in_cone(s_next) && in_cone(q_next)) {
          accepted = true;
          break;
        }
        step_p *= 0.5;
        step_d *= 0.5;
      }
      if (options_.verbose) {
        std::fprintf(stderr, "    step  primal %.3e  dual %.3e  sigma %.2e\n",
                     step_p, step_d, sigma);
      }
      if (!accepted) break;
      y_ += step_p * corr.dy;
      lambda_ += step_d * corr.dlambda;
      S_ = std::move(s_next);
      Q_ = std::move(q_next);
    } catch (const NumericalBreakdown& e) {
      if (best_y.size() == 0) throw;
      if (options_.verbose) std::fprintf(stderr, "ipm stopped: %s\n", e.what());
      break;
    }
  }

  merit_ = best_merit;
  if (!finished && best_y.size() > 0) {
    y_ = best_y;
    lambda_ = best_lambda;
    Q_ = best_q;
  }
  sol.iterations = it;
  sol.y = y_;
  sol.lambda = lambda_;
  sol.Q = Q_;
  sol.primal_objective = p_.c.dot(y_);
  sol.dual_objective = p_.f.dot(lambda_);
  sol.residuals.primal_eq = (p_.E * y_ - p_.f).norm();
  sol.residuals.dual = (p_.c - p_.E.transpose() * lambda_ - p_.adjoint(Q_)).norm();
  sol.residuals.gap = sol.primal_objective - sol.dual_objective;
  double lmin = kInfinity;
  for (int k = 0; k < nb_; ++k) lmin = std::min(lmin, min_eigenvalue(p_.slack(k, y_)));
  sol.residuals.min_slack_eig = lmin;
  return sol;
}

ConicSolution solve_with_restarts(const StandardForm& problem,
                                  const SolverOptions& options) {
  // Stalled runs are retried from differently scaled starting points; the
  // path taken, and where it jams, depends strongly on the start.
  ConicSolution best;
  double best_merit = kInfinity;
  bool have_best = false;
  std::string failure;
  for (double scale : kStartScales) {
    try {
      IpmState state(problem, options, scale);
      ConicSolution sol = state.run();
      if (sol.status != SolveStatus::kInaccurate) return sol;
      if (!have_best || state.merit() < best_merit) {
        best = std::move(sol);
        best_merit = state.merit();
        have_best = true;
      }
    } catch (const NumericalBreakdown& e) {
      failure = e.what();
    }
    if (options.verbose) std::fprintf(stderr, "ipm restart\n");
  }
  if (!have_best) throw NumericalBreakdown(failure);
  return best;
}

}  // namespace

ConicSolution InteriorPointSolver::solve(const StandardForm& problem,
                                         const SolverOptions& options) const {
  if (!(options.tol > 0.0)) throw Error("solver tolerance must be positive");
  if (problem.E.rows() != problem.num_rows() ||
      problem.E.cols() != problem.num_vars()) {
    throw DimensionMismatch("equality matrix shape does not match c and f");
  }
  for (const PsdBlock& b : problem.blocks) {
    for (const BlockTerm& t : b.terms) {
      if (t.var < 0 || t.var >= problem.num_vars() || t.coeff.rows() != b.dim ||
          t.coeff.cols() != b.dim) {
        throw DimensionMismatch("malformed term in block '" + b.label + "'");
      }
    }
  }
  if (problem.blocks.empty()) return solve_without_blocks(problem, options);
  ConicSolution sol = solve_with_restarts(problem, options);
  if (sol.status != SolveStatus::kInaccurate ||
      sol.residuals.primal_eq <= options.tol * (1.0 + problem.f.norm())) {
    return sol;
  }
  // Near an empty feasible set the dual objective grows without the ray ever
  // becoming clean enough to certify. The elastic problem
  //   min Σ (u⁺ + u⁻)  s.t.  E y + u⁺ − u⁻ = f,  A(y) ⪰ 0,  u± ≥ 0
  // is always feasible, and its dual optimum is a normalised Farkas ray:
  // Eᵀλ + A*(Q) = 0 with fᵀλ equal to the smallest ℓ1 violation.
  const int nv = problem.num_vars(), nr = problem.num_rows();
  StandardForm elastic;
  elastic.c = VectorXd::Zero(nv + 2 * nr);
  elastic.c.tail(2 * nr).setOnes();
  elastic.E = MatrixXd::Zero(nr, nv + 2 * nr);
  elastic.E.leftCols(nv) = problem.E;
  elastic.E.middleCols(nv, nr) = MatrixXd::Identity(nr, nr);
  elastic.E.rightCols(nr) = -MatrixXd::Identity(nr, nr);
  elastic.f = problem.f;
  elastic.blocks = problem.blocks;
  for (int j = nv; j < nv + 2 * nr; ++j) {
    elastic.blocks.push_back({1, {{j, MatrixXd::Ones(1, 1)}}, "elastic"});
  }
  ConicSolution phase;
  try {
    phase = solve_with_restarts(elastic, options);
  } catch (const NumericalBreakdown&) {
    return sol;
  }
  const double violation = phase.primal_objective;
  if (options.verbose) {
    std::fprintf(stderr, "ipm elastic phase: %s, violation %.3e\n",
                 std::string(to_string(phase.status)).c_str(), violation);
  }
  std::vector<MatrixXd> ray_q(phase.Q.begin(),
                              phase.Q.begin() + problem.blocks.size());
  if (phase.status == SolveStatus::kOptimal &&
      violation > kInfeasibleMargin * options.tol * (1.0 + problem.f.norm())) {
    sol.status = SolveStatus::kPrimalInfeasible;
    sol.lambda = phase.lambda;
    sol.Q = std::move(ray_q);
    sol.dual_objective = problem.f.dot(sol.lambda);
  } else if (problem.f.dot(phase.lambda) > 0.0) {
    sol.ray_lambda = phase.lambda;
    sol.ray_Q = std::move(ray_q);
  }
  return sol;
}

StandardForm canonicalize(const ConicProblem& problem) {
  StandardForm sf;
  const int nv = problem.num_vars;
  sf.c = VectorXd::Zero(nv);
  for (const auto& [pos, coeff] : problem.objective.terms()) sf.c(pos) += coeff;

  const int nr = static_cast<int>(problem.equalities.size());
  sf.E = MatrixXd::Zero(nr, nv);
  sf.f = VectorXd::Zero(nr);
  for (int r = 0; r < nr; ++r) {
    const EqualityRow& row = problem.equalities[r];
    for (const auto& [pos, coeff] : row.form.terms()) sf.E(r, pos) += coeff;
    sf.f(r) = row.rhs;
    sf.row_labels.push_back(row.label);
  }

  for (const SymbolicMatrix& m : problem.psd_blocks) {
    PsdBlock block;
    block.dim = m.dim;
    block.label = m.label;
    std::map<int, MatrixXd> by_var;
    for (int i = 0; i < m.dim; ++i) {
      for (int j = 0; j < m.dim; ++j) {
        for (const auto& [pos, coeff] : m.at(i, j).terms()) {
          auto [it, inserted] = by_var.try_emplace(pos, MatrixXd::Zero(m.dim, m.dim));
          it->second(i, j) += coeff;
        }
      }
    }
    for (auto& [var, coeff] : by_var) {
      block.terms.push_back({var, std::move(coeff)});
    }
    sf.blocks.push_back(std::move(block));
  }
  return sf;
}

}  // namespace basketsdp
