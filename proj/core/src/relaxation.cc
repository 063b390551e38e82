#include "basketsdp/relaxation.h"

#include <cmath>
#include <limits>

#include "basketsdp/errors.h"

namespace basketsdp {

std::string_view to_string(Side side) {
  return side == Side::kLower ? "lower" : "upper";
}

std::string_view to_string(Mode mode) {
  return mode == Mode::kCompact ? "compact" : "unbounded";
}

std::string_view to_string(LocalizerSet set) {
  return set == LocalizerSet::kAssets ? "assets" : "full";
}

Side parse_side(std::string_view text) {
  if (text == "lower") return Side::kLower;
  if (text == "upper") return Side::kUpper;
  throw ParseError("side must be lower or upper, got '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text) {
  if (text == "compact") return Mode::kCompact;
  if (text == "unbounded") return Mode::kUnbounded;
  throw ParseError("mode must be compact or unbounded, got '" +
                   std::string(text) + "'");
}

LocalizerSet parse_localizer_set(std::string_view text) {
  if (text == "assets") return LocalizerSet::kAssets;
  if (text == "full") return LocalizerSet::kFull;
  throw ParseError("localizer set must be assets or full, got '" +
                   std::string(text) + "'");
}

namespace {

ConicProblem common_setup(const MarketSpec& market, const RelaxationSpec& spec,
                          const PayoffSemigroup& sg) {
  if (spec.order < 1) {
    throw InfeasibleDegree("relaxation order must be at least 1, got " +
                           std::to_string(spec.order));
  }
  ConicProblem p;
  p.spec = spec;
  p.index = sg.build_index(2 * spec.order, spec.mode);
  p.num_vars = p.index.size();
  p.objective_sign = spec.side == Side::kLower ? 1.0 : -1.0;
  p.objective =
      to_linear_form(sg.canonical(sg.straddle(0)), p.index) * p.objective_sign;

  p.equalities.push_back({to_linear_form(PolyElement(sg.unit()), p.index), 1.0,
                          RowKind::kNormalization, -1, "normalization"});
  for (int i = 0; i < market.num_assets(); ++i) {
    p.equalities.push_back({to_linear_form(PolyElement(sg.asset(i)), p.index),
                            market.forwards[i], RowKind::kForward, i,
                            "forward x" + std::to_string(i + 1)});
  }
  for (int j = 1; j <= market.num_priced(); ++j) {
    p.equalities.push_back(
        {to_linear_form(sg.canonical(sg.straddle(j)), p.index),
         market.straddle_prices.at(j - 1), RowKind::kPrice, j,
         "price s" + std::to_string(j)});
  }

  SymbolicMatrix moment = moment_matrix(sg, p.index, spec.order);
  moment.label = "moment";
  p.psd_blocks.push_back(std::move(moment));

  const int loc_order = spec.order - 1;
  for (int i = 0; i < market.num_assets(); ++i) {
    SymbolicMatrix m =
        localizing_matrix(sg, p.index, PolyElement(sg.asset(i)), loc_order);
    m.label = "localizer x" + std::to_string(i + 1);
    p.psd_blocks.push_back(std::move(m));
  }
  if (spec.localizers == LocalizerSet::kFull) {
    for (int j = 0; j <= market.num_priced(); ++j) {
      // Identical baskets share a generator; one localizer suffices.
      if (sg.representative(j) != j) continue;
      SymbolicMatrix m = localizing_matrix(
          sg, p.index, sg.canonical(sg.straddle(j)), loc_order);
      m.label = "localizer s" + std::to_string(j);
      p.psd_blocks.push_back(std::move(m));
    }
  }
  return p;
}

}  // namespace

ConicProblem assemble_compact(const MarketSpec& market,
                              const RelaxationSpec& spec) {
  if (spec.mode != Mode::kCompact) {
    throw Error("assemble_compact called with unbounded mode");
  }
  const double beta = effective_beta(market);
  const PayoffSemigroup sg(market, spec.reduce_squares);
  ConicProblem p = common_setup(market, spec, sg);
  p.beta = beta;
  const PolyElement g = PolyElement(sg.unit(), beta) - sg.payoff_sum();
  SymbolicMatrix m = localizing_matrix(sg, p.index, g, spec.order - 1);
  m.label = "compactness";
  p.psd_blocks.push_back(std::move(m));

  const GeneratorLayout& layout = sg.layout();
  p.generator_scale.assign(layout.size(), 1.0);
  for (int j = 0; j < layout.num_straddles; ++j) {
    const double top = market.baskets[j].max_payoff_on_box(market.box_upper);
    if (top > 0.0) p.generator_scale[layout.straddle(j)] = top;
  }
  for (int i = 0; i < layout.num_assets; ++i) {
    if (market.box_upper[i] > 0.0) {
      p.generator_scale[layout.asset(i)] = market.box_upper[i];
    }
  }
  return p;
}

ConicProblem assemble_unbounded(const MarketSpec& market,
                                const RelaxationSpec& spec) {
  if (spec.mode != Mode::kUnbounded) {
    throw Error("assemble_unbounded called with compact mode");
  }
  const PayoffSemigroup sg(market, spec.reduce_squares);
  ConicProblem p = common_setup(market, spec, sg);

  // s t^k − s t^{k+1} − Σ e_k² s t^{k+1} = 0, kept only when every term is
  // indexed. Σ e_k² has degree 2, so the widest term has degree deg(s t^k) + 3.
  const PolyElement squares = sg.square_sum();
  const Monomial t = sg.aux();
  const int cap = p.index.degree_cap();
  for (const Monomial& m : p.index.monomials()) {
    if (m.degree() + 1 + squares.degree() > cap) continue;
    const PolyElement shifted = sg.multiply(m, t);
    const PolyElement row = PolyElement(m) - shifted -
                            sg.multiply(squares, shifted);
    p.equalities.push_back({to_linear_form(row, p.index), 0.0,
                            RowKind::kLinkage, -1,
                            "linkage " + m.to_string(sg.layout())});
  }
  return p;
}

ConicProblem assemble(const MarketSpec& market, const RelaxationSpec& spec) {
  return spec.mode == Mode::kCompact ? assemble_compact(market, spec)
                                     : assemble_unbounded(market, spec);
}

namespace {

double monomial_scale(const Monomial& m, const std::vector<double>& scale) {
  double v = 1.0;
  for (int slot = 0; slot < m.size(); ++slot) {
    if (m[slot] != 0) v *= std::pow(scale[slot], m[slot]);
  }
  return v;
}

// Exact change of variables y = D ỹ, S_k = Δ_k S̃_k Δ_k, rows scaled by R, so
// that moments of generators normalised to [0, 1] are solved for. Bounds are
// unchanged; only the conditioning of the solve improves.
struct Scaling {
  Eigen::VectorXd var;                 // D
  Eigen::VectorXd row;                 // R
  std::vector<Eigen::VectorXd> block;  // diag(Δ_k)
};

Scaling make_scaling(const ConicProblem& problem, const StandardForm& sf) {
  Scaling sc;
  const auto& gs = problem.generator_scale;
  sc.var = Eigen::VectorXd::Ones(sf.num_vars());
  for (int j = 0; j < sf.num_vars(); ++j) {
    sc.var(j) = monomial_scale(problem.index.monomial(j), gs);
  }
  sc.row = Eigen::VectorXd::Ones(sf.num_rows());
  for (int r = 0; r < sf.num_rows(); ++r) {
    const double top = (sf.E.row(r).transpose().cwiseProduct(sc.var)).cwiseAbs().maxCoeff();
    if (top > 0.0) sc.row(r) = 1.0 / top;
  }
  for (const SymbolicMatrix& m : problem.psd_blocks) {
    double weight = 0.0;
    for (const auto& [mono, coeff] : m.weight.terms()) {
      weight = std::max(weight, std::abs(coeff) * monomial_scale(mono, gs));
    }
    if (weight <= 0.0) weight = 1.0;
    Eigen::VectorXd d(m.dim);
    for (int i = 0; i < m.dim; ++i) {
      d(i) = std::sqrt(weight) * monomial_scale(m.basis[i], gs);
    }
    sc.block.push_back(std::move(d));
  }
  return sc;
}

StandardForm apply_scaling(const StandardForm& sf, const Scaling& sc) {
  StandardForm out = sf;
  out.c = sf.c.cwiseProduct(sc.var);
  out.E = sc.row.asDiagonal() * sf.E * sc.var.asDiagonal();
  out.f = sf.f.cwiseProduct(sc.row);
  for (std::size_t k = 0; k < out.blocks.size(); ++k) {
    const Eigen::VectorXd inv = sc.block[k].cwiseInverse();
    for (BlockTerm& t : out.blocks[k].terms) {
      t.coeff = sc.var(t.var) * (inv.asDiagonal() * t.coeff * inv.asDiagonal());
    }
  }
  return out;
}

void remove_scaling(const StandardForm& sf, const Scaling& sc,
                    ConicSolution& sol) {
  sol.y = sol.y.cwiseProduct(sc.var);
  sol.lambda = sol.lambda.cwiseProduct(sc.row);
  for (std::size_t k = 0; k < sol.Q.size(); ++k) {
    const Eigen::VectorXd inv = sc.block[k].cwiseInverse();
    sol.Q[k] = inv.asDiagonal() * sol.Q[k] * inv.asDiagonal();
  }
  if (sol.ray_lambda.size() > 0) {
    sol.ray_lambda = sol.ray_lambda.cwiseProduct(sc.row);
    for (std::size_t k = 0; k < sol.ray_Q.size(); ++k) {
      const Eigen::VectorXd inv = sc.block[k].cwiseInverse();
      sol.ray_Q[k] = inv.asDiagonal() * sol.ray_Q[k] * inv.asDiagonal();
    }
  }
  sol.primal_objective = sf.c.dot(sol.y);
  sol.dual_objective = sf.f.dot(sol.lambda);
  sol.residuals.primal_eq = (sf.E * sol.y - sf.f).norm();
  sol.residuals.dual =
      (sf.c - sf.E.transpose() * sol.lambda - sf.adjoint(sol.Q)).norm();
  sol.residuals.gap = sol.primal_objective - sol.dual_objective;
  double lmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(sf.blocks.size()); ++k) {
    const Eigen::MatrixXd s = sf.slack(k, sol.y);
    if (s.rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
      lmin = std::min(lmin, es.eigenvalues()(0));
    }
  }
  sol.residuals.min_slack_eig = lmin;
}

// Every measure on the box has |y_j| ≤ D_j. For Q ⪰ 0 and r = Eᵀλ + A*(Q),
// a feasible y would give fᵀλ = rᵀy − ⟨A(y), Q⟩ ≤ Σ |r_j| D_j, so a ray whose
// objective beats that sum proves no measure matches the quotes.
bool ray_certifies_arbitrage(const StandardForm& sf, const Scaling& sc,
                             ConicSolution& sol) {
  if (sol.ray_lambda.size() != sf.num_rows() ||
      sol.ray_Q.size() != sf.blocks.size()) {
    return false;
  }
  std::vector<Eigen::MatrixXd> q(sol.ray_Q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (sol.ray_Q[k] + sol.ray_Q[k].transpose()));
    q[k] = es.eigenvectors() *
           es.eigenvalues().cwiseMax(0.0).asDiagonal() *
           es.eigenvectors().transpose();
  }
  const Eigen::VectorXd r = sf.E.transpose() * sol.ray_lambda + sf.adjoint(q);
  const double slack = sf.f.dot(sol.ray_lambda) - r.cwiseAbs().dot(sc.var);
  if (!(slack > 0.0)) return false;
  sol.status = SolveStatus::kPrimalInfeasible;
  sol.lambda = sol.ray_lambda;
  sol.Q = std::move(q);
  sol.dual_objective = sf.f.dot(sol.lambda);
  return true;
}

}  // namespace

BoundResult solve_bound(const ConicProblem& problem,
                        const SolverBackend& solver, double tol) {
  const StandardForm sf = canonicalize(problem);
  SolverOptions options;
  options.tol = tol;
  BoundResult out;
  try {
    if (problem.generator_scale.empty()) {
      out.dual = solver.solve(sf, options);
    } else {
      const Scaling sc = make_scaling(problem, sf);
      out.dual = solver.solve(apply_scaling(sf, sc), options);
      remove_scaling(sf, sc, out.dual);
      if (out.dual.status == SolveStatus::kInaccurate) {
        ray_certifies_arbitrage(sf, sc, out.dual);
      }
    }
  } catch (const NumericalBreakdown& e) {
    throw SolverFailure(std::string("solver breakdown: ") + e.what());
  }
  out.status = out.dual.status;
  out.y.assign(out.dual.y.data(), out.dual.y.data() + out.dual.y.size());
  out.value = out.status == SolveStatus::kOptimal
                  ? problem.objective_sign * out.dual.primal_objective
                  : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::string export_problem(const ConicProblem& problem) {
  return write_standard_form(canonicalize(problem));
}

}  // namespace basketsdp
