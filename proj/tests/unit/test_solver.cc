#include <doctest.h>

#include <cmath>

#include "basketsdp/errors.h"
#include "basketsdp/relaxation.h"
#include "basketsdp/solver.h"

using namespace basketsdp;

namespace {

// min y2  s.t.  y1 = 1,  [[y1, y2], [y2, y1]] ⪰ 0.  Optimum y2 = −1.
StandardForm two_by_two() {
  StandardForm sf;
  sf.c = Eigen::Vector2d(0.0, 1.0);
  sf.E = Eigen::MatrixXd(1, 2);
  sf.E << 1.0, 0.0;
  sf.f = Eigen::VectorXd::Ones(1);
  PsdBlock block;
  block.dim = 2;
  block.terms.push_back({0, Eigen::Matrix2d::Identity()});
  Eigen::Matrix2d off;
  off << 0.0, 1.0, 1.0, 0.0;
  block.terms.push_back({1, off});
  sf.blocks.push_back(block);
  return sf;
}

PsdBlock scalar_block(int var, double coeff) {
  PsdBlock b;
  b.dim = 1;
  b.terms.push_back({var, Eigen::MatrixXd::Constant(1, 1, coeff)});
  return b;
}

SolverOptions tight() {
  SolverOptions o;
  o.tol = 1e-9;
  return o;
}

MarketSpec merton() {
  MarketSpec mk;
  mk.forwards = {1.0};
  mk.support = SupportKind::kCompact;
  mk.box_upper = {2.0};
  mk.baskets = {{{1.0}, 1.0}};
  return mk;
}

}  // namespace

TEST_CASE("two-by-two problem reaches the analytic optimum") {
  const StandardForm sf = two_by_two();
  const ConicSolution sol = InteriorPointSolver().solve(sf, tight());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.y(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(sol.y(1) + 1.0) <= 1e-7);
  CHECK(std::abs(sol.primal_objective - sol.dual_objective) <= 1e-7);
  // Dual optimum λ = −1, Q = ½[[1, 1], [1, 1]].
  REQUIRE(sol.Q.size() == 1);
  CHECK(sol.lambda(0) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(sol.Q[0](0, 1) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("contradicting equalities are primal infeasible") {
  StandardForm sf;
  sf.c = Eigen::VectorXd::Zero(1);
  sf.E = Eigen::MatrixXd::Ones(2, 1);
  sf.f = Eigen::Vector2d(1.0, 2.0);
  sf.blocks.push_back(scalar_block(0, 1.0));
  CHECK(InteriorPointSolver().solve(sf, tight()).status == SolveStatus::kPrimalInfeasible);
}

TEST_CASE("a cone that excludes the affine set is primal infeasible") {
  // y = −1 with y ≥ 0.
  StandardForm sf;
  sf.c = Eigen::VectorXd::Ones(1);
  sf.E = Eigen::MatrixXd::Ones(1, 1);
  sf.f = Eigen::VectorXd::Constant(1, -1.0);
  sf.blocks.push_back(scalar_block(0, 1.0));
  CHECK(InteriorPointSolver().solve(sf, tight()).status == SolveStatus::kPrimalInfeasible);
}

TEST_CASE("an objective unbounded below is dual infeasible") {
  // min −y1  s.t.  y2 = 1,  y1 ≥ 0.
  StandardForm sf;
  sf.c = Eigen::Vector2d(-1.0, 0.0);
  sf.E = Eigen::MatrixXd(1, 2);
  sf.E << 0.0, 1.0;
  sf.f = Eigen::VectorXd::Ones(1);
  sf.blocks.push_back(scalar_block(0, 1.0));
  sf.blocks.push_back(scalar_block(1, 1.0));
  CHECK(InteriorPointSolver().solve(sf, tight()).status == SolveStatus::kDualInfeasible);
}

TEST_CASE("diagonal linear program") {
  // min y1 + 2 y2  s.t.  y1 + y2 = 1,  y ≥ 0.
  StandardForm sf;
  sf.c = Eigen::Vector2d(1.0, 2.0);
  sf.E = Eigen::MatrixXd::Ones(1, 2);
  sf.f = Eigen::VectorXd::Ones(1);
  sf.blocks.push_back(scalar_block(0, 1.0));
  sf.blocks.push_back(scalar_block(1, 1.0));
  const ConicSolution sol = InteriorPointSolver().solve(sf, tight());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(sol.y(1)) <= 1e-7);
}

TEST_CASE("equality-only problems solve without blocks") {
  StandardForm sf;
  sf.c = Eigen::Vector2d(3.0, -1.0);
  sf.E = Eigen::Matrix2d::Identity();
  sf.f = Eigen::Vector2d(2.0, 5.0);
  const ConicSolution sol = InteriorPointSolver().solve(sf, tight());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.primal_objective == doctest::Approx(1.0));
  CHECK(sol.lambda(0) == doctest::Approx(3.0));
}

TEST_CASE("malformed problems are rejected") {
  StandardForm sf = two_by_two();
  sf.f = Eigen::Vector2d(1.0, 1.0);
  CHECK_THROWS_AS(InteriorPointSolver().solve(sf, tight()), DimensionMismatch);
}

TEST_CASE("slack and adjoint are consistent") {
  const StandardForm sf = two_by_two();
  const Eigen::Vector2d y(0.3, -0.7);
  Eigen::Matrix2d q;
  q << 2.0, 0.5, 0.5, 1.0;
  // ⟨S(y), Q⟩ = yᵀ A*(Q).
  const double lhs = (sf.slack(0, y).array() * q.array()).sum();
  CHECK(lhs == doctest::Approx(y.dot(sf.adjoint({q}))));
}

TEST_CASE("weak duality holds at the returned point") {
  const ConicProblem p = [] {
    RelaxationSpec s;
    s.order = 2;
    return assemble(merton(), s);
  }();
  const StandardForm sf = canonicalize(p);
  const ConicSolution sol = InteriorPointSolver().solve(sf, tight());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.primal_objective >= sol.dual_objective - 1e-7);
  CHECK(sol.residuals.min_slack_eig >= -1e-7);
}

TEST_CASE("solves are deterministic") {
  const StandardForm sf = two_by_two();
  const ConicSolution a = InteriorPointSolver().solve(sf, tight());
  const ConicSolution b = InteriorPointSolver().solve(sf, tight());
  CHECK(a.iterations == b.iterations);
  CHECK((a.y - b.y).norm() == 0.0);
}

TEST_CASE("standard form text round-trips") {
  RelaxationSpec s;
  s.order = 2;
  const StandardForm sf = canonicalize(assemble(merton(), s));
  const StandardForm back = read_standard_form(write_standard_form(sf));
  CHECK(back.num_vars() == sf.num_vars());
  CHECK(back.num_rows() == sf.num_rows());
  CHECK((back.c - sf.c).norm() == 0.0);
  CHECK((back.E - sf.E).norm() == 0.0);
  CHECK((back.f - sf.f).norm() == 0.0);
  REQUIRE(back.blocks.size() == sf.blocks.size());
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(sf.num_vars(), -1.0, 1.0);
  for (std::size_t k = 0; k < sf.blocks.size(); ++k) {
    CHECK(back.blocks[k].label == sf.blocks[k].label);
    CHECK((back.slack(k, y) - sf.slack(k, y)).norm() == 0.0);
  }
  CHECK(back.row_labels == sf.row_labels);
  CHECK_THROWS_AS(read_standard_form("not a problem"), ParseError);
}
