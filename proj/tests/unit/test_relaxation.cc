#include <doctest.h>

#include <cmath>

#include "basketsdp/errors.h"
#include "basketsdp/moments.h"
#include "basketsdp/oracle.h"
#include "basketsdp/relaxation.h"

using namespace basketsdp;

namespace {

MarketSpec merton() {
  MarketSpec mk;
  mk.forwards = {1.0};
  mk.support = SupportKind::kCompact;
  mk.box_upper = {2.0};
  mk.baskets = {{{1.0}, 1.0}};
  return mk;
}

MarketSpec jensen_violation() {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 0.5});
  mk.straddle_prices = {0.45};
  return mk;
}

RelaxationSpec spec(int order, Side side = Side::kLower, Mode mode = Mode::kCompact) {
  RelaxationSpec s;
  s.order = order;
  s.side = side;
  s.mode = mode;
  return s;
}

BoundResult bound(const MarketSpec& mk, const RelaxationSpec& s) {
  return solve_bound(assemble(mk, s), InteriorPointSolver(), 1e-7);
}

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

}  // namespace

TEST_CASE("order-one compact layout") {
  const ConicProblem p = assemble(merton(), spec(1));
  CHECK(p.num_vars == 5);
  REQUIRE(p.psd_blocks.size() == 4);
  CHECK(p.psd_blocks[0].dim == 3);
  for (std::size_t k = 1; k < 4; ++k) CHECK(p.psd_blocks[k].dim == 1);
  CHECK(p.psd_blocks.back().label == "compactness");
  REQUIRE(p.equalities.size() == 2);
  CHECK(p.equalities[0].kind == RowKind::kNormalization);
  CHECK(p.equalities[1].kind == RowKind::kForward);
  CHECK(p.equalities[1].rhs == 1.0);
  CHECK(p.beta.value() == doctest::Approx(3.0));
}

TEST_CASE("asset-only localizer set drops the straddle localizers") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 0.5});
  mk.straddle_prices = {0.6};
  RelaxationSpec s = spec(2);
  s.localizers = LocalizerSet::kAssets;
  const ConicProblem p = assemble(mk, s);
  REQUIRE(p.psd_blocks.size() == 3);
  CHECK(p.psd_blocks[1].label == "localizer x1");
  CHECK(p.psd_blocks[2].label == "compactness");
  CHECK(p.equalities.back().kind == RowKind::kPrice);
  CHECK(p.equalities.back().rhs == 0.6);
}

TEST_CASE("asset-only localizers leave the lower bound unbounded") {
  // Nothing keeps y(s_0) nonnegative: y(s_0) = −a, y(x) = 1, y(x s_0) = −a and
  // y(x²) = a² + 2 give a covariance block diag(1, a² + 1) for every a.
  RelaxationSpec s = spec(1);
  s.localizers = LocalizerSet::kAssets;
  const ConicProblem p = assemble(merton(), s);
  const PayoffSemigroup sg(merton(), true);
  for (double a : {1.0, 1e3, 1e6}) {
    std::vector<double> y(p.num_vars, 0.0);
    y[p.index.position(sg.unit())] = 1.0;
    y[p.index.position(sg.straddle(0))] = -a;
    y[p.index.position(sg.asset(0))] = 1.0;
    y[p.index.position(Monomial({1, 1, 0}))] = -a;
    y[p.index.position(Monomial({0, 2, 0}))] = a * a + 2.0;
    for (const EqualityRow& r : p.equalities) CHECK(r.form.evaluate(y) == r.rhs);
    for (const SymbolicMatrix& b : p.psd_blocks) {
      const Eigen::MatrixXd m = instantiate(b, y);
      CHECK(min_eig(m) >= -1e-9 * m.cwiseAbs().maxCoeff());
    }
  }
  CHECK(bound(merton(), s).status != SolveStatus::kOptimal);
}

TEST_CASE("order zero is rejected") {
  CHECK_THROWS_AS(assemble(merton(), spec(0)), InfeasibleDegree);
}

TEST_CASE("objective binds the target moment with the side's sign") {
  const ConicProblem lo = assemble(merton(), spec(2, Side::kLower));
  const ConicProblem hi = assemble(merton(), spec(2, Side::kUpper));
  const PayoffSemigroup sg(merton(), true);
  const int pos = lo.index.position(sg.straddle(0));
  CHECK(lo.objective.terms().at(pos) == 1.0);
  CHECK(hi.objective.terms().at(pos) == -1.0);
}

TEST_CASE("linkage rows in the unbounded hierarchy") {
  const ConicProblem p = assemble(merton(), spec(2, Side::kLower, Mode::kUnbounded));
  const PayoffSemigroup sg(merton(), true);
  int linkage = 0;
  for (const EqualityRow& r : p.equalities) {
    if (r.kind != RowKind::kLinkage) continue;
    ++linkage;
    CHECK(r.rhs == 0.0);
  }
  CHECK(linkage > 0);
  // At s = 1: y(1) − y(t) − y(x² t) − y(s_0² t) with s_0² = x² − 2x + 1.
  const EqualityRow& first = *std::find_if(
      p.equalities.begin(), p.equalities.end(),
      [](const EqualityRow& r) { return r.kind == RowKind::kLinkage; });
  const auto& t = first.form.terms();
  const Monomial aux = sg.aux();
  CHECK(t.at(p.index.position(sg.unit())) == 1.0);
  CHECK(t.at(p.index.position(aux)) == -2.0);
  CHECK(t.at(p.index.position(Monomial({0, 2, 1}))) == -2.0);
  CHECK(t.at(p.index.position(Monomial({0, 1, 1}))) == 2.0);
}

TEST_CASE("linkage rows hold for measures with the auxiliary weight") {
  // With t = θ(x), s·t^k − s·t^{k+1}(1 + Σ e²) = 0 pointwise.
  const GeneratedMarket g = random_consistent_market(5, 1, 1, {2.0});
  MarketSpec mk = g.market;
  mk.support = SupportKind::kUnbounded;
  const ConicProblem p = assemble(mk, spec(2, Side::kLower, Mode::kUnbounded));
  const PayoffSemigroup sg(mk, true);
  const std::vector<double> y = moment_vector(p.index, sg, g.measure);
  for (const EqualityRow& r : p.equalities) {
    if (r.kind == RowKind::kLinkage) CHECK(std::abs(r.form.evaluate(y)) <= 1e-12);
  }
}

TEST_CASE("Merton bounds") {
  const BoundResult lo = bound(merton(), spec(2, Side::kLower));
  REQUIRE(lo.status == SolveStatus::kOptimal);
  CHECK(std::abs(lo.value) <= 1e-5);

  const BoundResult hi = bound(merton(), spec(3, Side::kUpper));
  REQUIRE(hi.status == SolveStatus::kOptimal);
  const LpBounds lp = lp_bounds(merton(), {401}, InteriorPointSolver());
  CHECK(hi.value >= lp.max - 1e-6);
  CHECK(hi.value <= lp.max + 5e-2);
}

TEST_CASE("bounds bracket generated prices and tighten with the order") {
  for (int seed = 0; seed < 6; ++seed) {
    const int n = 1 + seed % 2;
    const GeneratedMarket g =
        random_consistent_market(40 + seed, n, seed % 3, std::vector<double>(n, 2.0));
    double lo[2], hi[2];
    for (int order = 1; order <= 2; ++order) {
      const BoundResult l = bound(g.market, spec(order, Side::kLower));
      const BoundResult u = bound(g.market, spec(order, Side::kUpper));
      REQUIRE(l.status == SolveStatus::kOptimal);
      REQUIRE(u.status == SolveStatus::kOptimal);
      lo[order - 1] = l.value;
      hi[order - 1] = u.value;
      CHECK(l.value <= g.target_price + 1e-6);
      CHECK(u.value >= g.target_price - 1e-6);
    }
    CHECK(lo[0] <= lo[1] + 1e-6);
    CHECK(hi[0] >= hi[1] - 1e-6);
  }
}

TEST_CASE("a quoted target pins the bound to its price") {
  MarketSpec mk = merton();
  mk.baskets.push_back({{1.0}, 1.0});
  mk.straddle_prices = {0.4};
  for (Side side : {Side::kLower, Side::kUpper}) {
    const BoundResult r = bound(mk, spec(2, side));
    REQUIRE(r.status == SolveStatus::kOptimal);
    CHECK(r.value == doctest::Approx(0.4).epsilon(1e-6));
  }
}

TEST_CASE("order one cannot see a Jensen-floor violation") {
  // Pseudo-moments with y(1)=1, y(x)=1, y(s_1)=0.45, zero covariance between
  // s_1 and x, and a large y(x²) satisfy every order-one block, although no
  // measure has E|x − 0.5| < |E x − 0.5|.
  const MarketSpec mk = jensen_violation();
  const ConicProblem p = assemble(mk, spec(1));
  const PayoffSemigroup sg(mk, true);
  std::vector<double> y(p.num_vars, 0.0);
  auto set = [&](const Monomial& m, double v) { y[p.index.position(m)] = v; };
  const double x2 = 1.5;
  set(sg.unit(), 1.0);
  set(sg.asset(0), 1.0);
  set(sg.straddle(0), 0.5);
  set(sg.straddle(1), 0.45);
  set(Monomial({0, 0, 2, 0}), x2);
  set(Monomial({1, 0, 1, 0}), 0.5);
  set(Monomial({0, 1, 1, 0}), 0.45);
  set(Monomial({1, 1, 0, 0}), 0.5 * 0.45);
  for (const EqualityRow& r : p.equalities) {
    CHECK(std::abs(r.form.evaluate(y) - r.rhs) <= 1e-12);
  }
  for (const SymbolicMatrix& b : p.psd_blocks) {
    CHECK(min_eig(instantiate(b, y)) >= 0.0);
  }
  CHECK(bound(mk, spec(1)).status == SolveStatus::kOptimal);
}

TEST_CASE("higher orders certify the Jensen-floor violation") {
  CHECK(bound(jensen_violation(), spec(3)).status == SolveStatus::kPrimalInfeasible);
}

TEST_CASE("unbounded hierarchy lower bound is weaker than the compact one") {
  const BoundResult unb = bound(merton(), spec(2, Side::kLower, Mode::kUnbounded));
  const BoundResult cmp = bound(merton(), spec(2, Side::kLower));
  REQUIRE(unb.status == SolveStatus::kOptimal);
  CHECK(unb.value >= -1e-5);
  CHECK(unb.value <= cmp.value + 1e-5);
}

TEST_CASE("export writes the standard form") {
  const std::string text = export_problem(assemble(merton(), spec(1)));
  CHECK(text.rfind("basketsdp-standard-form 1", 0) == 0);
  const StandardForm sf = read_standard_form(text);
  CHECK(sf.num_vars() == 5);
  CHECK(sf.blocks.size() == 4);
}
