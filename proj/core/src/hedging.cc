#include "basketsdp/hedging.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "basketsdp/errors.h"

namespace basketsdp {

using nlohmann::json;

double SosPoly::value(const PayoffSemigroup& semigroup,
                      std::span<const double> x) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    z(static_cast<Eigen::Index>(i)) = semigroup.evaluate(basis[i], x);
  }
  return semigroup.evaluate(weight, x) * z.dot(gram * z);
}

HedgeCertificate extract(const ConicProblem& problem,
                         const ConicSolution& solution, double tol) {
  if (solution.status != SolveStatus::kOptimal) {
    throw NotOptimal("cannot extract a hedge from a " +
                     std::string(to_string(solution.status)) + " solution");
  }
  if (problem.spec.mode != Mode::kCompact || !problem.beta) {
    throw Error("hedge certificates are only produced for compact relaxations");
  }
  const double sign = problem.objective_sign;

  HedgeCertificate cert;
  cert.side = problem.spec.side;
  cert.order = problem.spec.order;
  cert.beta = *problem.beta;
  for (const EqualityRow& row : problem.equalities) {
    if (row.kind == RowKind::kForward) cert.num_assets++;
    if (row.kind == RowKind::kPrice) cert.num_priced++;
  }
  cert.lambda.assign(cert.num_assets + cert.num_priced, 0.0);

  double bound = 0.0;
  for (std::size_t r = 0; r < problem.equalities.size(); ++r) {
    const EqualityRow& row = problem.equalities[r];
    const double position = sign * solution.lambda(static_cast<Eigen::Index>(r));
    switch (row.kind) {
      case RowKind::kNormalization:
        cert.cash += position;
        break;
      case RowKind::kForward:
        cert.lambda.at(row.instrument) += position;
        break;
      case RowKind::kPrice:
        cert.lambda.at(cert.num_assets + row.instrument - 1) += position;
        break;
      case RowKind::kLinkage:
        throw Error("linkage rows have no portfolio interpretation");
    }
    bound += position * row.rhs;
  }
  cert.bound = bound;

  for (std::size_t k = 0; k < problem.psd_blocks.size(); ++k) {
    const SymbolicMatrix& block = problem.psd_blocks[k];
    const Eigen::MatrixXd q = 0.5 * (solution.Q[k] + solution.Q[k].transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < -10.0 * tol * scale) {
        throw NotOptimal("Gram matrix of block '" + block.label +
                         "' has eigenvalue " + std::to_string(ev(i)));
      }
      ev(i) = std::max(ev(i), 0.0);
    }
    SosPoly sos;
    sos.label = block.label;
    sos.weight = block.weight;
    sos.basis = block.basis;
    sos.gram = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    sos.gram = 0.5 * (sos.gram + sos.gram.transpose());
    cert.sos.push_back(std::move(sos));
  }
  return cert;
}

double evaluate_portfolio(const HedgeCertificate& cert,
                          const MarketSpec& market, std::span<const double> x) {
  if (static_cast<int>(x.size()) != market.num_assets() ||
      cert.num_assets != market.num_assets() ||
      cert.num_priced != market.num_priced()) {
    throw DimensionMismatch("certificate, market and point disagree in size");
  }
  double v = cert.cash;
  for (int i = 0; i < cert.num_assets; ++i) v += cert.lambda[i] * x[i];
  for (int j = 1; j <= cert.num_priced; ++j) {
    v += cert.lambda[cert.num_assets + j - 1] * market.baskets[j].payoff(x);
  }
  return v;
}

CheckReport check_certificate(const HedgeCertificate& cert,
                              const MarketSpec& market, int samples,
                              std::uint64_t seed) {
  if (!market.compact()) {
    throw UnboundedSupport("certificate checks sample the compact support box");
  }
  const PayoffSemigroup sg(market, false);
  for (const SosPoly& s : cert.sos) {
    for (const Monomial& m : s.basis) {
      if (m.size() != sg.layout().size()) {
        throw DimensionMismatch("certificate basis does not match the market");
      }
    }
  }
  const double side = cert.side == Side::kLower ? 1.0 : -1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  CheckReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.min_sos = std::numeric_limits<double>::infinity();
  std::vector<double> x(market.num_assets());
  const PolyElement payoffs = sg.payoff_sum();
  int attempts = 0;
  const int max_attempts = 1000 * std::max(samples, 1);
  while (report.samples < samples && attempts++ < max_attempts) {
    for (int i = 0; i < market.num_assets(); ++i) {
      x[i] = market.box_upper[i] * unit(rng);
    }
    if (sg.evaluate(payoffs, x) > cert.beta) continue;
    const double slack =
        side * (market.target().payoff(x) - evaluate_portfolio(cert, market, x));
    double sos_total = 0.0;
    for (const SosPoly& s : cert.sos) {
      sos_total += s.value(sg, x);
      double z2 = 0.0;
      Eigen::VectorXd z(static_cast<Eigen::Index>(s.basis.size()));
      for (std::size_t i = 0; i < s.basis.size(); ++i) {
        z(static_cast<Eigen::Index>(i)) = sg.evaluate(s.basis[i], x);
        z2 += z(static_cast<Eigen::Index>(i)) * z(static_cast<Eigen::Index>(i));
      }
      report.min_sos = std::min(report.min_sos, z.dot(s.gram * z) / std::max(z2, 1e-300));
    }
    report.max_residual = std::max(report.max_residual, std::abs(slack - sos_total));
    report.min_slack = std::min(report.min_slack, slack);
    report.samples++;
  }
  return report;
}

namespace {

json poly_to_json(const PolyElement& p) {
  json out = json::array();
  for (const auto& [m, c] : p.terms()) {
    out.push_back({{"exponents", std::vector<int>(m.exponents().begin(),
                                                  m.exponents().end())},
                   {"coeff", c}});
  }
  return out;
}

}  // namespace

std::string certificate_to_json(const HedgeCertificate& cert) {
  json doc;
  doc["side"] = std::string(to_string(cert.side));
  doc["bound"] = cert.bound;
  doc["order"] = cert.order;
  doc["beta"] = cert.beta;
  doc["num_assets"] = cert.num_assets;
  doc["num_priced"] = cert.num_priced;
  doc["lambda"] = cert.lambda;
  doc["cash"] = cert.cash;
  json blocks = json::array();
  for (const SosPoly& s : cert.sos) {
    json b;
    b["label"] = s.label;
    b["weight"] = poly_to_json(s.weight);
    json basis = json::array();
    for (const Monomial& m : s.basis) {
      basis.push_back(std::vector<int>(m.exponents().begin(), m.exponents().end()));
    }
    b["basis"] = std::move(basis);
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.gram.rows(); ++i) {
      std::vector<double> row(s.gram.cols());
      for (Eigen::Index j = 0; j < s.gram.cols(); ++j) row[j] = s.gram(i, j);
      rows.push_back(std::move(row));
    }
    b["matrix"] = std::move(rows);
    blocks.push_back(std::move(b));
  }
  doc["gram_blocks"] = std::move(blocks);
  return doc.dump(2);
}

HedgeCertificate certificate_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text.begin(), text.end());
    HedgeCertificate cert;
    cert.side = parse_side(doc.at("side").get<std::string>());
    cert.bound = doc.at("bound").get<double>();
    cert.order = doc.at("order").get<int>();
    cert.beta = doc.at("beta").get<double>();
    cert.num_assets = doc.at("num_assets").get<int>();
    cert.num_priced = doc.at("num_priced").get<int>();
    cert.lambda = doc.at("lambda").get<std::vector<double>>();
    cert.cash = doc.at("cash").get<double>();
    if (static_cast<int>(cert.lambda.size()) != cert.num_assets + cert.num_priced) {
      throw ParseError("certificate lambda has the wrong length");
    }
    for (const json& b : doc.at("gram_blocks")) {
      SosPoly s;
      s.label = b.value("label", "");
      for (const json& term : b.at("weight")) {
        s.weight.add(Monomial(term.at("exponents").get<std::vector<int>>()),
                     term.at("coeff").get<double>());
      }
      for (const json& m : b.at("basis")) {
        s.basis.emplace_back(m.get<std::vector<int>>());
      }
      const auto rows = b.at("matrix").get<std::vector<std::vector<double>>>();
      const auto dim = static_cast<Eigen::Index>(s.basis.size());
      if (static_cast<Eigen::Index>(rows.size()) != dim) {
        throw ParseError("gram block '" + s.label + "' size does not match its basis");
      }
      s.gram.resize(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != dim) {
          throw ParseError("gram block '" + s.label + "' is not square");
        }
        for (Eigen::Index j = 0; j < dim; ++j) s.gram(i, j) = rows[i][j];
      }
      cert.sos.push_back(std::move(s));
    }
    return cert;
  } catch (const json::exception& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
}

}  // namespace basketsdp
