#include "basketsdp/moments.h"

#include <sstream>

#include "basketsdp/errors.h"

namespace basketsdp {

void LinearForm::add(int position, double coeff) {
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(position, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

LinearForm& LinearForm::operator+=(const LinearForm& other) {
  for (const auto& [pos, c] : other.terms_) add(pos, c);
  return *this;
}

LinearForm LinearForm::operator*(double scale) const {
  LinearForm out;
  for (const auto& [pos, c] : terms_) out.add(pos, c * scale);
  return out;
}

int LinearForm::max_position() const {
  return terms_.empty() ? -1 : terms_.rbegin()->first;
}

double LinearForm::evaluate(std::span<const double> y) const {
  if (max_position() >= static_cast<int>(y.size())) {
    throw DimensionMismatch("moment vector has " + std::to_string(y.size()) +
                            " entries, form references position " +
                            std::to_string(max_position() + 1));
  }
  double v = 0.0;
  for (const auto& [pos, c] : terms_) v += c * y[pos];
  return v;
}

LinearForm to_linear_form(const PolyElement& p, const MomentIndex& index) {
  LinearForm out;
  for (const auto& [m, c] : p.terms()) out.add(index.position(m), c);
  return out;
}

namespace {

void check_budget(const MomentIndex& index, int order, int weight_degree) {
  if (order < 0) throw InfeasibleDegree("matrix order must be nonnegative");
  if (2 * order + weight_degree > index.degree_cap()) {
    throw IndexTooSmall("order " + std::to_string(order) +
                        " with weight degree " + std::to_string(weight_degree) +
                        " needs moments up to degree " +
                        std::to_string(2 * order + weight_degree) +
                        ", index stops at " +
                        std::to_string(index.degree_cap()));
  }
}

}  // namespace

SymbolicMatrix localizing_matrix(const PayoffSemigroup& semigroup,
                                 const MomentIndex& index,
                                 const PolyElement& weight, int order) {
  check_budget(index, order, weight.degree());
  SymbolicMatrix out;
  out.dim = index.count_up_to(order);
  out.basis.assign(index.monomials().begin(),
                   index.monomials().begin() + out.dim);
  out.weight = weight;
  out.entries.resize(static_cast<std::size_t>(out.dim) * out.dim);
  for (int i = 0; i < out.dim; ++i) {
    for (int j = i; j < out.dim; ++j) {
      const PolyElement product = semigroup.multiply(
          semigroup.multiply(out.basis[i], out.basis[j]), weight);
      LinearForm form = to_linear_form(product, index);
      out.entries[i * out.dim + j] = form;
      out.entries[j * out.dim + i] = std::move(form);
    }
  }
  return out;
}

SymbolicMatrix moment_matrix(const PayoffSemigroup& semigroup,
                             const MomentIndex& index, int order) {
  SymbolicMatrix out =
      localizing_matrix(semigroup, index, PolyElement(semigroup.unit()), order);
  out.label = "moment";
  return out;
}

Eigen::MatrixXd instantiate(const SymbolicMatrix& matrix,
                            std::span<const double> y) {
  Eigen::MatrixXd out(matrix.dim, matrix.dim);
  for (int i = 0; i < matrix.dim; ++i) {
    for (int j = i; j < matrix.dim; ++j) {
      out(i, j) = out(j, i) = matrix.at(i, j).evaluate(y);
    }
  }
  return out;
}

std::string dump_matrix(const SymbolicMatrix& matrix, const MomentIndex& index,
                        const GeneratorLayout& layout) {
  std::ostringstream os;
  os << "# " << (matrix.label.empty() ? "matrix" : matrix.label) << " "
     << matrix.dim << "x" << matrix.dim << '\n';
  for (int i = 0; i < matrix.dim; ++i) {
    for (int j = i; j < matrix.dim; ++j) {
      os << (i + 1) << ' ' << (j + 1) << " =";
      for (const auto& [pos, c] : matrix.at(i, j).terms()) {
        os << ' ' << (c >= 0 ? "+" : "") << c << "*y["
           << index.monomial(pos).to_string(layout) << ']';
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace basketsdp
