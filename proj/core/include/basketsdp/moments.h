#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "basketsdp/semigroup.h"

namespace basketsdp {

// Sparse linear form Σ coeff · y[position] over moment positions (0-based).
class LinearForm {
 public:
  LinearForm() = default;

  void add(int position, double coeff);
  LinearForm& operator+=(const LinearForm& other);
  LinearForm operator*(double scale) const;

  const std::map<int, double>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int max_position() const;
  double evaluate(std::span<const double> y) const;

  bool operator==(const LinearForm&) const = default;

 private:
  std::map<int, double> terms_;
};

LinearForm to_linear_form(const PolyElement& p, const MomentIndex& index);

// Symmetric matrix of linear forms: the moment matrix of the measure g·ν over
// `basis`, with g = `weight` (g = 1 for the plain moment matrix).
struct SymbolicMatrix {
  int dim = 0;
  std::vector<LinearForm> entries;  // row-major, dim × dim
  std::vector<Monomial> basis;
  PolyElement weight;
  std::string label;

  const LinearForm& at(int i, int j) const { return entries[i * dim + j]; }
};

// M_d(y): entry (i, j) is the moment of basis[i]·basis[j]. Requires the index
// cap to be at least 2d; throws IndexTooSmall otherwise.
SymbolicMatrix moment_matrix(const PayoffSemigroup& semigroup,
                             const MomentIndex& index, int order);

// M_d(g·y): entry (i, j) = Σ_α g_α y(basis[i]·basis[j]·α). Requires
// deg(g) + 2d ≤ index cap.
SymbolicMatrix localizing_matrix(const PayoffSemigroup& semigroup,
                                 const MomentIndex& index,
                                 const PolyElement& weight, int order);

Eigen::MatrixXd instantiate(const SymbolicMatrix& matrix,
                            std::span<const double> y);

std::string dump_matrix(const SymbolicMatrix& matrix,
                        const MomentIndex& index,
                        const GeneratorLayout& layout);

}  // namespace basketsdp
