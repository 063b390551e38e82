#include <cstdio>
#include <sstream>

#include "basketsdp/errors.h"
#include "basketsdp/solver.h"

namespace basketsdp {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& label) {
  std::string out = label.empty() ? "-" : label;
  for (char& ch : out) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  // Next non-empty, non-comment line.
  std::istringstream line() {
    std::string s;
    while (std::getline(in_, s)) {
      ++line_no_;
      if (!s.empty() && s[0] != '#') return std::istringstream(s);
    }
    fail("unexpected end of input");
  }

  template <typename T>
  T field(std::istringstream& ls, const char* what) {
    T v;
    if (!(ls >> v)) fail(std::string("expected ") + what);
    return v;
  }

  void keyword(std::istringstream& ls, const std::string& expected) {
    std::string w;
    if (!(ls >> w) || w != expected) fail("expected '" + expected + "'");
  }

  static std::string rest(std::istringstream& ls) {
    std::string r;
    std::getline(ls >> std::ws, r);
    return r == "-" ? std::string() : r;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("standard form, line " + std::to_string(line_no_) + ": " +
                     what);
  }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

}  // namespace

std::string write_standard_form(const StandardForm& p) {
  std::ostringstream os;
  os << "basketsdp-standard-form 1\n";
  os << "vars " << p.num_vars() << '\n';
  os << "rows " << p.num_rows() << '\n';
  os << "blocks " << p.blocks.size() << '\n';

  int nnz = 0;
  for (int j = 0; j < p.num_vars(); ++j) nnz += p.c(j) != 0.0;
  os << "c " << nnz << '\n';
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.c(j) != 0.0) os << j << ' ' << number(p.c(j)) << '\n';
  }

  for (int r = 0; r < p.num_rows(); ++r) {
    int row_nnz = 0;
    for (int j = 0; j < p.num_vars(); ++j) row_nnz += p.E(r, j) != 0.0;
    const std::string label =
        r < static_cast<int>(p.row_labels.size()) ? p.row_labels[r] : "";
    os << "row " << r << ' ' << number(p.f(r)) << ' ' << row_nnz << ' '
       << sanitize(label) << '\n';
    for (int j = 0; j < p.num_vars(); ++j) {
      if (p.E(r, j) != 0.0) os << j << ' ' << number(p.E(r, j)) << '\n';
    }
  }

  for (std::size_t k = 0; k < p.blocks.size(); ++k) {
    const PsdBlock& b = p.blocks[k];
    std::ostringstream entries;
    int count = 0;
    for (const BlockTerm& t : b.terms) {
      for (int i = 0; i < b.dim; ++i) {
        for (int j = i; j < b.dim; ++j) {
          if (t.coeff(i, j) != 0.0) {
            entries << t.var << ' ' << i << ' ' << j << ' '
                    << number(t.coeff(i, j)) << '\n';
            ++count;
          }
        }
      }
    }
    os << "block " << k << ' ' << b.dim << ' ' << count << ' '
       << sanitize(b.label) << '\n'
       << entries.str();
  }
  return os.str();
}

StandardForm read_standard_form(std::string_view text) {
  Reader rd(text);
  {
    auto ls = rd.line();
    rd.keyword(ls, "basketsdp-standard-form");
    if (rd.field<int>(ls, "format version") != 1) rd.fail("unsupported version");
  }
  auto header = [&rd](const char* key) {
    auto ls = rd.line();
    rd.keyword(ls, key);
    const int v = rd.field<int>(ls, key);
    if (v < 0) rd.fail(std::string("negative ") + key);
    return v;
  };
  const int nv = header("vars");
  const int nr = header("rows");
  const int nb = header("blocks");

  StandardForm p;
  p.c = Eigen::VectorXd::Zero(nv);
  p.E = Eigen::MatrixXd::Zero(nr, nv);
  p.f = Eigen::VectorXd::Zero(nr);

  auto var_index = [&](std::istringstream& ls) {
    const int j = rd.field<int>(ls, "variable index");
    if (j < 0 || j >= nv) rd.fail("variable index out of range");
    return j;
  };

  const int c_nnz = header("c");
  for (int e = 0; e < c_nnz; ++e) {
    auto ls = rd.line();
    const int j = var_index(ls);
    p.c(j) = rd.field<double>(ls, "objective coefficient");
  }

  for (int r = 0; r < nr; ++r) {
    auto ls = rd.line();
    rd.keyword(ls, "row");
    if (rd.field<int>(ls, "row index") != r) rd.fail("rows out of order");
    p.f(r) = rd.field<double>(ls, "row rhs");
    const int nnz = rd.field<int>(ls, "row nnz");
    p.row_labels.push_back(Reader::rest(ls));
    for (int e = 0; e < nnz; ++e) {
      auto es = rd.line();
      const int j = var_index(es);
      p.E(r, j) = rd.field<double>(es, "row coefficient");
    }
  }

  for (int k = 0; k < nb; ++k) {
    auto ls = rd.line();
    rd.keyword(ls, "block");
    if (rd.field<int>(ls, "block index") != k) rd.fail("blocks out of order");
    PsdBlock b;
    b.dim = rd.field<int>(ls, "block dimension");
    if (b.dim <= 0) rd.fail("block dimension must be positive");
    const int nnz = rd.field<int>(ls, "block nnz");
    b.label = Reader::rest(ls);
    std::map<int, Eigen::MatrixXd> by_var;
    for (int e = 0; e < nnz; ++e) {
      auto es = rd.line();
      const int j = var_index(es);
      const int r = rd.field<int>(es, "row");
      const int c = rd.field<int>(es, "column");
      const double v = rd.field<double>(es, "value");
      if (r < 0 || c < r || c >= b.dim) rd.fail("block entry outside upper triangle");
      auto [it, inserted] =
          by_var.try_emplace(j, Eigen::MatrixXd::Zero(b.dim, b.dim));
      it->second(r, c) = v;
      it->second(c, r) = v;
    }
    for (auto& [j, m] : by_var) b.terms.push_back({j, std::move(m)});
    p.blocks.push_back(std::move(b));
  }
  return p;
}

}  // namespace basketsdp
