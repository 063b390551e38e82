#pragma once

#include <optional>
#include <string>
#include <vector>

#include "basketsdp/moments.h"
#include "basketsdp/semigroup.h"

namespace basketsdp {

enum class Side { kLower, kUpper };

// kAssets: localizers on the asset coordinates only. kFull: on every payoff
// generator (coordinates and straddles).
enum class LocalizerSet { kAssets, kFull };

struct RelaxationSpec {
  int order = 1;
  Mode mode = Mode::kCompact;
  Side side = Side::kLower;
  bool reduce_squares = true;
  LocalizerSet localizers = LocalizerSet::kFull;
};

enum class RowKind { kNormalization, kForward, kPrice, kLinkage };

struct EqualityRow {
  LinearForm form;
  double rhs = 0.0;
  RowKind kind = RowKind::kLinkage;
  // Asset index for kForward, basket index for kPrice, -1 otherwise.
  int instrument = -1;
  std::string label;
};

// Minimize objective·y subject to the equalities and every block ⪰ 0. The
// blocks are homogeneous in y; constants enter through the y(1) = 1 row.
struct ConicProblem {
  int num_vars = 0;
  LinearForm objective;
  std::vector<EqualityRow> equalities;
  std::vector<SymbolicMatrix> psd_blocks;

  RelaxationSpec spec;
  MomentIndex index;
  // +1 for lower bounds (minimize y(s_0)), -1 for upper bounds.
  double objective_sign = 1.0;
  std::optional<double> beta;
  // Magnitude of each generator slot over the support (empty: unit scales).
  // Used only to condition the numerical solve.
  std::vector<double> generator_scale;
};

std::string_view to_string(Side side);
std::string_view to_string(Mode mode);
std::string_view to_string(LocalizerSet set);
Side parse_side(std::string_view text);
Mode parse_mode(std::string_view text);
LocalizerSet parse_localizer_set(std::string_view text);

}  // namespace basketsdp
