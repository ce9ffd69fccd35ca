#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anonplan/factor_shape.hpp"
#include "anonplan/linear_expr.hpp"
#include "anonplan/mixed_factor.hpp"

namespace anonplan {

/// A mixed-mode factor whose entries are affine expressions over LP variables.
///
/// Same layout and validity rules as MixedModeFactor. Entry terms are stored in one
/// compressed array: entry i owns terms [offsets[i], offsets[i+1]).
class SymbolicFactor {
 public:
  /// Empty scope, expression 0.
  SymbolicFactor();
  SymbolicFactor(FactorShape shape, std::vector<double> constants, std::vector<std::size_t> offsets,
                 std::vector<LpTerm> terms);

  /// Entries are the constants f(entry).
  static SymbolicFactor numeric(const MixedModeFactor& f);
  /// Entries are f(entry) * w.
  static SymbolicFactor weighted(const MixedModeFactor& f, LpVar w);

  const FactorShape& shape() const { return shape_; }
  std::size_t size() const { return constants_.size(); }
  bool valid(std::size_t i) const { return shape_.valid(i); }
  double constant(std::size_t i) const { return constants_[i]; }
  std::span<const LpTerm> terms(std::size_t i) const {
    return {terms_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  LinearExpr entry(std::size_t i) const;
  std::size_t term_count() const { return terms_.size(); }

 private:
  FactorShape shape_;
  std::vector<double> constants_;
  std::vector<std::size_t> offsets_;
  std::vector<LpTerm> terms_;
};

/// Entrywise sum of expressions over the merged scope (normalized terms).
SymbolicFactor augment(std::span<const SymbolicFactor* const> factors);

/// Entrywise evaluation at LP variable values.
MixedModeFactor evaluate(const SymbolicFactor& f, std::span<const double> values);

}  // namespace anonplan
