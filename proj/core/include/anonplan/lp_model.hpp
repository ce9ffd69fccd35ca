#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonplan/linear_expr.hpp"
#include "anonplan/variables.hpp"

namespace anonplan {

enum class LpVarKind { weight, auxiliary };

/// All LP variables are free (unbounded in both directions).
struct LpVariable {
  std::string name;
  LpVarKind kind = LpVarKind::weight;
};

/// Bookkeeping for one elimination stage of constraint generation.
struct StageInfo {
  VarId variable = 0;
  std::size_t augmented_entries = 0;
  std::size_t reduced_entries = 0;
  std::size_t auxiliaries = 0;
  std::size_t constraints = 0;
};

/// Read-only view of a stored row: sum terms >= bound.
struct RowView {
  std::span<const LpTerm> terms;
  double bound = 0.0;
};

/// Minimization LP over free variables with ">=" rows.
///
/// Rows are accepted as `lhs >= rhs` and stored normalized as
/// sum (lhs - rhs) terms >= rhs.constant - lhs.constant.
class LinearProgramModel {
 public:
  LpVar add_variable(std::string name, LpVarKind kind);
  void set_objective(LinearExpr objective);
  /// Secondary objective minimized over the optimal face of the primary one.
  void set_tiebreak(LinearExpr tiebreak);
  void add_constraint(const LinearExpr& lhs, const LinearExpr& rhs);
  /// Fast path for `var >= rhs`.
  void add_lower_bound_row(LpVar var, const LinearExpr& rhs);
  /// Appends an already-normalized row.
  void add_row(std::vector<LpTerm> terms, double bound);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return bounds_.size(); }
  std::size_t num_nonzeros() const { return terms_.size(); }
  const LpVariable& variable(LpVar v) const { return variables_.at(v); }
  const std::vector<LpVariable>& variables() const { return variables_; }
  const LinearExpr& objective() const { return objective_; }
  const std::optional<LinearExpr>& tiebreak() const { return tiebreak_; }
  RowView row(std::size_t i) const;

  std::size_t count(LpVarKind kind) const;
  /// Largest violation of any row at `values` (0 when feasible).
  double max_violation(std::span<const double> values) const;
  /// Throws if a row or the objective references an undeclared variable.
  void validate() const;

  std::vector<StageInfo> stages;

 private:
  std::vector<LpVariable> variables_;
  LinearExpr objective_;
  std::optional<LinearExpr> tiebreak_;
  std::vector<std::size_t> offsets_{0};
  std::vector<LpTerm> terms_;
  std::vector<double> bounds_;
};

}  // namespace anonplan
