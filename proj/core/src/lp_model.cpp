#include "anonplan/lp_model.hpp"

#include <algorithm>

#include "anonplan/error.hpp"

namespace anonplan {

LpVar LinearProgramModel::add_variable(std::string name, LpVarKind kind) {
  variables_.push_back({std::move(name), kind});
  return static_cast<LpVar>(variables_.size() - 1);
}

void LinearProgramModel::set_objective(LinearExpr objective) {
  objective_ = std::move(objective);
  objective_.normalize();
}

void LinearProgramModel::set_tiebreak(LinearExpr tiebreak) {
  tiebreak_ = std::move(tiebreak);
  tiebreak_->normalize();
}

void LinearProgramModel::add_constraint(const LinearExpr& lhs, const LinearExpr& rhs) {
  std::vector<LpTerm> terms = lhs.terms;
  for (const auto& t : rhs.terms) terms.push_back({t.var, -t.coef});
  normalize_terms(terms);
  add_row(std::move(terms), rhs.constant - lhs.constant);
}

void LinearProgramModel::add_lower_bound_row(LpVar var, const LinearExpr& rhs) {
  std::vector<LpTerm> terms;
  terms.reserve(rhs.terms.size() + 1);
  terms.push_back({var, 1.0});
  for (const auto& t : rhs.terms) terms.push_back({t.var, -t.coef});
  normalize_terms(terms);
  add_row(std::move(terms), rhs.constant);
}

void LinearProgramModel::add_row(std::vector<LpTerm> terms, double bound) {
  terms_.insert(terms_.end(), terms.begin(), terms.end());
  offsets_.push_back(terms_.size());
  bounds_.push_back(bound);
}

RowView LinearProgramModel::row(std::size_t i) const {
  return {std::span<const LpTerm>(terms_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]), bounds_[i]};
}

std::size_t LinearProgramModel::count(LpVarKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(), [kind](const LpVariable& v) { return v.kind == kind; }));
}

double LinearProgramModel::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const RowView r = row(i);
    double lhs = 0.0;
    for (const auto& t : r.terms) lhs += t.coef * values[t.var];
    worst = std::max(worst, r.bound - lhs);
  }
  return worst;
}

void LinearProgramModel::validate() const {
  for (const auto& t : objective_.terms)
    if (t.var >= variables_.size()) throw Error("objective references an undeclared LP variable");
  if (tiebreak_)
    for (const auto& t : tiebreak_->terms)
      if (t.var >= variables_.size()) throw Error("tie-break objective references an undeclared LP variable");
  for (const auto& t : terms_)
    if (t.var >= variables_.size()) throw Error("constraint references an undeclared LP variable");
}

}  // namespace anonplan
