#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace anonplan {

using LpVar = std::uint32_t;

struct LpTerm {
  LpVar var = 0;
  double coef = 0.0;

  friend bool operator==(const LpTerm&, const LpTerm&) = default;
};

/// constant + sum coef * var. Normalized form: terms sorted by var, merged, no zeros.
struct LinearExpr {
  double constant = 0.0;
  std::vector<LpTerm> terms;

  LinearExpr() = default;
  explicit LinearExpr(double c) : constant(c) {}
  static LinearExpr variable(LpVar v, double coef = 1.0);

  LinearExpr& add(LpVar v, double coef);
  LinearExpr& add(const LinearExpr& other, double factor = 1.0);
  LinearExpr& normalize();
  double evaluate(std::span<const double> values) const;
  double coefficient(LpVar v) const;

  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

/// Sorts by variable, merges duplicates and drops zero coefficients in place.
void normalize_terms(std::vector<LpTerm>& terms);

}  // namespace anonplan
