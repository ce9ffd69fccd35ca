#include "anonplan/linear_expr.hpp"

#include <algorithm>

namespace anonplan {

LinearExpr LinearExpr::variable(LpVar v, double coef) {
  LinearExpr e;
  if (coef != 0.0) e.terms.push_back({v, coef});
  return e;
}

LinearExpr& LinearExpr::add(LpVar v, double coef) {
  terms.push_back({v, coef});
  return *this;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, double factor) {
  constant += factor * other.constant;
  for (const auto& t : other.terms) terms.push_back({t.var, factor * t.coef});
  return *this;
}

LinearExpr& LinearExpr::normalize() {
  normalize_terms(terms);
  return *this;
}

double LinearExpr::evaluate(std::span<const double> values) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * values[t.var];
  return v;
}

double LinearExpr::coefficient(LpVar v) const {
  double c = 0.0;
  for (const auto& t : terms)
    if (t.var == v) c += t.coef;
  return c;
}

void normalize_terms(std::vector<LpTerm>& terms) {
  if (terms.size() > 1)
    std::sort(terms.begin(), terms.end(), [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    LpTerm acc = terms[i++];
    while (i < terms.size() && terms[i].var == acc.var) acc.coef += terms[i++].coef;
    if (acc.coef != 0.0) terms[out++] = acc;
  }
  terms.resize(out);
}

}  // namespace anonplan
