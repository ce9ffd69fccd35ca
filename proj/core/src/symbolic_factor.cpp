#include "anonplan/symbolic_factor.hpp"

#include "anonplan/error.hpp"

namespace anonplan {

SymbolicFactor::SymbolicFactor() : constants_{0.0}, offsets_{0, 0} {}

SymbolicFactor::SymbolicFactor(FactorShape shape, std::vector<double> constants, std::vector<std::size_t> offsets,
                               std::vector<LpTerm> terms)
    : shape_(std::move(shape)), constants_(std::move(constants)), offsets_(std::move(offsets)), terms_(std::move(terms)) {
  if (constants_.size() != shape_.size() || offsets_.size() != constants_.size() + 1 ||
      offsets_.back() != terms_.size())
    throw Error("symbolic factor arrays do not match its shape");
}

SymbolicFactor SymbolicFactor::numeric(const MixedModeFactor& f) {
  std::vector<double> constants(f.table().begin(), f.table().end());
  std::vector<std::size_t> offsets(f.size() + 1, 0);
  return SymbolicFactor(f.shape(), std::move(constants), std::move(offsets), {});
}

SymbolicFactor SymbolicFactor::weighted(const MixedModeFactor& f, LpVar w) {
  std::vector<double> constants(f.size(), 0.0);
  std::vector<std::size_t> offsets;
  offsets.reserve(f.size() + 1);
  offsets.push_back(0);
  std::vector<LpTerm> terms;
  terms.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] != 0.0) terms.push_back({w, f[i]});
    offsets.push_back(terms.size());
  }
  return SymbolicFactor(f.shape(), std::move(constants), std::move(offsets), std::move(terms));
}

LinearExpr SymbolicFactor::entry(std::size_t i) const {
  LinearExpr e(constants_[i]);
  const auto t = terms(i);
  e.terms.assign(t.begin(), t.end());
  return e;
}

SymbolicFactor augment(std::span<const SymbolicFactor* const> factors) {
  std::vector<const FactorShape*> shapes;
  for (const auto* f : factors) shapes.push_back(&f->shape());
  FactorShape result = merged_shape(shapes);
  std::vector<IndexMap> maps;
  for (const auto* f : factors) maps.push_back(embed(result, f->shape()));
  std::vector<double> constants(result.size());
  std::vector<std::size_t> offsets{0};
  offsets.reserve(result.size() + 1);
  std::vector<LpTerm> terms;
  std::vector<LpTerm> scratch;
  walk(result, maps, [&](std::size_t idx, const std::size_t* off) {
    double c = 0.0;
    scratch.clear();
    for (std::size_t m = 0; m < factors.size(); ++m) {
      c += factors[m]->constant(off[m]);
      const auto t = factors[m]->terms(off[m]);
      scratch.insert(scratch.end(), t.begin(), t.end());
    }
    normalize_terms(scratch);
    constants[idx] = c;
    terms.insert(terms.end(), scratch.begin(), scratch.end());
    offsets.push_back(terms.size());
  });
  return SymbolicFactor(std::move(result), std::move(constants), std::move(offsets), std::move(terms));
}

MixedModeFactor evaluate(const SymbolicFactor& f, std::span<const double> values) {
  std::vector<double> table(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double v = f.constant(i);
    for (const auto& t : f.terms(i)) v += t.coef * values[t.var];
    table[i] = v;
  }
  return MixedModeFactor(f.shape(), std::move(table));
}

}  // namespace anonplan
