#include "anonplan/mixed_factor.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include "anonplan/error.hpp"
#include "anonplan/format.hpp"

namespace anonplan {

FlatFactor::FlatFactor(std::vector<ProperVar> s, std::vector<double> t) : scope(std::move(s)), table(std::move(t)) {
  std::size_t expected = 1;
  for (const auto& v : scope) expected *= static_cast<std::size_t>(v.cardinality);
  if (table.size() != expected) throw Error("flat factor table length does not match its scope");
}

std::size_t FlatFactor::index_of(const Assignment& a) const {
  std::size_t idx = 0;
  for (const auto& v : scope) {
    const int value = a.at(v.id);
    if (value >= v.cardinality) throw Error("value out of range for variable " + std::to_string(v.id));
    idx = idx * static_cast<std::size_t>(v.cardinality) + static_cast<std::size_t>(value);
  }
  return idx;
}

MixedModeFactor::MixedModeFactor() : table_{0.0} {}

MixedModeFactor::MixedModeFactor(FactorShape shape, std::vector<double> table)
    : shape_(std::move(shape)), table_(std::move(table)) {
  if (table_.size() != shape_.size()) throw Error("factor table length does not match its shape");
}

MixedModeFactor::MixedModeFactor(std::vector<ProperVar> proper, std::vector<CountScope> counters,
                                 std::vector<double> table)
    : MixedModeFactor(FactorShape(std::move(proper), std::move(counters)), std::move(table)) {}

MixedModeFactor MixedModeFactor::constant(double value) { return MixedModeFactor(FactorShape(), {value}); }

MixedModeFactor MixedModeFactor::from_flat(const FlatFactor& flat) {
  return MixedModeFactor(FactorShape(flat.scope, {}), flat.table);
}

MixedModeFactor MixedModeFactor::tabulate(
    std::vector<ProperVar> proper, std::vector<CountScope> counters,
    const std::function<double(std::span<const int>, std::span<const int>)>& fn) {
  FactorShape shape(std::move(proper), std::move(counters));
  const std::size_t np = shape.proper().size();
  std::vector<int> digits(shape.dims());
  std::vector<double> table(shape.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    shape.decode(i, digits);
    table[i] = fn(std::span<const int>(digits).first(np), std::span<const int>(digits).subspan(np));
  }
  return MixedModeFactor(std::move(shape), std::move(table));
}

double mmf_eval(const MixedModeFactor& f, const Assignment& a) {
  const std::size_t idx = f.shape().index_of(a);
  if (!f.valid(idx)) throw Error("internal: assignment indexed an inconsistent entry");
  return f[idx];
}

namespace {

template <class Op>
MixedModeFactor combine(std::span<const MixedModeFactor* const> factors, double identity, Op op, bool absorbed = false) {
  std::vector<const FactorShape*> shapes;
  shapes.reserve(factors.size());
  for (const auto* f : factors) shapes.push_back(&f->shape());
  FactorShape result = absorbed ? absorbed_merged_shape(shapes) : merged_shape(shapes);
  std::vector<IndexMap> maps;
  maps.reserve(factors.size());
  for (const auto* f : factors) maps.push_back(absorbed ? absorbed_embed(result, f->shape()) : embed(result, f->shape()));
  std::vector<double> table(result.size());
  const std::size_t n = factors.size();
  walk(result, maps, [&](std::size_t idx, const std::size_t* off) {
    double acc = identity;
    for (std::size_t m = 0; m < n; ++m) acc = op(acc, (*factors[m])[off[m]]);
    table[idx] = acc;
  });
  return MixedModeFactor(std::move(result), std::move(table));
}

}  // namespace

MixedModeFactor augment(const MixedModeFactor& g, const MixedModeFactor& h) {
  const MixedModeFactor* fs[] = {&g, &h};
  return augment(fs);
}

MixedModeFactor augment(std::span<const MixedModeFactor* const> factors) {
  return combine(factors, 0.0, [](double a, double b) { return a + b; });
}

MixedModeFactor augment_absorbed(std::span<const MixedModeFactor* const> factors) {
  return combine(factors, 0.0, [](double a, double b) { return a + b; }, true);
}

MixedModeFactor absorb(const MixedModeFactor& g) {
  const MixedModeFactor* fs[] = {&g};
  return combine(fs, 0.0, [](double a, double b) { return a + b; }, true);
}

MixedModeFactor multiply(const MixedModeFactor& g, const MixedModeFactor& h) {
  const MixedModeFactor* fs[] = {&g, &h};
  return multiply(fs);
}

MixedModeFactor multiply(std::span<const MixedModeFactor* const> factors) {
  return combine(factors, 1.0, [](double a, double b) { return a * b; });
}

MixedModeFactor scale(const MixedModeFactor& g, double factor) {
  std::vector<double> table(g.table().begin(), g.table().end());
  for (double& v : table) v *= factor;
  return MixedModeFactor(g.shape(), std::move(table));
}

MixedModeFactor reduce_max(const MixedModeFactor& g, VarId v, std::vector<std::uint8_t>* best) {
  const VarId vars[] = {v};
  Removal rm = plan_removal(g.shape(), vars);
  const std::size_t unit = rm.unit[0];
  const int card = rm.cardinality[0];
  const FactorShape& rs = rm.result;
  std::vector<double> table(rs.size());
  if (best) best->assign(rs.size(), 0);
  const IndexMap maps[] = {rm.map};
  walk(rs, maps, [&](std::size_t r, const std::size_t* off) {
    bool have = false;
    double value = 0.0;
    int arg = 0;
    for (int b = 0; b < card; ++b) {
      const std::size_t idx = off[0] + static_cast<std::size_t>(b) * unit;
      if (!g.valid(idx)) continue;
      if (!have || g[idx] > value) {
        value = g[idx];
        arg = b;
        have = true;
      }
    }
    if (!have) {
      if (rs.valid(r)) throw Error("internal: valid reduce entry without a valid branch");
      value = g[off[0]];
      for (int b = 1; b < card; ++b) value = std::max(value, g[off[0] + static_cast<std::size_t>(b) * unit]);
    }
    table[r] = value;
    if (best) (*best)[r] = static_cast<std::uint8_t>(arg);
  });
  return MixedModeFactor(std::move(rm.result), std::move(table));
}

MixedModeFactor sum_out(const MixedModeFactor& g, VarId v) {
  const VarId vars[] = {v};
  Removal rm = plan_removal(g.shape(), vars);
  const std::size_t unit = rm.unit[0];
  const int card = rm.cardinality[0];
  std::vector<double> table(rm.result.size());
  const IndexMap maps[] = {rm.map};
  walk(rm.result, maps, [&](std::size_t r, const std::size_t* off) {
    double acc = 0.0;
    for (int b = 0; b < card; ++b) acc += g[off[0] + static_cast<std::size_t>(b) * unit];
    table[r] = acc;
  });
  return MixedModeFactor(std::move(rm.result), std::move(table));
}

MixedModeFactor condition(const MixedModeFactor& g, VarId v, int value) {
  Assignment a;
  a.set(v, value);
  if (!g.mentions(v)) throw Error("variable not in factor: " + std::to_string(v));
  return condition(g, a);
}

MixedModeFactor condition(const MixedModeFactor& g, const Assignment& a) {
  std::vector<VarId> vars;
  for (VarId id : g.variables())
    if (a.contains(id)) vars.push_back(id);
  if (vars.empty()) return g;
  Removal rm = plan_removal(g.shape(), vars);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const int value = a.at(vars[i]);
    if (value >= rm.cardinality[i]) throw Error("value out of range for variable " + std::to_string(vars[i]));
    offset += static_cast<std::size_t>(value) * rm.unit[i];
  }
  rm.map.base += offset;
  std::vector<double> table(rm.result.size());
  const IndexMap maps[] = {rm.map};
  walk(rm.result, maps, [&](std::size_t r, const std::size_t* off) { table[r] = g[off[0]]; });
  return MixedModeFactor(std::move(rm.result), std::move(table));
}

FlatFactor flatten(const MixedModeFactor& g, std::size_t max_variables) {
  const auto ids = g.variables();
  if (ids.size() > max_variables) throw Error("flatten too large");
  std::vector<ProperVar> scope;
  IndexMap map;
  for (VarId id : ids) {
    scope.push_back({id, g.shape().cardinality_of(id)});
    map.step.push_back(g.shape().unit(id));
  }
  FactorShape flat_shape(scope, {});
  std::vector<double> table(flat_shape.size());
  const IndexMap maps[] = {map};
  walk(flat_shape, maps, [&](std::size_t idx, const std::size_t* off) { table[idx] = g[off[0]]; });
  return FlatFactor(std::move(scope), std::move(table));
}

MixedModeFactor shatter(const MixedModeFactor& g) {
  const FactorShape& s = g.shape();
  const std::size_t np = s.proper().size();
  std::map<VarId, std::vector<std::size_t>> membership;
  for (std::size_t i = 0; i < s.counters().size(); ++i)
    for (VarId m : s.counters()[i].members())
      if (!s.proper_position(m)) membership[m].push_back(i);

  std::map<std::vector<std::size_t>, std::vector<VarId>> atoms;
  for (const auto& [id, sig] : membership) atoms[sig].push_back(id);

  std::vector<std::pair<CountScope, std::size_t>> parts;  // atom scope, source step
  for (auto& [sig, members] : atoms) {
    std::size_t step = 0;
    for (std::size_t i : sig) step += s.stride(np + i);
    parts.emplace_back(CountScope(members), step);
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<CountScope> counters;
  IndexMap map;
  for (const auto& p : s.proper()) map.step.push_back(s.unit(p.id));
  for (auto& [scope, step] : parts) {
    counters.push_back(scope);
    map.step.push_back(step);
  }
  FactorShape result(std::vector<ProperVar>(s.proper().begin(), s.proper().end()), std::move(counters));
  std::vector<double> table(result.size());
  const IndexMap maps[] = {map};
  walk(result, maps, [&](std::size_t idx, const std::size_t* off) { table[idx] = g[off[0]]; });
  return MixedModeFactor(std::move(result), std::move(table));
}

void dump(std::ostream& os, const MixedModeFactor& f) {
  const FactorShape& s = f.shape();
  os << "# proper:";
  for (const auto& p : s.proper()) os << ' ' << p.id;
  os << " | counters:";
  for (const auto& c : s.counters()) {
    os << " {";
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c.members()[i];
    os << '}';
  }
  os << '\n';
  const std::size_t np = s.proper().size();
  std::vector<int> digits(s.dims());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    s.decode(idx, digits);
    if (!f.valid(idx)) os << "! ";
    for (std::size_t d = 0; d < np; ++d) os << (d ? " " : "") << digits[d];
    os << " |";
    for (std::size_t d = np; d < digits.size(); ++d) os << ' ' << digits[d];
    os << " | " << format_double(f[idx]) << '\n';
  }
}

std::string dump(const MixedModeFactor& f) {
  std::ostringstream os;
  dump(os, f);
  return os.str();
}

}  // namespace anonplan
