#include "anonplan/fmmdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anonplan/error.hpp"

namespace anonplan {

void FactoredModel::validate() const {
  if (!(discount >= 0.0 && discount < 1.0)) throw Error("discount must lie in [0, 1)");
  if (next_state_vars.size() != state_vars.size()) throw Error("every state variable needs a next-state pair");
  if (cpds.size() != next_state_vars.size()) throw Error("every next-state variable needs a CPD");
  for (VarId id : state_vars)
    if (variables[id].kind != VarKind::state) throw Error("variable " + variables[id].name + " is not a state variable");
  for (VarId id : action_vars)
    if (variables[id].kind != VarKind::action) throw Error("variable " + variables[id].name + " is not an action variable");
  for (std::size_t i = 0; i < next_state_vars.size(); ++i) {
    const VarId child = next_state_vars[i];
    if (variables[child].kind != VarKind::next_state) throw Error("CPD child must be a next-state variable");
    if (variables[child].cardinality != variables[state_vars[i]].cardinality)
      throw Error("next-state variable cardinality differs from its state variable");
    const auto& cpd = cpds[i];
    if (!cpd.shape().proper_position(child)) throw Error("CPD " + std::to_string(i) + " lacks its child as proper variable");
    for (VarId id : cpd.variables()) {
      if (id == child) continue;
      if (variables[id].kind == VarKind::next_state) throw Error("CPD parents must be current state or action variables");
    }
    for (const auto& c : cpd.counters())
      if (c.contains(child)) throw Error("CPD child cannot be a count variable");
    const MixedModeFactor total = sum_out(cpd, child);
    for (std::size_t e = 0; e < total.size(); ++e)
      if (total.valid(e) && std::abs(total[e] - 1.0) > 1e-9)
        throw Error("CPD for " + variables[child].name + " does not normalize");
  }
  for (const auto& r : rewards)
    for (VarId id : r.variables())
      if (variables[id].kind == VarKind::next_state) throw Error("reward scopes must use current state and action variables");
}

std::optional<std::size_t> FactoredModel::state_index(VarId id) const {
  const auto it = std::find(state_vars.begin(), state_vars.end(), id);
  if (it == state_vars.end()) return std::nullopt;
  return static_cast<std::size_t>(it - state_vars.begin());
}

VarId FactoredModel::next_of(VarId state) const {
  const auto idx = state_index(state);
  if (!idx) throw Error("basis scope must contain only state variables");
  return next_state_vars[*idx];
}

double FactoredModel::reward(const Assignment& a) const {
  double total = 0.0;
  for (const auto& r : rewards) total += mmf_eval(r, a);
  return total;
}

double FactoredModel::transition_probability(const Assignment& current, const Assignment& next) const {
  Assignment joint = current;
  for (std::size_t i = 0; i < next_state_vars.size(); ++i)
    joint.set(next_state_vars[i], next.at(state_vars[i]));
  double p = 1.0;
  for (const auto& cpd : cpds) p *= mmf_eval(cpd, joint);
  return p;
}

std::vector<BasisFunction> indicator_basis(const FactoredModel& m) {
  std::vector<BasisFunction> basis;
  for (std::size_t i = 0; i < m.state_vars.size(); ++i) {
    const ProperVar v{m.state_vars[i], 2};
    basis.push_back({static_cast<int>(2 * i), FlatFactor({v}, {0.0, 1.0})});
    basis.push_back({static_cast<int>(2 * i + 1), FlatFactor({v}, {1.0, 0.0})});
  }
  return basis;
}

BackProjection backproject(const BasisFunction& h, const FactoredModel& m) {
  std::vector<ProperVar> next_scope;
  std::vector<std::size_t> needed;
  for (const auto& v : h.factor.scope) {
    const VarId next = m.next_of(v.id);
    next_scope.push_back({next, v.cardinality});
    needed.push_back(*m.state_index(v.id));
  }
  std::vector<MixedModeFactor> parts;
  parts.emplace_back(FactorShape(next_scope, {}), h.factor.table);
  for (std::size_t i : needed) parts.push_back(m.cpds[i]);
  std::vector<const MixedModeFactor*> ptrs;
  for (const auto& p : parts) ptrs.push_back(&p);
  MixedModeFactor g = multiply(ptrs);

  std::vector<VarId> children;
  for (const auto& v : next_scope) children.push_back(v.id);
  std::sort(children.begin(), children.end());
  for (VarId c : children) g = sum_out(g, c);
  return {h.id, std::move(g)};
}

std::vector<BackProjection> backproject_all(std::span<const BasisFunction> basis, const FactoredModel& m) {
  std::vector<BackProjection> out;
  out.reserve(basis.size());
  for (const auto& h : basis) out.push_back(backproject(h, m));
  return out;
}

double QTermSet::eval(const Assignment& xa) const {
  double total = 0.0;
  for (const auto& t : terms) total += mmf_eval(t, xa);
  return total;
}

QTermSet q_terms(const FactoredModel& m, std::span<const BackProjection> backprojections,
                 std::span<const double> weights) {
  if (weights.size() != backprojections.size()) throw Error("weight vector length does not match the basis");
  QTermSet q;
  q.terms = m.rewards;
  for (std::size_t j = 0; j < weights.size(); ++j)
    q.terms.push_back(scale(backprojections[j].g, m.discount * weights[j]));
  return q;
}

QTermSet q_terms(const FactoredModel& m, std::span<const BasisFunction> basis, std::span<const double> weights) {
  if (weights.size() != basis.size()) throw Error("weight vector length does not match the basis");
  const auto bps = backproject_all(basis, m);
  return q_terms(m, bps, weights);
}

Assignment greedy_action(const FactoredModel& m, const QTermSet& terms, const Assignment& x) {
  Assignment state;
  for (VarId s : m.state_vars) state.set(s, x.at(s));
  FactorSet fs;
  for (const auto& t : terms.terms) {
    MixedModeFactor local = condition(t, state);
    if (local.variables().empty()) continue;  // constants do not affect the argmax
    fs.add(std::move(local));
  }
  const EliminationOrder order = greedy_order(fs, m.action_vars);
  ArgmaxResult best = eliminate_argmax(std::move(fs), order);
  Assignment action;
  for (VarId a : m.action_vars) action.set(a, best.assignment.get(a).value_or(0));
  return action;
}

Assignment greedy_action(const FactoredModel& m, std::span<const BasisFunction> basis,
                         std::span<const double> weights, const Assignment& x) {
  return greedy_action(m, q_terms(m, basis, weights), x);
}

double value_at(std::span<const BasisFunction> basis, std::span<const double> weights, const Assignment& x) {
  if (weights.size() != basis.size()) throw Error("weight vector length does not match the basis");
  double v = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) v += weights[j] * basis[j].eval(x);
  return v;
}

}  // namespace anonplan
