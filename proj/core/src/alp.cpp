#include "anonplan/alp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "anonplan/error.hpp"
#include "anonplan/format.hpp"
#include "anonplan/random.hpp"

namespace anonplan {

std::string to_string(AlpMethod m) {
  switch (m) {
    case AlpMethod::exhaustive: return "exhaustive";
    case AlpMethod::flat: return "alp";
    case AlpMethod::rr: return "rr-alp";
  }
  return "unknown";
}

AlpMethod alp_method_from_string(const std::string& s) {
  if (s == "exhaustive") return AlpMethod::exhaustive;
  if (s == "alp") return AlpMethod::flat;
  if (s == "rr-alp") return AlpMethod::rr;
  throw Error("unknown method: " + s);
}

std::vector<double> objective_coefficients(std::span<const BasisFunction> basis) {
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& h : basis) {
    const auto& t = h.factor.table;
    out.push_back(std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size()));
  }
  return out;
}

std::vector<double> tiebreak_coefficients(std::span<const BasisFunction> basis) {
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& h : basis) {
    std::vector<std::vector<double>> marginals;
    for (const auto& v : h.factor.scope) {
      Rng rng = Rng::stream(0x7469656272656b, v.id);
      std::vector<double> q(static_cast<std::size_t>(v.cardinality));
      double total = 0.0;
      for (auto& p : q) total += p = 0.5 + rng.uniform();
      for (auto& p : q) p /= total;
      marginals.push_back(std::move(q));
    }
    double expected = 0.0;
    for (std::size_t idx = 0; idx < h.factor.table.size(); ++idx) {
      double prob = 1.0;
      std::size_t rest = idx;
      for (std::size_t d = h.factor.scope.size(); d-- > 0;) {
        const auto card = static_cast<std::size_t>(h.factor.scope[d].cardinality);
        prob *= marginals[d][rest % card];
        rest /= card;
      }
      expected += prob * h.factor.table[idx];
    }
    out.push_back(expected);
  }
  return out;
}

std::vector<MixedModeFactor> basis_coefficients(const FactoredModel& m, std::span<const BasisFunction> basis,
                                                std::span<const BackProjection> backprojections) {
  if (basis.size() != backprojections.size()) throw Error("back-projection count does not match the basis");
  std::vector<MixedModeFactor> out;
  out.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const MixedModeFactor g = scale(backprojections[i].g, m.discount);
    const MixedModeFactor h = scale(MixedModeFactor::from_flat(basis[i].factor), -1.0);
    out.push_back(augment(g, h));
  }
  return out;
}

std::vector<SymbolicFactor> constraint_terms(const FactoredModel& m, std::span<const BasisFunction> basis,
                                             std::span<const BackProjection> backprojections,
                                             std::span<const LpVar> weight_vars) {
  if (weight_vars.size() != basis.size()) throw Error("weight variable count does not match the basis");
  std::vector<SymbolicFactor> terms;
  for (const auto& r : m.rewards) terms.push_back(SymbolicFactor::numeric(r));
  const auto coefficients = basis_coefficients(m, basis, backprojections);
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    terms.push_back(SymbolicFactor::weighted(coefficients[i], weight_vars[i]));
  return terms;
}

namespace {

/// For each digit of the reduced layout, the digits of the augmented layout it drives;
/// plus the augmented digits driven by the eliminated variable.
struct DigitGroups {
  std::vector<std::vector<std::size_t>> of_result;
  std::vector<std::size_t> of_eliminated;
};

DigitGroups digit_groups(const FactorShape& augmented, const FactorShape& result, VarId v) {
  DigitGroups g;
  const std::size_t ap = augmented.proper().size();
  const std::size_t rp = result.proper().size();
  g.of_result.resize(result.dims());
  for (std::size_t d = 0; d < rp; ++d) g.of_result[d].push_back(*augmented.proper_position(result.proper()[d].id));
  if (auto pos = augmented.proper_position(v)) g.of_eliminated.push_back(*pos);
  for (std::size_t c = 0; c < augmented.counters().size(); ++c) {
    const CountScope& scope = augmented.counters()[c];
    if (scope.contains(v)) g.of_eliminated.push_back(ap + c);
    std::vector<VarId> rest;
    for (VarId id : scope.members())
      if (id != v) rest.push_back(id);
    if (rest.empty()) continue;
    const CountScope reduced(std::move(rest));
    const auto& rc = result.counters();
    const auto it = std::find(rc.begin(), rc.end(), reduced);
    if (it == rc.end()) throw Error("internal: reduced counter missing from result layout");
    g.of_result[rp + static_cast<std::size_t>(it - rc.begin())].push_back(ap + c);
  }
  return g;
}

std::string aux_name(std::size_t stage, std::size_t entry) {
  return "u_" + std::to_string(stage) + "_" + std::to_string(entry);
}

}  // namespace

void generate_constraints(std::vector<SymbolicFactor> terms, const EliminationOrder& order, LinearProgramModel& lp,
                          const EliminationLimits& limits) {
  std::vector<std::optional<SymbolicFactor>> live;
  for (auto& t : terms) live.emplace_back(std::move(t));
  terms.clear();

  std::vector<LpTerm> scratch;
  for (std::size_t stage = 0; stage < order.size(); ++stage) {
    const VarId v = order[stage];
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < live.size(); ++i)
      if (live[i] && live[i]->shape().mentions(v)) positions.push_back(i);
    if (positions.empty()) continue;

    std::vector<ScopeSketch> sketches;
    for (std::size_t pos : positions) sketches.push_back(ScopeSketch::of(live[pos]->shape()));
    std::vector<const ScopeSketch*> sketch_ptrs;
    for (const auto& s : sketches) sketch_ptrs.push_back(&s);
    const double predicted = merged_sketch(sketch_ptrs).size();
    if (predicted > static_cast<double>(limits.max_entries))
      throw GuardExceeded("induced width too large: intermediate of " + format_double(predicted) + " entries");

    std::vector<SymbolicFactor> parts;
    for (std::size_t pos : positions) {
      parts.push_back(std::move(*live[pos]));
      live[pos].reset();
    }
    std::vector<const FactorShape*> shapes;
    for (const auto& p : parts) shapes.push_back(&p.shape());
    const FactorShape augmented = absorbed_merged_shape(shapes);
    const VarId removed[] = {v};
    Removal rm = plan_removal(augmented, removed);
    const FactorShape& result = rm.result;
    const DigitGroups groups = digit_groups(augmented, result, v);

    std::vector<IndexMap> maps;
    std::vector<std::size_t> branch_unit;
    for (const auto& p : parts) {
      const IndexMap e = absorbed_embed(augmented, p.shape());
      IndexMap m;
      for (const auto& group : groups.of_result) {
        std::size_t step = 0;
        for (std::size_t d : group) step += e.step[d];
        m.step.push_back(step);
      }
      std::size_t unit = 0;
      for (std::size_t d : groups.of_eliminated) unit += e.step[d];
      maps.push_back(std::move(m));
      branch_unit.push_back(unit);
    }
    maps.push_back(rm.map);

    const int card = rm.cardinality[0];
    const std::size_t unit = rm.unit[0];
    const std::size_t np = parts.size();
    StageInfo info{v, augmented.size(), result.size(), 0, 0};
    std::vector<double> constants(result.size(), 0.0);
    std::vector<std::size_t> offsets{0};
    offsets.reserve(result.size() + 1);
    std::vector<LpTerm> reduced_terms;
    LinearExpr expr;
    walk(result, maps, [&](std::size_t r, const std::size_t* off) {
      if (result.valid(r)) {
        const LpVar u = lp.add_variable(aux_name(stage, r), LpVarKind::auxiliary);
        ++info.auxiliaries;
        for (int b = 0; b < card; ++b) {
          if (!augmented.valid(off[np] + static_cast<std::size_t>(b) * unit)) continue;
          expr.constant = 0.0;
          expr.terms.clear();
          for (std::size_t c = 0; c < np; ++c) {
            const std::size_t idx = off[c] + static_cast<std::size_t>(b) * branch_unit[c];
            expr.constant += parts[c].constant(idx);
            const auto t = parts[c].terms(idx);
            expr.terms.insert(expr.terms.end(), t.begin(), t.end());
          }
          lp.add_lower_bound_row(u, expr);
          ++info.constraints;
        }
        reduced_terms.push_back({u, 1.0});
      }
      offsets.push_back(reduced_terms.size());
    });
    lp.stages.push_back(info);
    live.emplace_back(SymbolicFactor(std::move(rm.result), std::move(constants), std::move(offsets),
                                     std::move(reduced_terms)));
  }

  LinearExpr total;
  for (const auto& f : live) {
    if (!f) continue;
    if (!f->shape().variables().empty()) throw Error("uneliminated variables remain");
    total.add(f->entry(0));
  }
  total.normalize();
  lp.add_constraint(LinearExpr(0.0), total);
}

namespace {

double space_size(const FactorShape& shape) {
  double s = 1.0;
  for (VarId id : shape.variables()) s *= shape.cardinality_of(id);
  return s;
}

MixedModeFactor flat_copy(const MixedModeFactor& f, const EliminationLimits& limits) {
  if (space_size(f.shape()) > static_cast<double>(limits.max_entries))
    throw GuardExceeded("induced width too large: flattened term of " + format_double(space_size(f.shape())) +
                        " entries");
  return MixedModeFactor::from_flat(flatten(f, 64));
}

void add_exhaustive_rows(const FactoredModel& m, std::span<const MixedModeFactor> coefficients,
                         std::span<const LpVar> weight_vars, LinearProgramModel& lp, const EliminationLimits& limits) {
  std::vector<VarId> vars = m.state_vars;
  vars.insert(vars.end(), m.action_vars.begin(), m.action_vars.end());
  double joint = 1.0;
  for (VarId id : vars) joint *= m.variables.cardinality(id);
  if (joint > static_cast<double>(limits.max_entries))
    throw GuardExceeded("joint state-action space of " + format_double(joint) + " entries exceeds the budget");

  Assignment a;
  for (VarId id : vars) a.set(id, 0);
  std::vector<LpTerm> terms;
  while (true) {
    terms.clear();
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      const double c = mmf_eval(coefficients[i], a);
      if (c != 0.0) terms.push_back({weight_vars[i], -c});
    }
    normalize_terms(terms);
    lp.add_row(terms, m.reward(a));
    std::size_t d = vars.size();
    while (d > 0) {
      --d;
      const int next = a.at(vars[d]) + 1;
      if (next < m.variables.cardinality(vars[d])) {
        a.set(vars[d], next);
        break;
      }
      a.set(vars[d], 0);
      if (d == 0) return;
    }
    if (vars.empty()) return;
  }
}

}  // namespace

AlpProblem build_alp(const FactoredModel& m, std::span<const BasisFunction> basis, AlpMethod method,
                     const EliminationLimits& limits) {
  const auto start = std::chrono::steady_clock::now();
  AlpProblem problem;
  problem.method = method;
  LinearProgramModel& lp = problem.lp;
  for (const auto& h : basis) problem.weight_vars.push_back(lp.add_variable("w_" + std::to_string(h.id), LpVarKind::weight));
  const auto alpha = objective_coefficients(basis);
  LinearExpr objective;
  for (std::size_t i = 0; i < basis.size(); ++i) objective.add(problem.weight_vars[i], alpha[i]);
  lp.set_objective(objective);
  const auto beta = tiebreak_coefficients(basis);
  LinearExpr tiebreak;
  for (std::size_t i = 0; i < basis.size(); ++i) tiebreak.add(problem.weight_vars[i], beta[i]);
  lp.set_tiebreak(tiebreak);

  const auto backprojections = backproject_all(basis, m);
  if (method == AlpMethod::exhaustive) {
    const auto coefficients = basis_coefficients(m, basis, backprojections);
    add_exhaustive_rows(m, coefficients, problem.weight_vars, lp, limits);
  } else {
    std::vector<SymbolicFactor> terms;
    if (method == AlpMethod::rr) {
      terms = constraint_terms(m, basis, backprojections, problem.weight_vars);
    } else {
      for (const auto& r : m.rewards) terms.push_back(SymbolicFactor::numeric(flat_copy(r, limits)));
      const auto coefficients = basis_coefficients(m, basis, backprojections);
      for (std::size_t i = 0; i < coefficients.size(); ++i)
        terms.push_back(SymbolicFactor::weighted(flat_copy(coefficients[i], limits), problem.weight_vars[i]));
    }
    std::vector<ScopeSketch> sketches;
    for (const auto& t : terms) sketches.push_back(ScopeSketch::of(t.shape()));
    std::vector<VarId> candidates = m.state_vars;
    candidates.insert(candidates.end(), m.action_vars.begin(), m.action_vars.end());
    problem.order = greedy_order(std::move(sketches), candidates);
    generate_constraints(std::move(terms), problem.order, lp, limits);
  }
  problem.generation_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return problem;
}

AlpSolution solve_alp(const AlpProblem& problem, const LpSolver& solver) {
  AlpSolution out;
  out.result = solver.solve(problem.lp);
  for (LpVar w : problem.weight_vars) out.weights.push_back(out.result.values.empty() ? 0.0 : out.result.values[w]);
  return out;
}

}  // namespace anonplan
