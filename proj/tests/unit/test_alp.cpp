#include <doctest.h>

#include "anonplan/alp.hpp"
#include "anonplan/epidemics.hpp"
#include "anonplan/error.hpp"
#include "anonplan/lp_solver.hpp"
#include "oracles.hpp"

using namespace anonplan;

namespace {

struct Solved {
  AlpProblem problem;
  AlpSolution solution;
};

Solved run(const FactoredModel& m, std::span<const BasisFunction> basis, AlpMethod method) {
  Solved s{build_alp(m, basis, method), {}};
  s.solution = solve_alp(s.problem, ReferenceSolver());
  return s;
}

std::vector<ProperVar> state_scope(const FactoredModel& m) {
  std::vector<ProperVar> v;
  for (VarId id : m.state_vars) v.push_back({id, 2});
  return v;
}

/// Largest |V_a(x) - V_b(x)| over all states.
double value_gap(const FactoredModel& m, std::span<const BasisFunction> basis, std::span<const double> a,
                 std::span<const double> b) {
  double gap = 0.0;
  oracle::for_each_assignment(state_scope(m), [&](const Assignment& x) {
    gap = std::max(gap, std::abs(value_at(basis, a, x) - value_at(basis, b, x)));
  });
  return gap;
}

}  // namespace

TEST_SUITE("alp") {
  TEST_CASE("objective coefficients are basis means") {
    const std::vector<BasisFunction> basis{{0, FlatFactor({{0, 2}}, {0.0, 1.0})},
                                           {1, FlatFactor({}, {1.0})},
                                           {2, FlatFactor({{0, 2}, {1, 2}}, {0.0, 1.0, 2.0, 3.0})}};
    const auto c = objective_coefficients(basis);
    CHECK(c == std::vector<double>{0.5, 1.0, 1.5});
  }

  TEST_CASE("method names") {
    CHECK(to_string(AlpMethod::rr) == "rr-alp");
    CHECK(to_string(AlpMethod::flat) == "alp");
    CHECK(to_string(AlpMethod::exhaustive) == "exhaustive");
    for (auto m : {AlpMethod::rr, AlpMethod::flat, AlpMethod::exhaustive}) CHECK(alp_method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(alp_method_from_string("simplex"), Error);
  }

  TEST_CASE("single binary variable gives one auxiliary and two rows") {
    LinearProgramModel lp;
    const LpVar w = lp.add_variable("w_0", LpVarKind::weight);
    const std::vector<ProperVar> x{{0, 2}};
    std::vector<SymbolicFactor> terms{SymbolicFactor::weighted(MixedModeFactor(x, {}, {2.0, 5.0}), w)};
    generate_constraints(std::move(terms), {0}, lp);
    CHECK(lp.count(LpVarKind::auxiliary) == 1);
    CHECK(lp.num_constraints() == 3);
    REQUIRE(lp.stages.size() == 1);
    CHECK(lp.stages[0].auxiliaries == 1);
    CHECK(lp.stages[0].constraints == 2);
    LinearProgramModel incomplete;
    incomplete.add_variable("w_0", LpVarKind::weight);
    std::vector<SymbolicFactor> two{SymbolicFactor::numeric(MixedModeFactor({{0, 2}, {1, 2}}, {}, {0, 1, 2, 3}))};
    CHECK_THROWS_AS(generate_constraints(std::move(two), {0}, incomplete), Error);
  }

  TEST_CASE("constraint terms equal gamma g - h by enumeration") {
    const auto inst = oracle::graph_with_reseed(5, 3, 2, 2);
    const auto m = build_sis_model(inst);
    const auto basis = indicator_basis(m);
    const auto bps = backproject_all(basis, m);
    const auto coef = basis_coefficients(m, basis, bps);
    REQUIRE(coef.size() == basis.size());
    std::vector<ProperVar> vars = state_scope(m);
    for (VarId id : m.action_vars) vars.push_back({id, 2});
    double err = 0.0;
    oracle::for_each_assignment(vars, [&](const Assignment& xa) {
      for (std::size_t j = 0; j < basis.size(); ++j) {
        double g = 0.0;
        oracle::for_each_assignment(state_scope(m), [&](const Assignment& next) {
          g += m.transition_probability(xa, next) * basis[j].eval(next);
        });
        err = std::max(err, std::abs(mmf_eval(coef[j], xa) - (m.discount * g - basis[j].eval(xa))));
      }
    });
    CHECK(err <= 1e-9);
  }

  TEST_CASE("two-node chain: flat and RR constraint counts agree") {
    EpidemicInstance inst;
    inst.n = 2;
    inst.edges = {{0, 1}};
    inst.controlled = {0};
    const auto m = build_sis_model(inst);
    const auto basis = indicator_basis(m);
    const auto flat = build_alp(m, basis, AlpMethod::flat);
    const auto rr = build_alp(m, basis, AlpMethod::rr);
    CHECK(flat.lp.num_constraints() == rr.lp.num_constraints());
    const auto a = solve_alp(flat, ReferenceSolver());
    const auto b = solve_alp(rr, ReferenceSolver());
    REQUIRE(a.result.status == LpStatus::optimal);
    REQUIRE(b.result.status == LpStatus::optimal);
    CHECK(a.result.objective == doctest::Approx(b.result.objective).epsilon(1e-9));
  }

  TEST_CASE("three pipelines agree on objective and value function") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const std::size_t n = 4 + seed % 4;
      const auto inst = oracle::graph_with_reseed(n, 3, seed, n / 2);
      const auto m = build_sis_model(inst);
      const auto basis = indicator_basis(m);
      const auto ex = run(m, basis, AlpMethod::exhaustive);
      const auto fl = run(m, basis, AlpMethod::flat);
      const auto rr = run(m, basis, AlpMethod::rr);
      REQUIRE(ex.solution.result.status == LpStatus::optimal);
      REQUIRE(fl.solution.result.status == LpStatus::optimal);
      REQUIRE(rr.solution.result.status == LpStatus::optimal);
      const double z = ex.solution.result.objective;
      const double tol = 1e-6 * std::max(1.0, std::abs(z));
      CHECK(std::abs(fl.solution.result.objective - z) <= tol);
      CHECK(std::abs(rr.solution.result.objective - z) <= tol);
      CHECK(value_gap(m, basis, ex.solution.weights, rr.solution.weights) <= 1e-6);
      CHECK(value_gap(m, basis, fl.solution.weights, rr.solution.weights) <= 1e-6);
      CHECK(rr.problem.lp.num_constraints() <= fl.problem.lp.num_constraints());
    }
  }

  TEST_CASE("empty-edge graph decouples into per-node chains") {
    EpidemicInstance inst;
    inst.n = 4;
    inst.controlled = {1, 3};
    const auto m = build_sis_model(inst);
    const auto basis = indicator_basis(m);
    const auto rr = run(m, basis, AlpMethod::rr);
    REQUIRE(rr.solution.result.status == LpStatus::optimal);
    const auto ctl = oracle::isolated_node_values(inst.params, true);
    const auto unctl = oracle::isolated_node_values(inst.params, false);
    oracle::for_each_assignment(state_scope(m), [&](const Assignment& x) {
      double expect = 0.0;
      for (std::size_t i = 0; i < inst.n; ++i) {
        const auto& v = (i % 2 == 1) ? ctl : unctl;
        expect += x.at(static_cast<VarId>(i)) ? v.second : v.first;
      }
      CHECK(value_at(basis, rr.solution.weights, x) == doctest::Approx(expect).epsilon(1e-7));
    });
  }

  TEST_CASE("RR never emits more constraints than flat") {
    for (std::uint64_t seed = 10; seed <= 14; ++seed) {
      const auto inst = oracle::graph_with_reseed(12, 5, seed, 6);
      const auto m = build_sis_model(inst);
      const auto basis = indicator_basis(m);
      const auto fl = build_alp(m, basis, AlpMethod::flat);
      const auto rr = build_alp(m, basis, AlpMethod::rr);
      bool has_counter = false;
      for (const auto& cpd : m.cpds)
        for (const auto& c : cpd.counters()) has_counter = has_counter || c.size() >= 2;
      CHECK(rr.lp.num_constraints() <= fl.lp.num_constraints());
      if (has_counter) CHECK(rr.lp.num_constraints() < fl.lp.num_constraints());
      std::size_t aux = 0;
      for (const auto& s : rr.lp.stages) aux += s.auxiliaries;
      CHECK(aux == rr.lp.count(LpVarKind::auxiliary));
    }
  }

  TEST_CASE("flat pipeline honours the entry budget") {
    // Star: the hub's CPD flattens to 2^12 entries, its RR table has 2 * 2 * 11.
    EpidemicInstance inst;
    inst.n = 11;
    for (int leaf = 1; leaf <= 10; ++leaf) inst.edges.push_back({0, leaf});
    inst.controlled = {0};
    const auto m = build_sis_model(inst);
    const auto basis = indicator_basis(m);
    EliminationLimits tight;
    tight.max_entries = 256;
    CHECK_THROWS_AS(build_alp(m, basis, AlpMethod::flat, tight), GuardExceeded);
    CHECK_THROWS_AS(build_alp(m, basis, AlpMethod::exhaustive, tight), GuardExceeded);
    CHECK_NOTHROW(build_alp(m, basis, AlpMethod::rr));
  }
}
