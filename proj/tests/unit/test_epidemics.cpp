#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "anonplan/epidemics.hpp"
#include "anonplan/error.hpp"
#include "oracles.hpp"

using namespace anonplan;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

EpidemicInstance square_with_chord() {
  EpidemicInstance inst;
  inst.n = 4;
  inst.edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}};
  inst.controlled = {0, 2};
  inst.seed = 7;
  return inst;
}

/// Direct evaluation of the SIS transition for node i at a joint assignment.
double direct_probability(const EpidemicInstance& inst, std::size_t i, const std::vector<int>& x,
                          const std::vector<int>& a, int next) {
  const auto& p = inst.params;
  double p1 = 0.0;
  if (x[i] == 0) {
    double escape = 1.0;
    const auto nb = inst.neighbors();
    for (int j : nb[i])
      if (x[static_cast<std::size_t>(j)]) escape *= 1.0 - p.beta;
    p1 = (1 - a[i]) * (1.0 - escape);
  } else {
    p1 = (1 - a[i]) * (1.0 - p.delta);
  }
  return next ? p1 : 1.0 - p1;
}

}  // namespace

TEST_SUITE("epidemics") {
  TEST_CASE("SIS infection probability spot values") {
    const SisParameters p;
    CHECK(std::abs(sis_infection_probability(p, 0, 0, 2) - 0.84) <= 1e-15);
    CHECK(std::abs(sis_infection_probability(p, 1, 0, 0) - 0.7) <= 1e-15);
    CHECK(sis_infection_probability(p, 0, 1, 2) == 0.0);
    CHECK(sis_infection_probability(p, 1, 1, 3) == 0.0);
    CHECK(sis_infection_probability(p, 0, 0, 0) == 0.0);
  }

  TEST_CASE("isolated node cannot be infected") {
    EpidemicInstance inst;
    inst.n = 2;
    const auto m = build_sis_model(inst);
    CHECK(m.cpds[0].counters().empty());
    Assignment a;
    a.set(m.state_vars[0], 0);
    a.set(m.next_state_vars[0], 1);
    CHECK(mmf_eval(m.cpds[0], a) == 0.0);
  }

  TEST_CASE("CPDs equal the closed form at every assignment") {
    const auto inst = square_with_chord();
    const auto m = build_sis_model(inst);
    const std::size_t n = inst.n;
    std::vector<ProperVar> vars;
    for (VarId id : m.state_vars) vars.push_back({id, 2});
    for (VarId id : m.action_vars) vars.push_back({id, 2});
    for (VarId id : m.next_state_vars) vars.push_back({id, 2});
    double err = 0.0;
    oracle::for_each_assignment(vars, [&](const Assignment& full) {
      std::vector<int> x(n), a(n, 0);
      for (std::size_t i = 0; i < n; ++i) x[i] = full.at(m.state_vars[i]);
      for (std::size_t j = 0; j < inst.controlled.size(); ++j)
        a[static_cast<std::size_t>(inst.controlled[j])] = full.at(m.action_vars[j]);
      for (std::size_t i = 0; i < n; ++i)
        err = std::max(err, std::abs(mmf_eval(m.cpds[i], full) -
                                     direct_probability(inst, i, x, a, full.at(m.next_state_vars[i]))));
    });
    CHECK(err <= 1e-15);
  }

  TEST_CASE("variable ids follow the state, action, next-state layout") {
    const auto m = build_sis_model(square_with_chord());
    CHECK(m.state_vars == std::vector<VarId>{0, 1, 2, 3});
    CHECK(m.action_vars == std::vector<VarId>{4, 5});
    CHECK(m.next_state_vars == std::vector<VarId>{6, 7, 8, 9});
    // Node 0 has three neighbours: one counter of size 3.
    REQUIRE(m.cpds[0].counters().size() == 1);
    CHECK(m.cpds[0].counters()[0].size() == 3);
  }

  TEST_CASE("reward is minus the action and infection costs") {
    auto inst = square_with_chord();
    inst.params.lambda1 = 1.5;
    inst.params.lambda2 = 7.0;
    const auto m = build_sis_model(inst);
    std::vector<ProperVar> vars;
    for (VarId id : m.state_vars) vars.push_back({id, 2});
    for (VarId id : m.action_vars) vars.push_back({id, 2});
    oracle::for_each_assignment(vars, [&](const Assignment& xa) {
      int infected = 0, vaccinated = 0;
      for (VarId id : m.state_vars) infected += xa.at(id);
      for (VarId id : m.action_vars) vaccinated += xa.at(id);
      REQUIRE(m.reward(xa) == -1.5 * vaccinated - 7.0 * infected);
    });
  }

  TEST_CASE("random graphs are simple, sorted and deterministic") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto g = oracle::graph_with_reseed(30, 10, seed, 15);
      CHECK_NOTHROW(g.validate());
      CHECK(std::is_sorted(g.edges.begin(), g.edges.end()));
      for (auto [u, v] : g.edges) CHECK(u < v);
      for (int d : g.degrees()) {
        CHECK(d >= 1);
        CHECK(d <= 10);
      }
      CHECK(g.controlled.size() == 15);
      CHECK(std::set<int>(g.controlled.begin(), g.controlled.end()).size() == 15);
      const auto again = oracle::graph_with_reseed(30, 10, seed, 15);
      CHECK(again.edges == g.edges);
      CHECK(again.controlled == g.controlled);
    }
  }

  TEST_CASE("mean degree of n=30, k_max=10 graphs") {
    double lo = 1e9, hi = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const double d = oracle::graph_with_reseed(30, 10, seed, 0).mean_degree();
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      CHECK(d >= 2.5);
      CHECK(d <= 4.5);
    }
    MESSAGE("mean degree range " << lo << " .. " << hi);
  }

  TEST_CASE("two nodes give one edge") {
    const auto g = random_graph(2, 1, 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0] == std::pair<int, int>{0, 1});
    CHECK_THROWS_AS(random_graph(1, 1, 1), Error);
    CHECK_THROWS_AS(random_graph(5, 5, 1), Error);
  }

  TEST_CASE("instance validation") {
    auto inst = square_with_chord();
    inst.edges.push_back({1, 1});
    CHECK_THROWS_AS(inst.validate(), Error);
    inst = square_with_chord();
    inst.edges.push_back({0, 1});
    CHECK_THROWS_AS(inst.validate(), Error);
    inst = square_with_chord();
    inst.controlled = {4};
    CHECK_THROWS_AS(inst.validate(), Error);
    inst = square_with_chord();
    inst.params.beta = 1.5;
    CHECK_THROWS_AS(inst.validate(), Error);
    auto many = square_with_chord();
    CHECK_THROWS_AS(select_controlled(many, 5), Error);
  }

  TEST_CASE("instance file matches the golden bytes and round-trips") {
    const std::string golden = slurp(std::string(ANONPLAN_GOLDEN_DIR) + "/square.graph");
    std::ostringstream os;
    write_instance(os, square_with_chord(), {"hand-written square with a chord"});
    CHECK(os.str() == golden);
    std::istringstream is(golden);
    const auto back = read_instance(is);
    CHECK(back.n == 4);
    CHECK(back.edges == square_with_chord().edges);
    CHECK(back.controlled == std::vector<int>{0, 2});
    CHECK(back.params.gamma == 0.95);
    CHECK(back.seed == 7);
    std::istringstream bad("anonplan-graph/1\nn 3\nfoo 1\n");
    CHECK_THROWS_AS(read_instance(bad), Error);
    std::istringstream missing("anonplan-graph/1\nn 3\n");
    CHECK_THROWS_AS(read_instance(missing), Error);
  }

  TEST_CASE("instance round-trip preserves non-default parameters exactly") {
    auto inst = oracle::graph_with_reseed(12, 4, 99, 5);
    inst.params = {0.1 + 0.2, 1.0 / 3.0, 2.5, 1e-3, 0.9};
    std::ostringstream os;
    write_instance(os, inst);
    std::istringstream is(os.str());
    const auto back = read_instance(is);
    CHECK(back.params.beta == inst.params.beta);
    CHECK(back.params.delta == inst.params.delta);
    CHECK(back.params.lambda2 == inst.params.lambda2);
    CHECK(back.edges == inst.edges);
    std::ostringstream again;
    write_instance(again, back);
    CHECK(again.str() == os.str());
  }
}
