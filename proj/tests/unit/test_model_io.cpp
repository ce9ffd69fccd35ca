#include <doctest.h>

#include <sstream>

#include "anonplan/epidemics.hpp"
#include "anonplan/error.hpp"
#include "anonplan/model_io.hpp"
#include "oracles.hpp"

using namespace anonplan;

namespace {

/// Valid entries agree; invalid entries are not stored in files.
bool same_valid_entries(const MixedModeFactor& a, const MixedModeFactor& b) {
  if (!a.shape().same_layout(b.shape())) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.valid(i) != b.valid(i) || (a.valid(i) && a[i] != b[i])) return false;
  return true;
}

}  // namespace

TEST_SUITE("model_io") {
  TEST_CASE("SIS model round-trips through JSON") {
    auto inst = oracle::graph_with_reseed(7, 3, 8, 3);
    inst.params.beta = 0.1 + 0.2;
    const auto m = build_sis_model(inst);
    std::ostringstream os;
    write_model(os, m);
    std::istringstream is(os.str());
    const auto back = read_model(is);
    CHECK(back.discount == m.discount);
    CHECK(back.state_vars == m.state_vars);
    CHECK(back.action_vars == m.action_vars);
    CHECK(back.next_state_vars == m.next_state_vars);
    REQUIRE(back.variables.size() == m.variables.size());
    for (VarId id = 0; id < m.variables.size(); ++id) {
      CHECK(back.variables[id].name == m.variables[id].name);
      CHECK(back.variables[id].kind == m.variables[id].kind);
    }
    REQUIRE(back.cpds.size() == m.cpds.size());
    for (std::size_t i = 0; i < m.cpds.size(); ++i) CHECK(same_valid_entries(back.cpds[i], m.cpds[i]));
    REQUIRE(back.rewards.size() == m.rewards.size());
    for (std::size_t i = 0; i < m.rewards.size(); ++i) CHECK(same_valid_entries(back.rewards[i], m.rewards[i]));
    std::ostringstream again;
    write_model(again, back);
    CHECK(again.str() == os.str());
  }

  TEST_CASE("factor files round-trip with an order") {
    FactorFile f;
    for (int i = 0; i < 6; ++i) f.variables.add("v" + std::to_string(i), VarKind::state);
    f.factors.push_back(oracle::canonical_factor());
    f.factors.push_back(MixedModeFactor({{1, 2}}, {}, {0.25, -1.5}));
    f.order = EliminationOrder{5, 4, 3, 2, 1, 0};
    std::ostringstream os;
    write_factor_file(os, f);
    std::istringstream is(os.str());
    const auto back = read_factor_file(is);
    CHECK(back.order == f.order);
    REQUIRE(back.factors.size() == 2);
    CHECK(same_valid_entries(back.factors[0], f.factors[0]));
    CHECK(same_valid_entries(back.factors[1], f.factors[1]));
  }

  TEST_CASE("malformed documents are rejected") {
    std::istringstream not_json("{");
    CHECK_THROWS_AS(read_model(not_json), Error);
    std::istringstream wrong_format(R"({"format": "anonplan-factors/1"})");
    CHECK_THROWS_AS(read_model(wrong_format), Error);
    std::istringstream missing(R"({"format": "anonplan-factors/1", "variables": []})");
    CHECK_THROWS_AS(read_factor_file(missing), Error);
    std::istringstream unknown_var(
        R"({"format": "anonplan-factors/1", "variables": [{"name": "a", "kind": "state", "cardinality": 2}],
            "factors": [{"proper": [3], "counters": [], "entries": []}]})");
    CHECK_THROWS_AS(read_factor_file(unknown_var), Error);
    std::istringstream bad_digit(
        R"({"format": "anonplan-factors/1", "variables": [{"name": "a", "kind": "state", "cardinality": 2}],
            "factors": [{"proper": [0], "counters": [], "entries": [{"p": [2], "k": [], "v": 1}]}]})");
    CHECK_THROWS_AS(read_factor_file(bad_digit), Error);
  }

  TEST_CASE("variable kinds") {
    for (auto k : {VarKind::state, VarKind::action, VarKind::next_state}) CHECK(var_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(var_kind_from_string("hidden"), Error);
  }
}
