#include <doctest.h>

#include <fstream>
#include <sstream>

#include "anonplan/alp.hpp"
#include "anonplan/error.hpp"
#include "anonplan/linear_expr.hpp"
#include "anonplan/lp_format.hpp"
#include "anonplan/lp_model.hpp"
#include "anonplan/lp_solver.hpp"
#include "anonplan/symbolic_factor.hpp"
#include "oracles.hpp"

using namespace anonplan;

namespace {

std::string golden(const std::string& name) {
  std::ifstream is(std::string(ANONPLAN_GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

LinearProgramModel bound_lp() {
  LinearProgramModel lp;
  const LpVar w = lp.add_variable("w_0", LpVarKind::weight);
  lp.set_objective(LinearExpr::variable(w));
  lp.add_constraint(LinearExpr::variable(w), LinearExpr(3.0));
  return lp;
}

// min 0.5 + x + 2y  s.t.  x + y >= 2,  y - x >= -4.  Optimum (3, -1), value 1.5.
LinearProgramModel two_var_lp() {
  LinearProgramModel lp;
  const LpVar x = lp.add_variable("w_0", LpVarKind::weight);
  const LpVar y = lp.add_variable("w_1", LpVarKind::weight);
  LinearExpr obj(0.5);
  obj.add(x, 1.0).add(y, 2.0);
  lp.set_objective(obj);
  lp.add_constraint(LinearExpr::variable(x).add(y, 1.0), LinearExpr(2.0));
  lp.add_constraint(LinearExpr::variable(y).add(x, -1.0), LinearExpr(-4.0));
  return lp;
}

// Max-constraint 0 >= max_x (w f(x) + r(x)) over one binary variable, f = [1, -1], r = [0, -2].
LinearProgramModel single_var_lp() {
  LinearProgramModel lp;
  const LpVar w = lp.add_variable("w_0", LpVarKind::weight);
  lp.set_objective(LinearExpr::variable(w));
  const std::vector<ProperVar> x{{0, 2}};
  std::vector<SymbolicFactor> terms{SymbolicFactor::weighted(MixedModeFactor(x, {}, {1.0, -1.0}), w),
                                    SymbolicFactor::numeric(MixedModeFactor(x, {}, {0.0, -2.0}))};
  generate_constraints(std::move(terms), {0}, lp);
  return lp;
}

/// Minimum of c.x over {A x >= b} in two variables by enumerating row-pair vertices.
std::optional<double> vertex_min(const std::vector<std::array<double, 3>>& rows, double c0, double c1) {
  std::optional<double> best;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const auto& r = rows[i];
      const auto& s = rows[j];
      const double det = r[0] * s[1] - r[1] * s[0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (r[2] * s[1] - r[1] * s[2]) / det;
      const double y = (r[0] * s[2] - r[2] * s[0]) / det;
      bool ok = true;
      for (const auto& t : rows) ok = ok && t[0] * x + t[1] * y >= t[2] - 1e-9;
      if (ok && (!best || c0 * x + c1 * y < *best)) best = c0 * x + c1 * y;
    }
  return best;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("linear expressions normalize") {
    LinearExpr e(1.5);
    e.add(3, 2.0).add(1, -1.0).add(3, -2.0).add(0, 0.0).add(1, 4.0);
    e.normalize();
    REQUIRE(e.terms.size() == 1);
    CHECK(e.terms[0] == LpTerm{1, 3.0});
    CHECK(e.coefficient(3) == 0.0);
    const std::vector<double> values{0.0, 2.0};
    CHECK(e.evaluate(values) == 7.5);
    LinearExpr f = LinearExpr::variable(2, 0.5);
    f.add(e, 2.0).normalize();
    CHECK(f.constant == 3.0);
    CHECK(f.coefficient(1) == 6.0);
    CHECK(f.coefficient(2) == 0.5);
  }

  TEST_CASE("rows are stored as sum(lhs - rhs) >= constant") {
    LinearProgramModel lp;
    const LpVar a = lp.add_variable("w_0", LpVarKind::weight);
    const LpVar b = lp.add_variable("u_0_0", LpVarKind::auxiliary);
    LinearExpr lhs = LinearExpr::variable(b);
    LinearExpr rhs(4.0);
    rhs.add(a, 2.0);
    lp.add_constraint(lhs, rhs);
    const RowView r = lp.row(0);
    REQUIRE(r.terms.size() == 2);
    CHECK(r.terms[0] == LpTerm{a, -2.0});
    CHECK(r.terms[1] == LpTerm{b, 1.0});
    CHECK(r.bound == 4.0);
    CHECK(lp.count(LpVarKind::weight) == 1);
    CHECK(lp.count(LpVarKind::auxiliary) == 1);
    const std::vector<double> at{1.0, 5.0};
    CHECK(lp.max_violation(at) == 1.0);
    lp.add_row({{7, 1.0}}, 0.0);
    CHECK_THROWS_AS(lp.validate(), Error);
  }

  TEST_CASE("min w subject to w >= 3") {
    const auto r = solve_lp(bound_lp());
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("two-variable LP has the hand-computed optimum") {
    const auto r = solve_lp(two_var_lp());
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.values[0] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(r.values[1] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(r.objective == doctest::Approx(1.5).epsilon(1e-10));
  }

  TEST_CASE("auxiliary max-constraint LP") {
    const auto lp = single_var_lp();
    CHECK(lp.count(LpVarKind::auxiliary) == 1);
    CHECK(lp.num_constraints() == 3);
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.weights[0] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(r.max_violation <= 1e-7);
  }

  TEST_CASE("unbounded LP is reported") {
    LinearProgramModel lp;
    const LpVar w = lp.add_variable("w_0", LpVarKind::weight);
    const LpVar v = lp.add_variable("w_1", LpVarKind::weight);
    lp.set_objective(LinearExpr::variable(w));
    lp.add_constraint(LinearExpr::variable(v), LinearExpr(1.0));
    CHECK(solve_lp(lp).status == LpStatus::unbounded);
  }

  TEST_CASE("infeasible LP is not reported optimal") {
    LinearProgramModel lp;
    const LpVar w = lp.add_variable("w_0", LpVarKind::weight);
    lp.set_objective(LinearExpr::variable(w));
    lp.add_constraint(LinearExpr::variable(w), LinearExpr(1.0));
    lp.add_constraint(LinearExpr(0.0), LinearExpr::variable(w));
    CHECK(solve_lp(lp).status != LpStatus::optimal);
  }

  TEST_CASE("random two-variable LPs match vertex enumeration") {
    Rng rng(17);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::array<double, 3>> rows{{1, 0, -10}, {-1, 0, -10}, {0, 1, -10}, {0, -1, -10}};
      const int extra = 1 + static_cast<int>(rng.below(6));
      for (int i = 0; i < extra; ++i)
        rows.push_back({std::round(rng.uniform() * 8 - 4), std::round(rng.uniform() * 8 - 4), std::round(rng.uniform() * 10 - 5)});
      const double c0 = std::round(rng.uniform() * 6 - 3);
      const double c1 = std::round(rng.uniform() * 6 - 3);
      LinearProgramModel lp;
      lp.add_variable("w_0", LpVarKind::weight);
      lp.add_variable("w_1", LpVarKind::weight);
      LinearExpr obj;
      obj.add(0, c0).add(1, c1);
      lp.set_objective(obj);
      for (const auto& r : rows) lp.add_constraint(LinearExpr::variable(0, r[0]).add(1, r[1]), LinearExpr(r[2]));
      const auto expect = vertex_min(rows, c0, c1);
      const auto got = solve_lp(lp);
      if (!expect) {
        CHECK(got.status != LpStatus::optimal);
        continue;
      }
      REQUIRE(got.status == LpStatus::optimal);
      CHECK(got.objective == doctest::Approx(*expect).epsilon(1e-9));
      ++solved;
    }
    CHECK(solved > 100);
  }

  TEST_CASE("tie-break selects a unique point on the optimal face") {
    // min x + y s.t. x + y >= 1, x >= 0, y >= 0; tie-break min x picks (0, 1).
    LinearProgramModel lp;
    lp.add_variable("w_0", LpVarKind::weight);
    lp.add_variable("w_1", LpVarKind::weight);
    lp.set_objective(LinearExpr::variable(0).add(1, 1.0));
    lp.set_tiebreak(LinearExpr::variable(0));
    lp.add_constraint(LinearExpr::variable(0).add(1, 1.0), LinearExpr(1.0));
    lp.add_constraint(LinearExpr::variable(0), LinearExpr(0.0));
    lp.add_constraint(LinearExpr::variable(1), LinearExpr(0.0));
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(r.values[0]) <= 1e-9);
    CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("LP export matches golden files") {
    CHECK(lp_to_string(bound_lp()) == golden("lp_bound.lp"));
    CHECK(lp_to_string(two_var_lp()) == golden("lp_two_var.lp"));
    CHECK(lp_to_string(single_var_lp(), {"single binary variable, one weighted and one numeric term"}) ==
          golden("lp_single_var.lp"));
  }

  TEST_CASE("LP files round-trip") {
    for (const auto& lp : {bound_lp(), two_var_lp(), single_var_lp()}) {
      std::istringstream is(lp_to_string(lp));
      const auto back = read_lp(is);
      CHECK(back.num_variables() == lp.num_variables());
      CHECK(back.num_constraints() == lp.num_constraints());
      CHECK(back.objective() == lp.objective());
      for (std::size_t v = 0; v < lp.num_variables(); ++v) {
        CHECK(back.variable(static_cast<LpVar>(v)).name == lp.variable(static_cast<LpVar>(v)).name);
        CHECK(back.variable(static_cast<LpVar>(v)).kind == lp.variable(static_cast<LpVar>(v)).kind);
      }
      for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
        CHECK(std::equal(back.row(r).terms.begin(), back.row(r).terms.end(), lp.row(r).terms.begin(),
                         lp.row(r).terms.end()));
        CHECK(back.row(r).bound == lp.row(r).bound);
      }
      CHECK(lp_to_string(back) == lp_to_string(lp));
    }
    std::istringstream bad("Minimize\n obj: w_0\nSubject To\n c0: w_0 3\nEnd\n");
    CHECK_THROWS_AS(read_lp(bad), Error);
  }

  TEST_CASE("long rows wrap and still round-trip") {
    LinearProgramModel lp;
    LinearExpr sum;
    for (int i = 0; i < 20; ++i) sum.add(lp.add_variable("w_" + std::to_string(i), LpVarKind::weight), 0.1 * (i + 1));
    lp.set_objective(sum);
    lp.add_constraint(sum, LinearExpr(-1.0 / 3.0));
    std::istringstream is(lp_to_string(lp));
    const auto back = read_lp(is);
    CHECK(back.objective() == lp.objective());
    CHECK(back.row(0).bound == lp.row(0).bound);
  }
}
