#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "anonplan/lp_model.hpp"

namespace anonplan {

enum class LpStatus { optimal, unbounded, infeasible, iteration_limit };

std::string to_string(LpStatus s);

struct SolverOptions {
  /// Maximum row violation accepted in a reported optimum.
  double feasibility_tol = 1e-7;
  /// A row is cut when violated by more than cut_tol * max(1, |bound|, max_i |a_i x_i|).
  double cut_tol = 1e-9;
  std::size_t max_rounds = 200000;
  std::size_t max_pivots = 20000000;
  /// Violated rows added per round when rows carry no auxiliary structure.
  std::size_t cuts_per_round = 64;
  double initial_box = 1e3;
  /// Relative slack on the primary optimum while minimizing a tie-break objective.
  double tiebreak_slack = 1e-10;
  double max_box = 1e12;
};

struct SolverResult {
  LpStatus status = LpStatus::iteration_limit;
  std::vector<double> values;   ///< one per LP variable
  std::vector<double> weights;  ///< weight-kind variables in declaration order
  double objective = 0.0;
  double seconds = 0.0;
  std::size_t rounds = 0;
  std::size_t pivots = 0;
  std::size_t cuts = 0;
  double max_violation = 0.0;
};

class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual SolverResult solve(const LinearProgramModel& lp) const = 0;
};

/// Embedded reference solver.
///
/// Variables that have a zero objective coefficient and are bounded below only by
/// rows of the form `u >= expr` (before any row that uses them, with nonnegative
/// weight) are treated as auxiliaries: for fixed remaining variables their least
/// feasible value is the max over their defining rows. The remaining (structural)
/// variables are found by row generation: a restricted master LP over cuts on the
/// structural variables is solved with a revised primal simplex on its dual
/// (Dantzig pricing, Bland's rule after degenerate stalls), and the most violated
/// original row, with auxiliaries expanded along their active definitions, becomes
/// the next cut. A box |x| <= M keeps the master bounded; an optimum touching the box
/// at the largest M is reported unbounded. With a tie-break objective the cut pool
/// seeds a second master restricted to the primary optimal face.
class ReferenceSolver : public LpSolver {
 public:
  ReferenceSolver() = default;
  explicit ReferenceSolver(SolverOptions options) : options_(options) {}
  SolverResult solve(const LinearProgramModel& lp) const override;

 private:
  SolverOptions options_;
};

SolverResult solve_lp(const LinearProgramModel& lp, const SolverOptions& options = {});

}  // namespace anonplan
