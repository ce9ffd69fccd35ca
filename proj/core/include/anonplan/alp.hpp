#pragma once

#include <span>
#include <string>
#include <vector>

#include "anonplan/elimination.hpp"
#include "anonplan/fmmdp.hpp"
#include "anonplan/lp_model.hpp"
#include "anonplan/lp_solver.hpp"
#include "anonplan/symbolic_factor.hpp"

namespace anonplan {

/// exhaustive: one row per joint (x, a). flat: VE constraint generation over flattened
/// tables. rr: VE constraint generation over redundant mixed-mode tables.
enum class AlpMethod { exhaustive, flat, rr };

/// CLI spellings: "exhaustive", "alp", "rr-alp".
std::string to_string(AlpMethod m);
AlpMethod alp_method_from_string(const std::string& s);

/// Objective coefficient of each basis weight under uniform state relevance: the mean
/// of the basis table. Indexed like `basis`.
std::vector<double> objective_coefficients(std::span<const BasisFunction> basis);

/// Expected basis values under a fixed, generic product distribution over state
/// variables. Minimized as a tie-break over the optimal face so that every pipeline
/// returns the same value function when the ALP optimum is not unique.
std::vector<double> tiebreak_coefficients(std::span<const BasisFunction> basis);

/// Per-basis coefficient tables gamma * g_i - h_i over Pa(C_i) united with C_i.
std::vector<MixedModeFactor> basis_coefficients(const FactoredModel& m, std::span<const BasisFunction> basis,
                                                std::span<const BackProjection> backprojections);

/// One numeric term per reward and one term (gamma g_i - h_i) w_i per basis function.
std::vector<SymbolicFactor> constraint_terms(const FactoredModel& m, std::span<const BasisFunction> basis,
                                             std::span<const BackProjection> backprojections,
                                             std::span<const LpVar> weight_vars);

/// Replaces the max constraint 0 >= max_{x,a} sum(terms) by linear rows, eliminating
/// `order` with Collect/Augment/Reduce. Each reduce creates one auxiliary u_<stage>_<entry>
/// per valid result entry and one row u >= e per valid input entry; a final row bounds
/// the remaining sum by 0. Rows and variables are appended to `lp`; per-stage counts
/// go to lp.stages. Throws GuardExceeded when an augmented table would exceed
/// limits.max_entries.
void generate_constraints(std::vector<SymbolicFactor> terms, const EliminationOrder& order, LinearProgramModel& lp,
                          const EliminationLimits& limits = {});

struct AlpProblem {
  AlpMethod method = AlpMethod::rr;
  LinearProgramModel lp;
  std::vector<LpVar> weight_vars;  ///< indexed like the basis
  EliminationOrder order;          ///< empty for the exhaustive method
  double generation_seconds = 0.0;
};

/// Builds the ALP for `basis` with the chosen pipeline. The flat pipeline aborts with
/// GuardExceeded when a flattened or augmented table exceeds limits.max_entries; the
/// exhaustive pipeline when the joint space exceeds it.
AlpProblem build_alp(const FactoredModel& m, std::span<const BasisFunction> basis, AlpMethod method,
                     const EliminationLimits& limits = {});

struct AlpSolution {
  SolverResult result;
  std::vector<double> weights;  ///< indexed like the basis
};

AlpSolution solve_alp(const AlpProblem& problem, const LpSolver& solver);

}  // namespace anonplan
