#pragma once

#include <optional>
#include <span>
#include <vector>

#include "anonplan/elimination.hpp"
#include "anonplan/mixed_factor.hpp"
#include "anonplan/variables.hpp"

namespace anonplan {

/// Two-slice factored multiagent MDP.
///
/// cpds[i] is the conditional distribution of next_state_vars[i]: a mixed-mode factor
/// whose proper scope contains the child next-state variable and whose remaining
/// proper variables and counters are its parents. Rewards are additive local factors
/// over current state and action variables.
struct FactoredModel {
  VariableTable variables;
  std::vector<VarId> state_vars;
  std::vector<VarId> action_vars;
  std::vector<VarId> next_state_vars;  ///< paired index-wise with state_vars
  std::vector<MixedModeFactor> cpds;   ///< paired index-wise with next_state_vars
  std::vector<MixedModeFactor> rewards;
  double discount = 0.95;

  /// Checks pairing, reward scopes, and CPD normalization (1e-9) on every valid entry.
  void validate() const;

  std::optional<std::size_t> state_index(VarId id) const;
  VarId next_of(VarId state) const;
  /// Sum of reward factors at a full state/action assignment.
  double reward(const Assignment& a) const;
  /// P(x' | x, a) by the product of CPDs.
  double transition_probability(const Assignment& current, const Assignment& next) const;
};

/// Basis function over current-state variables.
struct BasisFunction {
  int id = 0;
  FlatFactor factor;

  double eval(const Assignment& x) const { return factor.eval(x); }
};

/// Indicators I[X_i = 1] and I[X_i = 0] for every state variable, ids 2i and 2i+1.
std::vector<BasisFunction> indicator_basis(const FactoredModel& m);

/// Expected next-step value of a basis function, over the parents of its scope.
struct BackProjection {
  int basis_id = 0;
  MixedModeFactor g;
};

/// g(x,a) = sum_{c'} prod_{i in C} T_i(c'_i | parents) h(c'); next-state variables are
/// summed out in ascending id after multiplying the needed CPDs.
BackProjection backproject(const BasisFunction& h, const FactoredModel& m);
std::vector<BackProjection> backproject_all(std::span<const BasisFunction> basis, const FactoredModel& m);

/// Local Q terms: every reward factor plus discount * w_j * g_j.
struct QTermSet {
  std::vector<MixedModeFactor> terms;

  double eval(const Assignment& xa) const;
};

QTermSet q_terms(const FactoredModel& m, std::span<const BackProjection> backprojections,
                 std::span<const double> weights);
QTermSet q_terms(const FactoredModel& m, std::span<const BasisFunction> basis, std::span<const double> weights);

/// Maximizing joint action at state x for the Q function defined by `terms`.
Assignment greedy_action(const FactoredModel& m, const QTermSet& terms, const Assignment& x);
Assignment greedy_action(const FactoredModel& m, std::span<const BasisFunction> basis,
                         std::span<const double> weights, const Assignment& x);

/// V(x) = sum_j w_j h_j(x).
double value_at(std::span<const BasisFunction> basis, std::span<const double> weights, const Assignment& x);

}  // namespace anonplan
