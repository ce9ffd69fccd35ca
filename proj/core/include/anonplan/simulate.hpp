#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "anonplan/epidemics.hpp"
#include "anonplan/fmmdp.hpp"
#include "anonplan/random.hpp"
#include "anonplan/statistics.hpp"

namespace anonplan {

/// One byte per node: infection status, or vaccination for actions (always 0 on
/// uncontrolled nodes).
using SisState = std::vector<std::uint8_t>;

/// -lambda1 * |a| - lambda2 * |x|.
double sis_reward(const EpidemicInstance& inst, const SisState& x, const SisState& a);

/// Samples every node's next state independently; returns the reward of (x, a).
class SisSimulator {
 public:
  explicit SisSimulator(const EpidemicInstance& inst);

  double step(SisState& x, const SisState& a, Rng& rng) const;
  const EpidemicInstance& instance() const { return inst_; }

 private:
  EpidemicInstance inst_;
  std::vector<std::vector<int>> neighbors_;
};

/// Vaccinates exactly the infected controlled nodes.
SisState copystate_action(const EpidemicInstance& inst, const SisState& x);

enum class PolicyKind { random, copystate, greedy };
std::string to_string(PolicyKind k);
PolicyKind policy_kind_from_string(const std::string& s);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;
  virtual bool deterministic() const { return true; }
  virtual SisState act(const SisState& x, Rng& rng) = 0;
};

/// Each controlled node is vaccinated with probability 1/2.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(const EpidemicInstance& inst) : inst_(inst) {}
  PolicyKind kind() const override { return PolicyKind::random; }
  bool deterministic() const override { return false; }
  SisState act(const SisState& x, Rng& rng) override;

 private:
  EpidemicInstance inst_;
};

class CopystatePolicy : public Policy {
 public:
  explicit CopystatePolicy(const EpidemicInstance& inst) : inst_(inst) {}
  PolicyKind kind() const override { return PolicyKind::copystate; }
  SisState act(const SisState& x, Rng&) override { return copystate_action(inst_, x); }

 private:
  EpidemicInstance inst_;
};

/// Greedy with respect to the Q function of a linear value function; memoizes
/// actions per visited state.
class GreedyPolicy : public Policy {
 public:
  GreedyPolicy(const EpidemicInstance& inst, std::span<const BasisFunction> basis, std::span<const double> weights);
  PolicyKind kind() const override { return PolicyKind::greedy; }
  SisState act(const SisState& x, Rng&) override;

 private:
  EpidemicInstance inst_;
  FactoredModel model_;
  QTermSet terms_;
  std::vector<int> node_of_action_;
  std::map<SisState, SisState> cache_;
};

struct EvaluationConfig {
  std::size_t n_starts = 50;
  std::size_t n_runs = 50;
  std::size_t horizon = 200;
  std::uint64_t seed = 0;
  bool discounted = true;
};

struct PolicyEvaluation {
  EvaluationConfig config;
  PolicyKind policy = PolicyKind::random;
  std::vector<SisState> starts;
  std::vector<std::vector<double>> returns;  ///< [start][run]
  std::vector<BoxStats> per_start;
  std::vector<double> start_means;
  BoxStats over_starts;  ///< box statistics of the per-start means
  double grand_mean = 0.0;
};

/// Start states are uniform over {0,1}^n from stream (seed, s, 0); run r of start s
/// uses stream (seed, s, r + 1) for both policy and dynamics.
PolicyEvaluation evaluate(const EpidemicInstance& inst, Policy& policy, const EvaluationConfig& config);

/// start_id,run_id,return
void write_returns_csv(std::ostream& os, const PolicyEvaluation& e);
/// start_id,mean,median,q1,q3,lo_whisker,hi_whisker
void write_summary_csv(std::ostream& os, const PolicyEvaluation& e);
/// policy,mean,median,q1,q3,lo_whisker,hi_whisker over per-start means, one row per evaluation.
void write_box_csv(std::ostream& os, const std::vector<const PolicyEvaluation*>& evaluations);

}  // namespace anonplan
