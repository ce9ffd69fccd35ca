#include "anonplan/simulate.hpp"

#include <algorithm>
#include <ostream>

#include "anonplan/error.hpp"
#include "anonplan/format.hpp"

namespace anonplan {

double sis_reward(const EpidemicInstance& inst, const SisState& x, const SisState& a) {
  double infected = 0.0;
  double vaccinated = 0.0;
  for (auto v : x) infected += v;
  for (int c : inst.controlled) vaccinated += a[static_cast<std::size_t>(c)];
  return -inst.params.lambda1 * vaccinated - inst.params.lambda2 * infected;
}

SisSimulator::SisSimulator(const EpidemicInstance& inst) : inst_(inst), neighbors_(inst.neighbors()) {}

double SisSimulator::step(SisState& x, const SisState& a, Rng& rng) const {
  const double reward = sis_reward(inst_, x, a);
  SisState next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int k = 0;
    for (int j : neighbors_[i]) k += x[static_cast<std::size_t>(j)];
    const double p = sis_infection_probability(inst_.params, x[i], a[i], k);
    next[i] = rng.uniform() < p ? 1 : 0;
  }
  x = std::move(next);
  return reward;
}

SisState copystate_action(const EpidemicInstance& inst, const SisState& x) {
  SisState a(inst.n, 0);
  for (int c : inst.controlled) a[static_cast<std::size_t>(c)] = x[static_cast<std::size_t>(c)];
  return a;
}

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::random: return "random";
    case PolicyKind::copystate: return "copystate";
    case PolicyKind::greedy: return "greedy";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "random") return PolicyKind::random;
  if (s == "copystate") return PolicyKind::copystate;
  if (s == "greedy") return PolicyKind::greedy;
  throw Error("unknown policy: " + s);
}

SisState RandomPolicy::act(const SisState&, Rng& rng) {
  SisState a(inst_.n, 0);
  for (int c : inst_.controlled) a[static_cast<std::size_t>(c)] = rng.bernoulli(0.5) ? 1 : 0;
  return a;
}

GreedyPolicy::GreedyPolicy(const EpidemicInstance& inst, std::span<const BasisFunction> basis,
                           std::span<const double> weights)
    : inst_(inst), model_(build_sis_model(inst)), node_of_action_(inst.controlled) {
  terms_ = q_terms(model_, basis, weights);
}

SisState GreedyPolicy::act(const SisState& x, Rng&) {
  if (auto it = cache_.find(x); it != cache_.end()) return it->second;
  Assignment state;
  for (std::size_t i = 0; i < x.size(); ++i) state.set(model_.state_vars[i], x[i]);
  const Assignment best = greedy_action(model_, terms_, state);
  SisState a(inst_.n, 0);
  for (std::size_t j = 0; j < model_.action_vars.size(); ++j)
    a[static_cast<std::size_t>(node_of_action_[j])] = static_cast<std::uint8_t>(best.at(model_.action_vars[j]));
  cache_.emplace(x, a);
  return a;
}

PolicyEvaluation evaluate(const EpidemicInstance& inst, Policy& policy, const EvaluationConfig& config) {
  if (config.horizon < 1) throw Error("horizon must be at least 1");
  if (config.n_starts < 1 || config.n_runs < 1) throw Error("need at least one start and one run");
  const SisSimulator sim(inst);
  const double gamma = config.discounted ? inst.params.gamma : 1.0;
  PolicyEvaluation e;
  e.config = config;
  e.policy = policy.kind();
  for (std::size_t s = 0; s < config.n_starts; ++s) {
    Rng start_rng = Rng::stream(config.seed, s, 0);
    SisState start(inst.n);
    for (auto& v : start) v = start_rng.bernoulli(0.5) ? 1 : 0;
    e.starts.push_back(start);
    std::vector<double> returns;
    for (std::size_t r = 0; r < config.n_runs; ++r) {
      Rng rng = Rng::stream(config.seed, s, r + 1);
      SisState x = start;
      double total = 0.0;
      double discount = 1.0;
      for (std::size_t t = 0; t < config.horizon; ++t) {
        const SisState a = policy.act(x, rng);
        const bool quiet = policy.deterministic() && std::none_of(x.begin(), x.end(), [](auto v) { return v; }) &&
                           std::none_of(a.begin(), a.end(), [](auto v) { return v; });
        if (quiet) break;  // all healthy and idle: every later reward is 0
        total += discount * sim.step(x, a, rng);
        discount *= gamma;
      }
      returns.push_back(total);
    }
    e.per_start.push_back(box_stats(returns));
    e.start_means.push_back(e.per_start.back().mean);
    e.returns.push_back(std::move(returns));
  }
  e.over_starts = box_stats(e.start_means);
  e.grand_mean = mean(e.start_means);
  return e;
}

void write_returns_csv(std::ostream& os, const PolicyEvaluation& e) {
  os << "start_id,run_id,return\n";
  for (std::size_t s = 0; s < e.returns.size(); ++s)
    for (std::size_t r = 0; r < e.returns[s].size(); ++r) os << s << ',' << r << ',' << format_double(e.returns[s][r]) << '\n';
}

namespace {

void box_row(std::ostream& os, const BoxStats& b) {
  os << format_double(b.mean) << ',' << format_double(b.median) << ',' << format_double(b.q1) << ','
     << format_double(b.q3) << ',' << format_double(b.lo_whisker) << ',' << format_double(b.hi_whisker) << '\n';
}

}  // namespace

void write_summary_csv(std::ostream& os, const PolicyEvaluation& e) {
  os << "start_id,mean,median,q1,q3,lo_whisker,hi_whisker\n";
  for (std::size_t s = 0; s < e.per_start.size(); ++s) {
    os << s << ',';
    box_row(os, e.per_start[s]);
  }
}

void write_box_csv(std::ostream& os, const std::vector<const PolicyEvaluation*>& evaluations) {
  os << "policy,mean,median,q1,q3,lo_whisker,hi_whisker\n";
  for (const auto* e : evaluations) {
    os << to_string(e->policy) << ',';
    box_row(os, e->over_starts);
  }
}

}  // namespace anonplan
