#pragma once

// Brute-force reference implementations used by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "anonplan/elimination.hpp"
#include "anonplan/epidemics.hpp"
#include "anonplan/error.hpp"
#include "anonplan/fmmdp.hpp"
#include "anonplan/mixed_factor.hpp"
#include "anonplan/random.hpp"

namespace oracle {

using namespace anonplan;

/// Calls fn for every joint assignment of `vars`, last variable fastest.
inline void for_each_assignment(const std::vector<ProperVar>& vars, const std::function<void(const Assignment&)>& fn) {
  Assignment a;
  std::vector<int> d(vars.size(), 0);
  for (const auto& v : vars) a.set(v.id, 0);
  while (true) {
    fn(a);
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++d[i] < vars[i].cardinality) {
        a.set(vars[i].id, d[i]);
        break;
      }
      d[i] = 0;
      a.set(vars[i].id, 0);
      if (i == 0) return;
    }
    if (vars.empty()) return;
  }
}

inline std::vector<ProperVar> binary_vars(std::initializer_list<VarId> ids) {
  std::vector<ProperVar> out;
  for (VarId id : ids) out.push_back({id, 2});
  return out;
}

/// Every variable mentioned by the factors, ascending id.
inline std::vector<ProperVar> scope_of(const std::vector<MixedModeFactor>& fs) {
  std::map<VarId, int> card;
  for (const auto& f : fs)
    for (VarId id : f.variables()) card[id] = f.shape().cardinality_of(id);
  std::vector<ProperVar> out;
  for (auto [id, c] : card) out.push_back({id, c});
  return out;
}

inline double brute_max(const std::vector<MixedModeFactor>& fs) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_assignment(scope_of(fs), [&](const Assignment& a) {
    double s = 0.0;
    for (const auto& f : fs) s += mmf_eval(f, a);
    best = std::max(best, s);
  });
  return fs.empty() ? 0.0 : best;
}

/// VE over the flattened factors with the greedy order.
inline double flat_ve(const std::vector<MixedModeFactor>& fs) {
  std::vector<MixedModeFactor> flat;
  for (const auto& f : fs) flat.push_back(MixedModeFactor::from_flat(flatten(f)));
  FactorSet set(flat);
  const auto vars = set.variables();
  const auto order = greedy_order(set, vars);
  return eliminate_max(std::move(set), order);
}

inline double rr_ve(const std::vector<MixedModeFactor>& fs, EliminationStats* stats = nullptr) {
  FactorSet set(fs);
  const auto vars = set.variables();
  const auto order = greedy_order(set, vars);
  return eliminate_max(std::move(set), order, stats);
}

/// Random mixed-mode factor over binary variables [0, n_vars): up to `max_proper`
/// proper variables and up to `max_counters` distinct counters of 1..max_counter
/// members, overlapping freely. Values are multiples of 1/8 so sums are exact.
inline MixedModeFactor random_factor(Rng& rng, int n_vars, int max_proper, int max_counters, int max_counter) {
  std::vector<VarId> pool(static_cast<std::size_t>(n_vars));
  for (int i = 0; i < n_vars; ++i) pool[static_cast<std::size_t>(i)] = static_cast<VarId>(i);
  auto sample = [&](int k) {
    std::vector<VarId> p = pool;
    for (int i = 0; i < k; ++i) std::swap(p[static_cast<std::size_t>(i)], p[i + rng.below(p.size() - static_cast<std::size_t>(i))]);
    std::vector<VarId> out(p.begin(), p.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<ProperVar> proper;
  for (VarId id : sample(static_cast<int>(rng.below(static_cast<std::uint64_t>(max_proper) + 1)))) proper.push_back({id, 2});
  std::set<std::vector<VarId>> seen;
  std::vector<CountScope> counters;
  const int nc = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_counters) + 1));
  for (int c = 0; c < nc; ++c) {
    auto members = sample(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(max_counter, n_vars)))));
    if (seen.insert(members).second) counters.emplace_back(members);
  }
  FactorShape shape(proper, counters);
  std::vector<double> table(shape.size());
  for (auto& v : table) v = static_cast<double>(static_cast<int>(rng.below(161)) - 80) / 8.0;
  return MixedModeFactor(std::move(shape), std::move(table));
}

/// The spec's canonical overlap pattern f(x, y, z, #1(a, b, z), #2(b, c)) with
/// x,y,z,a,b,c = 0..5 and table value = sum of the five digits.
inline MixedModeFactor canonical_factor() {
  return MixedModeFactor::tabulate(binary_vars({0, 1, 2}), {CountScope({2, 3, 4}), CountScope({4, 5})},
                                   [](std::span<const int> p, std::span<const int> k) {
                                     return static_cast<double>(p[0] + p[1] + p[2] + k[0] + k[1]);
                                   });
}

struct ReduceCheck {
  double max_error = 0.0;
  std::size_t checked = 0;         ///< valid result entries compared
  std::size_t mask_mismatches = 0; ///< entries whose validity disagrees with realizability
  std::size_t boundary = 0;        ///< checked entries with some count at 0 or |Z|
};

/// Compares `result` with the max (or sum) over `v` of `g`, computed by enumerating
/// every assignment of g's variables. Entries realized by no assignment must be
/// invalid and realized ones valid.
inline ReduceCheck check_removal(const MixedModeFactor& g, VarId v, const MixedModeFactor& result, bool sum) {
  const FactorShape& rs = result.shape();
  std::vector<double> expect(rs.size(), sum ? 0.0 : -std::numeric_limits<double>::infinity());
  std::vector<char> realized(rs.size(), 0);
  std::vector<ProperVar> vars;
  for (VarId id : g.variables()) vars.push_back({id, g.shape().cardinality_of(id)});
  // For sums, each result entry must be visited once per value of v with the rest fixed.
  std::vector<ProperVar> rest;
  for (const auto& p : vars)
    if (p.id != v) rest.push_back(p);
  for_each_assignment(rest, [&](const Assignment& base) {
    const std::size_t idx = rs.index_of(base);
    Assignment a = base;
    double acc = sum ? 0.0 : -std::numeric_limits<double>::infinity();
    for (int val = 0; val < g.shape().cardinality_of(v); ++val) {
      a.set(v, val);
      const double x = mmf_eval(g, a);
      acc = sum ? acc + x : std::max(acc, x);
    }
    // Assignments sharing proper values and counts must agree (f is a function of them).
    if (realized[idx] && !(std::abs(expect[idx] - acc) <= 1e-12)) acc = std::numeric_limits<double>::quiet_NaN();
    expect[idx] = acc;
    realized[idx] = 1;
  });
  ReduceCheck out;
  std::vector<int> digits(rs.dims());
  const std::size_t np = rs.proper().size();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (static_cast<bool>(realized[i]) != rs.valid(i)) ++out.mask_mismatches;
    if (!realized[i]) continue;
    ++out.checked;
    out.max_error = std::max(out.max_error, std::abs(result[i] - expect[i]));
    if (std::isnan(expect[i])) out.max_error = std::numeric_limits<double>::infinity();
    rs.decode(i, digits);
    for (std::size_t c = 0; c < rs.counters().size(); ++c) {
      const int k = digits[np + c];
      if (k == 0 || k == static_cast<int>(rs.counters()[c].size())) {
        ++out.boundary;
        break;
      }
    }
  }
  return out;
}

/// Value of V* for a single node under the SIS dynamics with no neighbours, by value
/// iteration: returns {V(healthy), V(infected)}.
inline std::pair<double, double> isolated_node_values(const SisParameters& p, bool controlled) {
  double v0 = 0.0;
  double v1 = 0.0;
  for (int it = 0; it < 100000; ++it) {
    double n0 = -std::numeric_limits<double>::infinity();
    double n1 = n0;
    for (int a = 0; a <= (controlled ? 1 : 0); ++a) {
      const double q0 = sis_infection_probability(p, 0, a, 0);
      const double q1 = sis_infection_probability(p, 1, a, 0);
      n0 = std::max(n0, -p.lambda1 * a + p.gamma * (q0 * v1 + (1 - q0) * v0));
      n1 = std::max(n1, -p.lambda2 - p.lambda1 * a + p.gamma * (q1 * v1 + (1 - q1) * v0));
    }
    const double delta = std::max(std::abs(n0 - v0), std::abs(n1 - v1));
    v0 = n0;
    v1 = n1;
    if (delta < 1e-13) break;
  }
  return {v0, v1};
}

/// Builds an instance, reseeding (seed, seed + 1000, ...) until the degree sequence is realizable.
inline EpidemicInstance graph_with_reseed(std::size_t n, int k_max, std::uint64_t seed, std::size_t controlled) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    try {
      EpidemicInstance inst = random_graph(n, k_max, seed + 1000 * attempt);
      select_controlled(inst, controlled);
      return inst;
    } catch (const Error&) {
      if (attempt > 50) throw;
    }
  }
}

}  // namespace oracle
