#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "anonplan/mixed_factor.hpp"

namespace anonplan {

/// Factors plus an index from each variable to the factors mentioning it.
class FactorSet {
 public:
  FactorSet() = default;
  explicit FactorSet(std::vector<MixedModeFactor> factors);

  std::size_t add(MixedModeFactor f);
  MixedModeFactor take(std::size_t pos);
  const MixedModeFactor& operator[](std::size_t pos) const;

  /// Live positions of factors mentioning `id` (as proper or count variable), ascending.
  std::vector<std::size_t> mentioning(VarId id) const;
  std::vector<std::size_t> live() const;
  std::vector<VarId> variables() const;
  std::size_t size() const { return live_count_; }
  bool empty() const { return live_count_ == 0; }

  /// Rebuilds the index from scratch and compares (test hook).
  bool index_consistent() const;

 private:
  std::vector<std::optional<MixedModeFactor>> slots_;
  std::map<VarId, std::set<std::size_t>> index_;
  std::size_t live_count_ = 0;
};

using EliminationOrder = std::vector<VarId>;

/// Scope of a factor without its table; enough to predict representation sizes.
struct ScopeSketch {
  std::vector<ProperVar> proper;                ///< sorted by id
  std::vector<std::vector<VarId>> counters;     ///< sorted, unique

  static ScopeSketch of(const FactorShape& shape);
  bool mentions(VarId id) const;
  /// Entries of the redundant representation: prod cardinalities * prod (|Z|+1).
  double size() const;
};

/// Sketch of the absorbed Augment over `parts` (see absorbed_merged_shape).
ScopeSketch merged_sketch(std::span<const ScopeSketch* const> parts);
/// Sketch of the absorbed Augment over `parts` followed by removal of `v`.
ScopeSketch eliminated_sketch(std::span<const ScopeSketch* const> parts, VarId v);

/// Greedy min-size heuristic: repeatedly picks the candidate whose elimination yields
/// the smallest post-reduce representation, ties to the lowest id.
EliminationOrder greedy_order(std::vector<ScopeSketch> sketches, std::span<const VarId> candidates);
EliminationOrder greedy_order(const FactorSet& fs, std::span<const VarId> candidates);

struct EliminationLimits {
  /// Abort with GuardExceeded when an augmented table would exceed this many entries.
  std::size_t max_entries = std::numeric_limits<std::size_t>::max();
};

struct EliminationStats {
  std::size_t peak_augmented = 0;
  std::size_t peak_reduced = 0;
  std::size_t total_augmented = 0;
};

/// Max over all assignments of the sum of the factors, by Collect/Augment/Reduce along
/// `order`. Augment targets the absorbed layout. Throws Error("uneliminated variables remain") if the order is incomplete.
double eliminate_max(FactorSet fs, const EliminationOrder& order, EliminationStats* stats = nullptr,
                     const EliminationLimits& limits = {});

struct ArgmaxResult {
  double value = 0.0;
  Assignment assignment;
};

/// As eliminate_max, and recovers a maximizing assignment of every variable in `order`
/// by replaying the per-stage best branches in reverse.
ArgmaxResult eliminate_argmax(FactorSet fs, const EliminationOrder& order, EliminationStats* stats = nullptr,
                              const EliminationLimits& limits = {});

}  // namespace anonplan
