#include "anonplan/elimination.hpp"

#include <algorithm>
#include <string>

#include "anonplan/error.hpp"
#include "anonplan/format.hpp"

namespace anonplan {

FactorSet::FactorSet(std::vector<MixedModeFactor> factors) {
  for (auto& f : factors) add(std::move(f));
}

std::size_t FactorSet::add(MixedModeFactor f) {
  const std::size_t pos = slots_.size();
  for (VarId id : f.variables()) index_[id].insert(pos);
  slots_.emplace_back(std::move(f));
  ++live_count_;
  return pos;
}

MixedModeFactor FactorSet::take(std::size_t pos) {
  if (pos >= slots_.size() || !slots_[pos]) throw Error("no factor at position " + std::to_string(pos));
  MixedModeFactor f = std::move(*slots_[pos]);
  slots_[pos].reset();
  for (VarId id : f.variables()) {
    auto it = index_.find(id);
    it->second.erase(pos);
    if (it->second.empty()) index_.erase(it);
  }
  --live_count_;
  return f;
}

const MixedModeFactor& FactorSet::operator[](std::size_t pos) const {
  if (pos >= slots_.size() || !slots_[pos]) throw Error("no factor at position " + std::to_string(pos));
  return *slots_[pos];
}

std::vector<std::size_t> FactorSet::mentioning(VarId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<std::size_t> FactorSet::live() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i]) out.push_back(i);
  return out;
}

std::vector<VarId> FactorSet::variables() const {
  std::vector<VarId> ids;
  for (const auto& [id, _] : index_) ids.push_back(id);
  return ids;
}

bool FactorSet::index_consistent() const {
  std::map<VarId, std::set<std::size_t>> rebuilt;
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i])
      for (VarId id : slots_[i]->variables()) rebuilt[id].insert(i);
  return rebuilt == index_;
}

ScopeSketch ScopeSketch::of(const FactorShape& shape) {
  ScopeSketch s;
  s.proper.assign(shape.proper().begin(), shape.proper().end());
  std::sort(s.proper.begin(), s.proper.end());
  for (const auto& c : shape.counters()) s.counters.emplace_back(c.members().begin(), c.members().end());
  std::sort(s.counters.begin(), s.counters.end());
  return s;
}

bool ScopeSketch::mentions(VarId id) const {
  for (const auto& p : proper)
    if (p.id == id) return true;
  for (const auto& c : counters)
    if (std::binary_search(c.begin(), c.end(), id)) return true;
  return false;
}

double ScopeSketch::size() const {
  double s = 1.0;
  for (const auto& p : proper) s *= p.cardinality;
  for (const auto& c : counters) s *= static_cast<double>(c.size() + 1);
  return s;
}

ScopeSketch merged_sketch(std::span<const ScopeSketch* const> parts) {
  ScopeSketch out;
  for (const auto* p : parts) {
    out.proper.insert(out.proper.end(), p->proper.begin(), p->proper.end());
    out.counters.insert(out.counters.end(), p->counters.begin(), p->counters.end());
  }
  std::sort(out.proper.begin(), out.proper.end());
  out.proper.erase(std::unique(out.proper.begin(), out.proper.end()), out.proper.end());
  for (auto& c : out.counters)
    std::erase_if(c, [&](VarId id) {
      return std::binary_search(out.proper.begin(), out.proper.end(), ProperVar{id, 0},
                                [](const ProperVar& a, const ProperVar& b) { return a.id < b.id; });
    });
  std::erase_if(out.counters, [](const auto& c) { return c.empty(); });
  std::sort(out.counters.begin(), out.counters.end());
  out.counters.erase(std::unique(out.counters.begin(), out.counters.end()), out.counters.end());
  return out;
}

ScopeSketch eliminated_sketch(std::span<const ScopeSketch* const> parts, VarId v) {
  ScopeSketch out = merged_sketch(parts);
  std::erase_if(out.proper, [v](const ProperVar& p) { return p.id == v; });
  for (auto& c : out.counters) std::erase(c, v);
  std::erase_if(out.counters, [](const auto& c) { return c.empty(); });
  std::sort(out.counters.begin(), out.counters.end());
  out.counters.erase(std::unique(out.counters.begin(), out.counters.end()), out.counters.end());
  return out;
}

EliminationOrder greedy_order(std::vector<ScopeSketch> sketches, std::span<const VarId> candidates) {
  std::vector<VarId> remaining(candidates.begin(), candidates.end());
  std::sort(remaining.begin(), remaining.end());
  remaining.erase(std::unique(remaining.begin(), remaining.end()), remaining.end());

  std::vector<bool> alive(sketches.size(), true);
  EliminationOrder order;
  order.reserve(remaining.size());
  std::vector<const ScopeSketch*> parts;
  while (!remaining.empty()) {
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      parts.clear();
      for (std::size_t i = 0; i < sketches.size(); ++i)
        if (alive[i] && sketches[i].mentions(remaining[r])) parts.push_back(&sketches[i]);
      const double score = parts.empty() ? 1.0 : eliminated_sketch(parts, remaining[r]).size();
      if (r == 0 || score < best_score) {
        best = r;
        best_score = score;
      }
    }
    const VarId v = remaining[best];
    parts.clear();
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < sketches.size(); ++i)
      if (alive[i] && sketches[i].mentions(v)) {
        parts.push_back(&sketches[i]);
        used.push_back(i);
      }
    if (!parts.empty()) {
      ScopeSketch reduced = eliminated_sketch(parts, v);
      for (std::size_t i : used) alive[i] = false;
      sketches.push_back(std::move(reduced));
      alive.push_back(true);
    }
    order.push_back(v);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return order;
}

EliminationOrder greedy_order(const FactorSet& fs, std::span<const VarId> candidates) {
  std::vector<ScopeSketch> sketches;
  for (std::size_t pos : fs.live()) sketches.push_back(ScopeSketch::of(fs[pos].shape()));
  return greedy_order(std::move(sketches), candidates);
}

namespace {

struct Stage {
  VarId variable;
  std::optional<FactorShape> shape;  // reduced factor layout; empty if nothing mentioned the variable
  std::vector<std::uint8_t> best;
};

double run_elimination(FactorSet& fs, const EliminationOrder& order, std::vector<Stage>* stages,
                       EliminationStats* stats, const EliminationLimits& limits) {
  for (VarId v : order) {
    const auto positions = fs.mentioning(v);
    if (positions.empty()) {
      if (stages) stages->push_back(Stage{v, std::nullopt, {}});
      continue;
    }
    std::vector<ScopeSketch> sketches;
    for (std::size_t pos : positions) sketches.push_back(ScopeSketch::of(fs[pos].shape()));
    std::vector<const ScopeSketch*> parts;
    for (const auto& s : sketches) parts.push_back(&s);
    const double predicted = merged_sketch(parts).size();
    if (predicted > static_cast<double>(limits.max_entries))
      throw GuardExceeded("induced width too large: intermediate of " + format_double(predicted) + " entries");

    std::vector<MixedModeFactor> collected;
    for (std::size_t pos : positions) collected.push_back(fs.take(pos));
    std::vector<const MixedModeFactor*> ptrs;
    for (const auto& f : collected) ptrs.push_back(&f);
    MixedModeFactor augmented = augment_absorbed(ptrs);
    collected.clear();

    std::vector<std::uint8_t> best;
    MixedModeFactor reduced = reduce_max(augmented, v, stages ? &best : nullptr);
    if (stats) {
      stats->peak_augmented = std::max(stats->peak_augmented, augmented.size());
      stats->peak_reduced = std::max(stats->peak_reduced, reduced.size());
      stats->total_augmented += augmented.size();
    }
    if (stages) stages->push_back(Stage{v, reduced.shape(), std::move(best)});
    fs.add(std::move(reduced));
  }
  double total = 0.0;
  for (std::size_t pos : fs.live()) {
    const auto& f = fs[pos];
    if (!f.variables().empty()) throw Error("uneliminated variables remain");
    total += f[0];
  }
  return total;
}

}  // namespace

double eliminate_max(FactorSet fs, const EliminationOrder& order, EliminationStats* stats,
                     const EliminationLimits& limits) {
  return run_elimination(fs, order, nullptr, stats, limits);
}

ArgmaxResult eliminate_argmax(FactorSet fs, const EliminationOrder& order, EliminationStats* stats,
                              const EliminationLimits& limits) {
  std::vector<Stage> stages;
  ArgmaxResult out;
  out.value = run_elimination(fs, order, &stages, stats, limits);
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    if (!it->shape) {
      out.assignment.set(it->variable, 0);
      continue;
    }
    const std::size_t idx = it->shape->index_of(out.assignment);
    out.assignment.set(it->variable, it->best[idx]);
  }
  return out;
}

}  // namespace anonplan
