#include "anonplan/factor_shape.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "anonplan/error.hpp"

namespace anonplan {

namespace {

constexpr std::size_t kMaxEntries = std::size_t{1} << 40;

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > kMaxEntries / a) throw Error("factor too large to materialize");
  return a * b;
}

}  // namespace

CountScope::CountScope(std::vector<VarId> members) : members_(std::move(members)) {
  if (members_.empty()) throw Error("count scope must be non-empty");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw Error("count scope has duplicate members");
}

bool CountScope::contains(VarId id) const {
  return std::binary_search(members_.begin(), members_.end(), id);
}

int count_eval(const CountScope& scope, const Assignment& a) {
  int total = 0;
  for (VarId m : scope.members()) total += a.at(m);
  return total;
}

FactorShape::FactorShape() = default;

FactorShape::FactorShape(std::vector<ProperVar> proper, std::vector<CountScope> counters)
    : proper_(std::move(proper)), counters_(std::move(counters)) {
  for (std::size_t i = 0; i < proper_.size(); ++i) {
    if (proper_[i].cardinality < 2)
      throw Error("proper variable " + std::to_string(proper_[i].id) + " needs cardinality >= 2");
    for (std::size_t j = 0; j < i; ++j)
      if (proper_[j].id == proper_[i].id)
        throw Error("duplicate proper variable " + std::to_string(proper_[i].id));
  }
  for (std::size_t i = 0; i < counters_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (counters_[i] == counters_[j]) throw Error("duplicate counter scope");
  for (const auto& c : counters_)
    for (VarId m : c.members())
      if (auto pos = proper_position(m); pos && proper_[*pos].cardinality != 2)
        throw Error("count variable " + std::to_string(m) + " must be binary");

  radix_.reserve(proper_.size() + counters_.size());
  for (const auto& p : proper_) radix_.push_back(static_cast<std::size_t>(p.cardinality));
  for (const auto& c : counters_) radix_.push_back(c.size() + 1);
  stride_.assign(radix_.size(), 1);
  size_ = 1;
  for (std::size_t d = radix_.size(); d-- > 0;) {
    stride_[d] = size_;
    size_ = checked_mul(size_, radix_[d]);
  }
  count_space_ = 1;
  for (const auto& c : counters_) count_space_ *= c.size() + 1;
  compute_validity();
}

bool FactorShape::mentions(VarId id) const {
  if (proper_position(id)) return true;
  return std::any_of(counters_.begin(), counters_.end(), [id](const CountScope& c) { return c.contains(id); });
}

std::optional<std::size_t> FactorShape::proper_position(VarId id) const {
  for (std::size_t i = 0; i < proper_.size(); ++i)
    if (proper_[i].id == id) return i;
  return std::nullopt;
}

std::vector<VarId> FactorShape::variables() const {
  std::vector<VarId> ids;
  for (const auto& p : proper_) ids.push_back(p.id);
  for (const auto& c : counters_) ids.insert(ids.end(), c.members().begin(), c.members().end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int FactorShape::cardinality_of(VarId id) const {
  if (auto pos = proper_position(id)) return proper_[*pos].cardinality;
  if (mentions(id)) return 2;
  throw Error("variable not in factor: " + std::to_string(id));
}

std::size_t FactorShape::unit(VarId id) const {
  std::size_t u = 0;
  if (auto pos = proper_position(id)) u += stride_[*pos];
  for (std::size_t i = 0; i < counters_.size(); ++i)
    if (counters_[i].contains(id)) u += stride_[proper_.size() + i];
  return u;
}

std::size_t FactorShape::index_of(const Assignment& a) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < proper_.size(); ++i) {
    const int v = a.at(proper_[i].id);
    if (v >= proper_[i].cardinality)
      throw Error("value out of range for variable " + std::to_string(proper_[i].id));
    idx += static_cast<std::size_t>(v) * stride_[i];
  }
  for (std::size_t i = 0; i < counters_.size(); ++i)
    idx += static_cast<std::size_t>(count_eval(counters_[i], a)) * stride_[proper_.size() + i];
  return idx;
}

std::size_t FactorShape::encode(std::span<const int> digits) const {
  if (digits.size() != radix_.size()) throw Error("digit count does not match factor shape");
  std::size_t idx = 0;
  for (std::size_t d = 0; d < radix_.size(); ++d) {
    if (digits[d] < 0 || static_cast<std::size_t>(digits[d]) >= radix_[d]) throw Error("digit out of range");
    idx += static_cast<std::size_t>(digits[d]) * stride_[d];
  }
  return idx;
}

void FactorShape::decode(std::size_t index, std::span<int> digits) const {
  for (std::size_t d = 0; d < radix_.size(); ++d) {
    digits[d] = static_cast<int>(index / stride_[d]);
    index %= stride_[d];
  }
}

std::size_t FactorShape::valid_count() const {
  if (!mask_) return size_;
  return static_cast<std::size_t>(std::count(mask_->begin(), mask_->end(), std::uint8_t{1}));
}

// Reachable count tuples are built atom by atom: count variables that are not proper
// are grouped by the set of counters containing them, and an atom of multiplicity m
// may add any t in [0, m] to each of its counters.
void FactorShape::compute_validity() {
  const std::size_t n_counters = counters_.size();
  if (n_counters == 0) return;

  std::map<VarId, std::vector<std::size_t>> membership;
  for (std::size_t i = 0; i < n_counters; ++i)
    for (VarId m : counters_[i].members()) membership[m].push_back(i);

  bool overlap = false;
  for (const auto& [id, list] : membership)
    if (list.size() > 1 || proper_position(id)) overlap = true;
  if (!overlap) return;

  const std::size_t n_proper = proper_.size();
  std::vector<std::size_t> cstride(n_counters), csize(n_counters);
  for (std::size_t i = 0; i < n_counters; ++i) {
    cstride[i] = stride_[n_proper + i];
    csize[i] = counters_[i].size();
  }
  auto count_digit = [&](std::size_t cidx, std::size_t i) { return (cidx / cstride[i]) % (csize[i] + 1); };

  std::map<std::vector<std::size_t>, std::size_t> atoms;
  for (const auto& [id, list] : membership)
    if (!proper_position(id)) ++atoms[list];

  std::vector<std::uint8_t> reach(count_space_, 0);
  reach[0] = 1;
  for (const auto& [signature, multiplicity] : atoms) {
    std::size_t step = 0;
    for (std::size_t i : signature) step += cstride[i];
    for (std::size_t rep = 0; rep < multiplicity; ++rep) {
      for (std::size_t c = count_space_; c-- > 0;) {
        if (!reach[c]) continue;
        bool room = true;
        for (std::size_t i : signature)
          if (count_digit(c, i) >= csize[i]) {
            room = false;
            break;
          }
        if (room) reach[c + step] = 1;
      }
    }
  }

  // Proper members fix part of each count; an entry is valid iff the residual is reachable.
  std::vector<std::vector<std::size_t>> proper_in(n_proper);
  for (std::size_t p = 0; p < n_proper; ++p)
    if (auto it = membership.find(proper_[p].id); it != membership.end()) proper_in[p] = it->second;

  auto mask = std::make_shared<std::vector<std::uint8_t>>(size_, 0);
  std::vector<int> pdigit(n_proper, 0);
  std::vector<std::size_t> fixed(n_counters);
  const std::size_t n_proper_entries = proper_space();
  for (std::size_t pe = 0; pe < n_proper_entries; ++pe) {
    std::fill(fixed.begin(), fixed.end(), 0);
    std::size_t fixed_offset = 0;
    for (std::size_t p = 0; p < n_proper; ++p)
      if (pdigit[p] == 1)
        for (std::size_t i : proper_in[p]) {
          ++fixed[i];
          fixed_offset += cstride[i];
        }
    std::uint8_t* row = mask->data() + pe * count_space_;
    for (std::size_t c = 0; c < count_space_; ++c) {
      bool ok = true;
      for (std::size_t i = 0; i < n_counters; ++i)
        if (count_digit(c, i) < fixed[i]) {
          ok = false;
          break;
        }
      row[c] = (ok && reach[c - fixed_offset]) ? 1 : 0;
    }
    for (std::size_t p = n_proper; p-- > 0;) {
      if (++pdigit[p] < proper_[p].cardinality) break;
      pdigit[p] = 0;
    }
  }
  mask_ = std::move(mask);
}

bool consistent(std::span<const CountScope> counters, const Assignment& proper_values,
                std::span<const int> counts) {
  if (counts.size() != counters.size()) throw Error("count tuple does not match counters");
  for (std::size_t i = 0; i < counters.size(); ++i)
    if (counts[i] < 0 || static_cast<std::size_t>(counts[i]) > counters[i].size()) return false;

  std::map<VarId, int> occurrences;
  for (const auto& c : counters)
    for (VarId m : c.members()) ++occurrences[m];

  std::vector<VarId> shared;
  std::vector<VarId> fixed;
  for (const auto& [id, n] : occurrences) {
    if (proper_values.contains(id))
      fixed.push_back(id);
    else if (n > 1)
      shared.push_back(id);
  }
  auto is_shared = [&](VarId id) {
    return proper_values.contains(id) || occurrences[id] > 1;
  };
  std::vector<int> free_members(counters.size(), 0);
  for (std::size_t i = 0; i < counters.size(); ++i)
    for (VarId m : counters[i].members())
      if (!is_shared(m)) ++free_members[i];

  if (shared.size() >= 63) throw Error("too many shared count variables to enumerate");
  const std::uint64_t combos = std::uint64_t{1} << shared.size();
  for (std::uint64_t bits = 0; bits < combos; ++bits) {
    bool ok = true;
    for (std::size_t i = 0; i < counters.size() && ok; ++i) {
      int residual = counts[i];
      for (VarId m : counters[i].members()) {
        if (auto v = proper_values.get(m)) {
          residual -= *v;
        } else if (auto it = std::lower_bound(shared.begin(), shared.end(), m);
                   it != shared.end() && *it == m) {
          residual -= static_cast<int>((bits >> (it - shared.begin())) & 1u);
        }
      }
      ok = residual >= 0 && residual <= free_members[i];
    }
    if (ok) return true;
  }
  return false;
}

FactorShape merged_shape(std::span<const FactorShape* const> shapes) {
  std::vector<ProperVar> proper;
  std::vector<CountScope> counters;
  for (const FactorShape* s : shapes) {
    proper.insert(proper.end(), s->proper().begin(), s->proper().end());
    counters.insert(counters.end(), s->counters().begin(), s->counters().end());
  }
  std::sort(proper.begin(), proper.end());
  proper.erase(std::unique(proper.begin(), proper.end()), proper.end());
  for (std::size_t i = 1; i < proper.size(); ++i)
    if (proper[i].id == proper[i - 1].id)
      throw Error("variable " + std::to_string(proper[i].id) + " has conflicting cardinalities");
  std::sort(counters.begin(), counters.end());
  counters.erase(std::unique(counters.begin(), counters.end()), counters.end());
  return FactorShape(std::move(proper), std::move(counters));
}

FactorShape absorbed_merged_shape(std::span<const FactorShape* const> shapes) {
  const FactorShape plain_scope = [&] {
    std::vector<ProperVar> proper;
    for (const FactorShape* s : shapes) proper.insert(proper.end(), s->proper().begin(), s->proper().end());
    std::sort(proper.begin(), proper.end());
    proper.erase(std::unique(proper.begin(), proper.end()), proper.end());
    for (std::size_t i = 1; i < proper.size(); ++i)
      if (proper[i].id == proper[i - 1].id)
        throw Error("variable " + std::to_string(proper[i].id) + " has conflicting cardinalities");
    return FactorShape(std::move(proper), {});
  }();
  std::vector<CountScope> counters;
  for (const FactorShape* s : shapes)
    for (const auto& c : s->counters()) {
      std::vector<VarId> rest;
      for (VarId id : c.members())
        if (!plain_scope.proper_position(id)) rest.push_back(id);
      if (!rest.empty()) counters.emplace_back(std::move(rest));
    }
  std::sort(counters.begin(), counters.end());
  counters.erase(std::unique(counters.begin(), counters.end()), counters.end());
  return FactorShape(std::vector<ProperVar>(plain_scope.proper().begin(), plain_scope.proper().end()),
                     std::move(counters));
}

IndexMap absorbed_embed(const FactorShape& target, const FactorShape& source) {
  IndexMap map;
  map.step.assign(target.dims(), 0);
  const std::size_t tp = target.proper().size();
  for (const auto& p : source.proper())
    if (!target.proper_position(p.id)) throw Error("embed: proper variable missing from target");
  for (std::size_t d = 0; d < tp; ++d) {
    const VarId id = target.proper()[d].id;
    if (source.mentions(id)) map.step[d] = source.unit(id);
  }
  const std::size_t sp = source.proper().size();
  const auto tc = target.counters();
  for (std::size_t i = 0; i < source.counters().size(); ++i) {
    std::vector<VarId> rest;
    for (VarId id : source.counters()[i].members())
      if (!target.proper_position(id)) rest.push_back(id);
    if (rest.empty()) continue;
    const CountScope reduced(std::move(rest));
    const auto it = std::find(tc.begin(), tc.end(), reduced);
    if (it == tc.end()) throw Error("embed: counter missing from target");
    map.step[tp + static_cast<std::size_t>(it - tc.begin())] += source.stride(sp + i);
  }
  return map;
}

IndexMap embed(const FactorShape& target, const FactorShape& source) {
  IndexMap map;
  map.step.assign(target.dims(), 0);
  const std::size_t tp = target.proper().size();
  for (std::size_t d = 0; d < source.proper().size(); ++d) {
    const auto pos = target.proper_position(source.proper()[d].id);
    if (!pos) throw Error("embed: proper variable missing from target");
    map.step[*pos] += source.stride(d);
  }
  const std::size_t sp = source.proper().size();
  for (std::size_t i = 0; i < source.counters().size(); ++i) {
    const auto& c = source.counters()[i];
    const auto tc = target.counters();
    const auto it = std::find(tc.begin(), tc.end(), c);
    if (it == tc.end()) throw Error("embed: counter missing from target");
    map.step[tp + static_cast<std::size_t>(it - tc.begin())] += source.stride(sp + i);
  }
  return map;
}

Removal plan_removal(const FactorShape& source, std::span<const VarId> vars) {
  auto removed = [&](VarId id) { return std::find(vars.begin(), vars.end(), id) != vars.end(); };
  for (VarId v : vars)
    if (!source.mentions(v)) throw Error("variable not in factor: " + std::to_string(v));

  std::vector<ProperVar> proper;
  std::vector<std::optional<std::size_t>> proper_target(source.proper().size());
  for (std::size_t p = 0; p < source.proper().size(); ++p) {
    if (removed(source.proper()[p].id)) continue;
    proper_target[p] = proper.size();
    proper.push_back(source.proper()[p]);
  }

  std::vector<std::optional<CountScope>> shrunk(source.counters().size());
  std::vector<CountScope> counters;
  for (std::size_t i = 0; i < source.counters().size(); ++i) {
    std::vector<VarId> members;
    for (VarId m : source.counters()[i].members())
      if (!removed(m)) members.push_back(m);
    if (members.empty()) continue;
    shrunk[i] = CountScope(std::move(members));
    counters.push_back(*shrunk[i]);
  }
  std::sort(counters.begin(), counters.end());
  counters.erase(std::unique(counters.begin(), counters.end()), counters.end());

  Removal out{FactorShape(std::move(proper), std::move(counters)), {}, {}, {}};
  const FactorShape& result = out.result;
  out.map.step.assign(result.dims(), 0);
  for (std::size_t p = 0; p < source.proper().size(); ++p)
    if (proper_target[p]) out.map.step[*proper_target[p]] += source.stride(p);
  const std::size_t sp = source.proper().size();
  const std::size_t rp = result.proper().size();
  const auto rc = result.counters();
  for (std::size_t i = 0; i < shrunk.size(); ++i) {
    if (!shrunk[i]) continue;
    const auto it = std::lower_bound(rc.begin(), rc.end(), *shrunk[i]);
    out.map.step[rp + static_cast<std::size_t>(it - rc.begin())] += source.stride(sp + i);
  }
  for (VarId v : vars) {
    out.unit.push_back(source.unit(v));
    out.cardinality.push_back(source.cardinality_of(v));
  }
  return out;
}

}  // namespace anonplan
