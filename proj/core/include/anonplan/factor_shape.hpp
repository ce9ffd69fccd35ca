#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "anonplan/variables.hpp"

namespace anonplan {

/// A variable whose identity matters in a factor (as opposed to a count variable).
struct ProperVar {
  VarId id = 0;
  int cardinality = 2;

  friend auto operator<=>(const ProperVar&, const ProperVar&) = default;
};

/// Sorted, non-empty set of binary variables summarized by a count aggregator.
class CountScope {
 public:
  explicit CountScope(std::vector<VarId> members);

  std::span<const VarId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(VarId id) const;

  friend auto operator<=>(const CountScope&, const CountScope&) = default;
  friend bool operator==(const CountScope&, const CountScope&) = default;

 private:
  std::vector<VarId> members_;
};

/// Number of members of `scope` assigned 1. Throws on a missing member.
int count_eval(const CountScope& scope, const Assignment& a);

/// Table layout of a mixed-mode factor.
///
/// Digits are the proper variables in scope order followed by one count digit per
/// counter (radix |Z|+1); the first digit is the most significant. The shape also
/// owns the validity mask: an entry is valid iff some assignment to the counter
/// members agrees with the entry's proper values and realizes its count tuple.
class FactorShape {
 public:
  FactorShape();
  FactorShape(std::vector<ProperVar> proper, std::vector<CountScope> counters);

  std::span<const ProperVar> proper() const { return proper_; }
  std::span<const CountScope> counters() const { return counters_; }

  std::size_t dims() const { return radix_.size(); }
  std::size_t radix(std::size_t dim) const { return radix_[dim]; }
  std::size_t stride(std::size_t dim) const { return stride_[dim]; }
  std::span<const std::size_t> radices() const { return radix_; }
  std::size_t size() const { return size_; }
  std::size_t count_space() const { return count_space_; }
  std::size_t proper_space() const { return size_ / count_space_; }

  bool mentions(VarId id) const;
  std::optional<std::size_t> proper_position(VarId id) const;
  /// Union of proper and count variables, ascending.
  std::vector<VarId> variables() const;
  /// Cardinality of an in-scope variable (count-only variables are binary).
  int cardinality_of(VarId id) const;
  /// Index offset contributed by one unit of `id`'s value: its proper stride plus the
  /// strides of every counter containing it. Table index = sum of value * unit.
  std::size_t unit(VarId id) const;

  std::size_t index_of(const Assignment& a) const;
  std::size_t encode(std::span<const int> digits) const;
  void decode(std::size_t index, std::span<int> digits) const;

  bool valid(std::size_t index) const { return !mask_ || (*mask_)[index] != 0; }
  /// True when no entry can be inconsistent (disjoint counters, no proper/count overlap).
  bool all_valid() const { return !mask_; }
  std::size_t valid_count() const;

  /// Same scope, same digit order.
  bool same_layout(const FactorShape& other) const {
    return proper_ == other.proper_ && counters_ == other.counters_;
  }

 private:
  void compute_validity();

  std::vector<ProperVar> proper_;
  std::vector<CountScope> counters_;
  std::vector<std::size_t> radix_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
  std::size_t count_space_ = 1;
  std::shared_ptr<const std::vector<std::uint8_t>> mask_;
};

/// Consistency of a count combination, decided by enumerating the shared variables
/// (members of two or more counters, or fixed through `proper_values`) and checking
/// each counter's residual against its free non-shared members.
bool consistent(std::span<const CountScope> counters, const Assignment& proper_values,
                std::span<const int> counts);

/// Addresses a source table from a target layout:
/// source offset = base + sum over target digits of digit * step[digit].
struct IndexMap {
  std::vector<std::size_t> step;
  std::size_t base = 0;
};

/// Sorted union of scopes; identical-member counters collapse into one digit.
FactorShape merged_shape(std::span<const FactorShape* const> shapes);

/// Union of scopes with every proper variable absorbed out of the counters: counters
/// lose their proper members, emptied counters vanish, duplicates collapse. Entries
/// correspond one-to-one with the merged layout's valid entries (a count k becomes
/// k minus the proper members' values) while far fewer entries are inconsistent.
FactorShape absorbed_merged_shape(std::span<const FactorShape* const> shapes);

/// Map from an absorbed target (see absorbed_merged_shape) to a source it covers.
IndexMap absorbed_embed(const FactorShape& target, const FactorShape& source);

/// Map from a target layout to a source whose proper variables and counters all
/// appear (identically) in the target.
IndexMap embed(const FactorShape& target, const FactorShape& source);

/// Result of removing variables from a shape (maxing out, summing out, conditioning).
struct Removal {
  FactorShape result;
  IndexMap map;  ///< source offset of the result entry with every removed variable at 0
  std::vector<std::size_t> unit;  ///< per removed variable: source offset per unit of value
  std::vector<int> cardinality;   ///< per removed variable
};

/// Drops `vars` from the proper scope and from every counter; counters emptied by the
/// removal are deleted and counters that become identical are merged. A result entry
/// with counts k reads the source at counts k + (value of each removed member).
Removal plan_removal(const FactorShape& source, std::span<const VarId> vars);

/// Odometer over every entry of `target`, tracking one source offset per map.
/// `fn(target_index, offsets)` sees offsets[m] = maps[m] applied to the current digits.
template <class Fn>
void walk(const FactorShape& target, std::span<const IndexMap> maps, Fn&& fn) {
  const std::size_t dims = target.dims();
  const std::size_t n_maps = maps.size();
  std::vector<std::size_t> digit(dims, 0);
  std::vector<std::size_t> offset(n_maps);
  for (std::size_t m = 0; m < n_maps; ++m) offset[m] = maps[m].base;
  const std::size_t total = target.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    fn(idx, static_cast<const std::size_t*>(offset.data()));
    for (std::size_t d = dims; d-- > 0;) {
      if (++digit[d] < target.radix(d)) {
        for (std::size_t m = 0; m < n_maps; ++m) offset[m] += maps[m].step[d];
        break;
      }
      digit[d] = 0;
      const std::size_t back = target.radix(d) - 1;
      for (std::size_t m = 0; m < n_maps; ++m) offset[m] -= maps[m].step[d] * back;
    }
  }
}

}  // namespace anonplan
