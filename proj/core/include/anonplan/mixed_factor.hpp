#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "anonplan/factor_shape.hpp"
#include "anonplan/variables.hpp"

namespace anonplan {

/// Full tabular factor; mixed-radix table with the first scope variable most significant.
struct FlatFactor {
  std::vector<ProperVar> scope;
  std::vector<double> table;

  FlatFactor() : table{0.0} {}
  FlatFactor(std::vector<ProperVar> scope, std::vector<double> table);

  std::size_t index_of(const Assignment& a) const;
  double eval(const Assignment& a) const { return table[index_of(a)]; }
};

/// Real-valued function of proper variables and count aggregators, stored in its
/// redundant representation (count tuples indexed directly, overlaps allowed).
/// Immutable once built.
class MixedModeFactor {
 public:
  /// Empty scope, single entry 0.
  MixedModeFactor();
  MixedModeFactor(FactorShape shape, std::vector<double> table);
  MixedModeFactor(std::vector<ProperVar> proper, std::vector<CountScope> counters, std::vector<double> table);

  static MixedModeFactor constant(double value);
  static MixedModeFactor from_flat(const FlatFactor& flat);
  /// Fills every entry (valid or not) with fn(proper values, count tuple).
  static MixedModeFactor tabulate(
      std::vector<ProperVar> proper, std::vector<CountScope> counters,
      const std::function<double(std::span<const int> proper_values, std::span<const int> counts)>& fn);

  const FactorShape& shape() const { return shape_; }
  std::span<const ProperVar> proper() const { return shape_.proper(); }
  std::span<const CountScope> counters() const { return shape_.counters(); }
  std::span<const double> table() const { return table_; }
  std::size_t size() const { return table_.size(); }
  /// Number of stored parameters (the representation size).
  std::size_t parameter_count() const { return table_.size(); }
  double operator[](std::size_t index) const { return table_[index]; }
  bool valid(std::size_t index) const { return shape_.valid(index); }
  bool mentions(VarId id) const { return shape_.mentions(id); }
  std::vector<VarId> variables() const { return shape_.variables(); }

 private:
  FactorShape shape_;
  std::vector<double> table_;
};

/// Evaluates f at a full assignment of its proper and count variables.
double mmf_eval(const MixedModeFactor& f, const Assignment& a);

/// Entrywise sum over the union scope; every entry is filled, validity is recomputed.
MixedModeFactor augment(const MixedModeFactor& g, const MixedModeFactor& h);
MixedModeFactor augment(std::span<const MixedModeFactor* const> factors);
/// Entrywise product; identity is the all-ones empty-scope factor.
/// Augment into the absorbed layout (see absorbed_merged_shape); pointwise equal to augment.
MixedModeFactor augment_absorbed(std::span<const MixedModeFactor* const> factors);
/// Equivalent factor whose counters exclude its proper variables.
MixedModeFactor absorb(const MixedModeFactor& g);

MixedModeFactor multiply(const MixedModeFactor& g, const MixedModeFactor& h);
MixedModeFactor multiply(std::span<const MixedModeFactor* const> factors);
MixedModeFactor scale(const MixedModeFactor& g, double factor);

/// Maxes out `v`. Each result entry takes the larger of the branch v=0 (counts k) and
/// v=1 (counts k + delta, delta_i = [v in Z_i]) among branches whose queried entry is
/// valid. If `best` is given it receives the winning value of v per result entry
/// (ties prefer the lower value).
MixedModeFactor reduce_max(const MixedModeFactor& g, VarId v, std::vector<std::uint8_t>* best = nullptr);
/// Sums out `v` over all of its values.
MixedModeFactor sum_out(const MixedModeFactor& g, VarId v);
/// Restricts `v` to `value` and drops it from the scope.
MixedModeFactor condition(const MixedModeFactor& g, VarId v, int value);
/// Conditions on every in-scope variable assigned in `a`.
MixedModeFactor condition(const MixedModeFactor& g, const Assignment& a);

/// Full table over the union of proper and count variables (ascending ids).
/// Throws Error("flatten too large") past `max_variables` variables.
FlatFactor flatten(const MixedModeFactor& g, std::size_t max_variables = 25);
/// Equivalent factor over mutually disjoint counters that avoid the proper scope.
MixedModeFactor shatter(const MixedModeFactor& g);

/// One line per entry: "proper-assignment | count-tuple | value", invalid entries prefixed with "!".
void dump(std::ostream& os, const MixedModeFactor& f);
std::string dump(const MixedModeFactor& f);

}  // namespace anonplan
