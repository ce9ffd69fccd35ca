#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anonplan {

using VarId = std::uint32_t;

enum class VarKind { state, action, next_state };

std::string_view to_string(VarKind kind);
VarKind var_kind_from_string(std::string_view text);

struct Variable {
  VarId id = 0;
  std::string name;
  VarKind kind = VarKind::state;
  int cardinality = 2;
};

/// Dense, contiguous registry of model variables.
class VariableTable {
 public:
  VarId add(std::string name, VarKind kind, int cardinality = 2);

  const Variable& operator[](VarId id) const;
  std::size_t size() const { return vars_.size(); }
  bool contains(VarId id) const { return id < vars_.size(); }
  int cardinality(VarId id) const { return (*this)[id].cardinality; }

  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

 private:
  std::vector<Variable> vars_;
};

/// Partial assignment of values to variables, stored densely by id.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t capacity) : values_(capacity, kUnset) {}

  void set(VarId id, int value);
  void erase(VarId id);
  std::optional<int> get(VarId id) const;
  bool contains(VarId id) const { return id < values_.size() && values_[id] != kUnset; }
  /// Value of `id`; throws Error("incomplete assignment") when unset.
  int at(VarId id) const;

  /// Ids with a value, ascending.
  std::vector<VarId> variables() const;
  std::size_t size() const;

  friend bool operator==(const Assignment& a, const Assignment& b);

 private:
  static constexpr int kUnset = -1;
  std::vector<int> values_;
};

}  // namespace anonplan
