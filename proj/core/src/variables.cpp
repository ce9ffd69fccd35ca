#include "anonplan/variables.hpp"

#include <algorithm>

#include "anonplan/error.hpp"

namespace anonplan {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::state:
      return "state";
    case VarKind::action:
      return "action";
    case VarKind::next_state:
      return "next-state";
  }
  return "state";
}

VarKind var_kind_from_string(std::string_view text) {
  if (text == "state") return VarKind::state;
  if (text == "action") return VarKind::action;
  if (text == "next-state") return VarKind::next_state;
  throw Error("unknown variable kind '" + std::string(text) + "'");
}

VarId VariableTable::add(std::string name, VarKind kind, int cardinality) {
  if (cardinality < 2) throw Error("variable '" + name + "' needs cardinality >= 2");
  const auto id = static_cast<VarId>(vars_.size());
  vars_.push_back(Variable{id, std::move(name), kind, cardinality});
  return id;
}

const Variable& VariableTable::operator[](VarId id) const {
  if (id >= vars_.size()) throw Error("unknown variable id " + std::to_string(id));
  return vars_[id];
}

void Assignment::set(VarId id, int value) {
  if (value < 0) throw Error("negative value for variable " + std::to_string(id));
  if (id >= values_.size()) values_.resize(id + 1, kUnset);
  values_[id] = value;
}

void Assignment::erase(VarId id) {
  if (id < values_.size()) values_[id] = kUnset;
}

std::optional<int> Assignment::get(VarId id) const {
  if (!contains(id)) return std::nullopt;
  return values_[id];
}

int Assignment::at(VarId id) const {
  if (!contains(id)) throw Error("incomplete assignment: variable " + std::to_string(id) + " unset");
  return values_[id];
}

std::vector<VarId> Assignment::variables() const {
  std::vector<VarId> ids;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] != kUnset) ids.push_back(static_cast<VarId>(i));
  return ids;
}

std::size_t Assignment::size() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](int v) { return v != kUnset; }));
}

bool operator==(const Assignment& a, const Assignment& b) {
  const auto n = std::max(a.values_.size(), b.values_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int va = i < a.values_.size() ? a.values_[i] : Assignment::kUnset;
    const int vb = i < b.values_.size() ? b.values_[i] : Assignment::kUnset;
    if (va != vb) return false;
  }
  return true;
}

}  // namespace anonplan
