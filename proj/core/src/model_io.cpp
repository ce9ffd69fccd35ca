#include "anonplan/model_io.hpp"

#include <fstream>
#include <json.hpp>

#include "anonplan/error.hpp"

namespace anonplan {

using nlohmann::json;

namespace {

json variables_json(const VariableTable& vars) {
  json out = json::array();
  for (const auto& v : vars)
    out.push_back({{"id", v.id}, {"name", v.name}, {"kind", std::string(to_string(v.kind))}, {"cardinality", v.cardinality}});
  return out;
}

VariableTable variables_from(const json& j) {
  VariableTable vars;
  for (const auto& v : j) {
    const VarId id = vars.add(v.at("name").get<std::string>(), var_kind_from_string(v.at("kind").get<std::string>()),
                              v.at("cardinality").get<int>());
    if (v.contains("id") && v.at("id").get<VarId>() != id) throw Error("variable ids must be contiguous from 0");
  }
  return vars;
}

json factor_json(const MixedModeFactor& f) {
  const FactorShape& s = f.shape();
  json proper = json::array();
  for (const auto& p : s.proper()) proper.push_back(p.id);
  json counters = json::array();
  for (const auto& c : s.counters()) counters.push_back(std::vector<VarId>(c.members().begin(), c.members().end()));
  json entries = json::array();
  const std::size_t np = s.proper().size();
  std::vector<int> digits(s.dims());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.valid(i)) continue;
    s.decode(i, digits);
    entries.push_back({{"p", std::vector<int>(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(np))},
                       {"k", std::vector<int>(digits.begin() + static_cast<std::ptrdiff_t>(np), digits.end())},
                       {"v", f[i]}});
  }
  return {{"proper", proper}, {"counters", counters}, {"entries", entries}};
}

MixedModeFactor factor_from(const json& j, const VariableTable& vars) {
  std::vector<ProperVar> proper;
  for (const auto& id : j.at("proper")) {
    const VarId v = id.get<VarId>();
    if (!vars.contains(v)) throw Error("factor references unknown variable " + std::to_string(v));
    proper.push_back({v, vars.cardinality(v)});
  }
  std::vector<CountScope> counters;
  for (const auto& c : j.at("counters")) {
    std::vector<VarId> members = c.get<std::vector<VarId>>();
    for (VarId v : members)
      if (!vars.contains(v)) throw Error("counter references unknown variable " + std::to_string(v));
    counters.emplace_back(std::move(members));
  }
  FactorShape shape(std::move(proper), std::move(counters));
  std::vector<double> table(shape.size(), 0.0);
  for (const auto& e : j.at("entries")) {
    std::vector<int> digits = e.at("p").get<std::vector<int>>();
    const auto k = e.at("k").get<std::vector<int>>();
    digits.insert(digits.end(), k.begin(), k.end());
    if (digits.size() != shape.dims()) throw Error("factor entry has the wrong number of digits");
    for (std::size_t d = 0; d < digits.size(); ++d)
      if (digits[d] < 0 || static_cast<std::size_t>(digits[d]) >= shape.radix(d)) throw Error("factor entry digit out of range");
    table[shape.encode(digits)] = e.at("v").get<double>();
  }
  return MixedModeFactor(std::move(shape), std::move(table));
}

json parse(std::istream& is, const char* format) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid JSON: ") + e.what());
  }
  if (j.value("format", std::string()) != format) throw Error(std::string("expected format ") + format);
  return j;
}

template <class Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

void write_model(std::ostream& os, const FactoredModel& m) {
  json j;
  j["format"] = "anonplan-model/1";
  j["discount"] = m.discount;
  j["variables"] = variables_json(m.variables);
  j["state_vars"] = m.state_vars;
  j["action_vars"] = m.action_vars;
  j["next_state_vars"] = m.next_state_vars;
  j["cpds"] = json::array();
  for (const auto& f : m.cpds) j["cpds"].push_back(factor_json(f));
  j["rewards"] = json::array();
  for (const auto& f : m.rewards) j["rewards"].push_back(factor_json(f));
  os << j.dump(1) << '\n';
}

FactoredModel read_model(std::istream& is) {
  const json j = parse(is, "anonplan-model/1");
  return guarded([&] {
    FactoredModel m;
    m.discount = j.at("discount").get<double>();
    m.variables = variables_from(j.at("variables"));
    m.state_vars = j.at("state_vars").get<std::vector<VarId>>();
    m.action_vars = j.at("action_vars").get<std::vector<VarId>>();
    m.next_state_vars = j.at("next_state_vars").get<std::vector<VarId>>();
    for (const auto& f : j.at("cpds")) m.cpds.push_back(factor_from(f, m.variables));
    for (const auto& f : j.at("rewards")) m.rewards.push_back(factor_from(f, m.variables));
    m.validate();
    return m;
  });
}

void write_factor_file(std::ostream& os, const FactorFile& f) {
  json j;
  j["format"] = "anonplan-factors/1";
  j["variables"] = variables_json(f.variables);
  j["factors"] = json::array();
  for (const auto& g : f.factors) j["factors"].push_back(factor_json(g));
  if (f.order) j["order"] = *f.order;
  os << j.dump(1) << '\n';
}

FactorFile read_factor_file(std::istream& is) {
  const json j = parse(is, "anonplan-factors/1");
  return guarded([&] {
    FactorFile f;
    f.variables = variables_from(j.at("variables"));
    for (const auto& g : j.at("factors")) f.factors.push_back(factor_from(g, f.variables));
    if (j.contains("order")) f.order = j.at("order").get<EliminationOrder>();
    return f;
  });
}

FactorFile load_factor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_factor_file(in);
}

}  // namespace anonplan
