#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "anonplan/elimination.hpp"
#include "anonplan/fmmdp.hpp"

namespace anonplan {

/// JSON document "anonplan-model/1": variables, state/action/next-state id lists, CPD
/// and reward factors, discount. Factors list only their valid entries as
/// {"p": proper values, "k": counts, "v": value}.
void write_model(std::ostream& os, const FactoredModel& m);
FactoredModel read_model(std::istream& is);

/// JSON document "anonplan-factors/1": a factor graph for elimination and inspection.
struct FactorFile {
  VariableTable variables;
  std::vector<MixedModeFactor> factors;
  std::optional<EliminationOrder> order;
};

void write_factor_file(std::ostream& os, const FactorFile& f);
FactorFile read_factor_file(std::istream& is);
FactorFile load_factor_file(const std::filesystem::path& path);

}  // namespace anonplan
