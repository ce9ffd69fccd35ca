#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "anonplan/lp_model.hpp"

namespace anonplan {

/// Writes `lp` in CPLEX LP text format: a Minimize section, one named ">=" row per
/// constraint (variables moved left, constant right), and a Bounds section declaring
/// every variable free. `comments` become leading backslash comment lines.
/// An objective constant is not representable and is written as a comment.
void write_lp(std::ostream& os, const LinearProgramModel& lp, const std::vector<std::string>& comments = {});
void export_lp(const LinearProgramModel& lp, const std::filesystem::path& path,
               const std::vector<std::string>& comments = {});
std::string lp_to_string(const LinearProgramModel& lp, const std::vector<std::string>& comments = {});

/// Reads files produced by write_lp. Variables named w_* are weights, all others
/// auxiliary; the objective constant is restored from its comment.
LinearProgramModel read_lp(std::istream& is);
LinearProgramModel import_lp(const std::filesystem::path& path);

}  // namespace anonplan
