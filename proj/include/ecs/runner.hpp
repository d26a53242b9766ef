#pragma once
// Config-driven workflows behind the command line tool.
#include "ecs/config.hpp"
#include "ecs/spectral.hpp"
#include "ecs/tdse.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ecs {

struct CommandContext {
  std::filesystem::path out_dir = ".";
  int threads = 1;
  unsigned seed = 12345;
  std::ostream* log = nullptr;
};

// grid with the configured extra breakpoints (and r_oh for water)
ElementGrid build_grid(const RunConfig& c);
ScalingPath build_path(const RunConfig& c, const ElementGrid& grid);
AssembledSystem build_system(const RunConfig& c, int threads = 1);
SolverOptions solver_options(const RunConfig& c);
SelectionConstraints selection_constraints(const RunConfig& c);

// solve and (if a reference energy is configured) select
SpectralResult solve_config(const RunConfig& c, int threads = 1);

nlohmann::json config_to_json(const RunConfig& c);

nlohmann::json cmd_solve(const RunConfig& c, const CommandContext& ctx);
nlohmann::json cmd_scan(const RunConfig& c, const CommandContext& ctx);
nlohmann::json cmd_propagate(const RunConfig& c, const CommandContext& ctx);
nlohmann::json cmd_fcrit(const RunConfig& c, const CommandContext& ctx);
nlohmann::json cmd_validate(const RunConfig& c, const CommandContext& ctx);

// write through a temporary file and rename into place
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_number(double v);

} // namespace ecs
