#pragma once
// Run configuration: flat "key = value" text with '#' comments.
//
// Every field has a key of the same name. Booleans accept true/false (and
// "auto" for the tri-state ones), lists are comma separated.
#include "ecs/potentials.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ecs {

struct RunConfig {
  std::string label;
  std::string problem = "hydrogenic"; // model1d | hydrogenic | water | oscillator

  // grid and basis
  double x_min = 0.0;
  double x_max = 100.0;
  int n_elements = 100;
  int order = 8;
  std::vector<double> extra_breakpoints;
  bool nuclear_breakpoint = true; // water: element boundary at r_oh
  std::optional<bool> zero_at_start; // unset: true for radial problems
  std::optional<bool> zero_at_end;   // unset: true only for propagation with scaling

  // channels
  std::string channel_mode = "fixed_m"; // fixed_m | full
  int m = 0;
  int channel_count = 8;
  int l_max = 2;
  double Z = 1.0;

  // scaling path
  double r0 = 10.0;
  double xi = 0.5;

  // field and scans
  double F0 = 0.0;
  std::string scan_axis = "F0";
  std::vector<double> scan_values;

  // selection
  std::optional<double> reference_energy;
  double re_min = -1e300;
  double re_max = 1e300;
  double max_abs_im = 1e300;

  // solver
  std::string solver = "auto"; // auto | dense | shift_invert
  int n_eigs = 30;
  int dense_limit = 1200;
  bool want_vectors = false;
  bool dump_matrices = false;
  int report_lowest = 0; // solve: also list this many lowest eigenvalues in the record

  // quadrature
  int node_count = 65;
  double singularity_offset = 1e-10;
  bool auto_refine = true;
  int n_theta = 40;
  int n_phi = 80;

  // water model
  double alpha_o = 1.6025;
  double alpha_h = 0.617;
  double n_o = 7.185;
  double n_h = 0.9075;
  double r_oh = 1.8140;
  double hoh_angle = 1.8238691;

  // propagation
  double t_on = 10.0;
  double t_end = 40.0;
  double dt = 0.002;
  double store_every = 0.05;
  double r_cut = 30.0;
  double t_fall = 18.75;
  double initial_reference = -0.5;
  double profile_every = 0.0; // 0: no profile snapshots
  double profile_dr = 0.1;

  bool inject_dc_sign_error = false;

  bool operator==(const RunConfig&) const = default;

  void validate() const;
  WaterPotentialParams water_params() const;
  bool radial() const { return problem == "hydrogenic" || problem == "water"; }
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& c);

// apply one "key=value" override
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

std::filesystem::path preset_directory();
std::vector<std::string> preset_names();
RunConfig load_preset(const std::string& name);

} // namespace ecs
