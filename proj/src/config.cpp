#include "ecs/config.hpp"

#include "ecs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace ecs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty())
      return d;
  } catch (...) {
  }
  throw ConfigError(key + ": '" + v + "' is not a number");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (trim(v.substr(pos)).empty())
      return static_cast<int>(d);
  } catch (...) {
  }
  throw ConfigError(key + ": '" + v + "' is not an integer");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::string pi_expanded(const std::string& v) {
  // allow "pi/2" style angles
  if (v == "pi")
    return fmt_double(std::numbers::pi);
  if (v.rfind("pi/", 0) == 0)
    return fmt_double(std::numbers::pi / std::stod(v.substr(3)));
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty())
      out.push_back(to_double(key, pi_expanded(trim(item))));
  return out;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define ECS_DOUBLE(name)                                                                         \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_double(#name, v); },          \
        [](const RunConfig& c) { return fmt_double(c.name); }}
#define ECS_INT(name)                                                                            \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_int(#name, v); },             \
        [](const RunConfig& c) { return std::to_string(c.name); }}
#define ECS_BOOL(name)                                                                           \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_bool(#name, v); },            \
        [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }}
#define ECS_STRING(name)                                                                         \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = v; },                           \
        [](const RunConfig& c) { return c.name; }}
#define ECS_TRISTATE(name)                                                                       \
  Field{#name,                                                                                   \
        [](RunConfig& c, const std::string& v) {                                                 \
          if (v == "auto")                                                                       \
            c.name.reset();                                                                      \
          else                                                                                   \
            c.name = to_bool(#name, v);                                                          \
        },                                                                                       \
        [](const RunConfig& c) {                                                                 \
          return std::string(!c.name ? "auto" : (*c.name ? "true" : "false"));                   \
        }}
#define ECS_OPT_DOUBLE(name)                                                                     \
  Field{#name,                                                                                   \
        [](RunConfig& c, const std::string& v) {                                                 \
          if (v == "none")                                                                       \
            c.name.reset();                                                                      \
          else                                                                                   \
            c.name = to_double(#name, v);                                                        \
        },                                                                                       \
        [](const RunConfig& c) { return c.name ? fmt_double(*c.name) : std::string("none"); }}
#define ECS_LIST(name)                                                                           \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_list(#name, v); },           \
        [](const RunConfig& c) {                                                                 \
          std::string s;                                                                         \
          for (std::size_t i = 0; i < c.name.size(); ++i)                                        \
            s += (i ? "," : "") + fmt_double(c.name[i]);                                         \
          return s;                                                                              \
        }}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      ECS_STRING(label),         ECS_STRING(problem),
      ECS_DOUBLE(x_min),         ECS_DOUBLE(x_max),
      ECS_INT(n_elements),       ECS_INT(order),
      ECS_LIST(extra_breakpoints), ECS_BOOL(nuclear_breakpoint),
      ECS_TRISTATE(zero_at_start), ECS_TRISTATE(zero_at_end),
      ECS_STRING(channel_mode),  ECS_INT(m),
      ECS_INT(channel_count),    ECS_INT(l_max),
      ECS_DOUBLE(Z),             ECS_DOUBLE(r0),
      ECS_DOUBLE(xi),            ECS_DOUBLE(F0),
      ECS_STRING(scan_axis),     ECS_LIST(scan_values),
      ECS_OPT_DOUBLE(reference_energy), ECS_DOUBLE(re_min),
      ECS_DOUBLE(re_max),        ECS_DOUBLE(max_abs_im),
      ECS_STRING(solver),        ECS_INT(n_eigs),
      ECS_INT(dense_limit),      ECS_BOOL(want_vectors),
      ECS_BOOL(dump_matrices),   ECS_INT(report_lowest),
      ECS_INT(node_count),       ECS_DOUBLE(singularity_offset),
      ECS_BOOL(auto_refine),     ECS_INT(n_theta),
      ECS_INT(n_phi),            ECS_DOUBLE(alpha_o),
      ECS_DOUBLE(alpha_h),       ECS_DOUBLE(n_o),
      ECS_DOUBLE(n_h),           ECS_DOUBLE(r_oh),
      ECS_DOUBLE(hoh_angle),     ECS_DOUBLE(t_on),
      ECS_DOUBLE(t_end),         ECS_DOUBLE(dt),
      ECS_DOUBLE(store_every),   ECS_DOUBLE(r_cut),
      ECS_DOUBLE(t_fall),        ECS_DOUBLE(initial_reference),
      ECS_DOUBLE(profile_every), ECS_DOUBLE(profile_dr),
      ECS_BOOL(inject_dc_sign_error),
  };
  return f;
}

} // namespace

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& f : fields())
    if (f.key == key) {
      f.set(c, pi_expanded(trim(value)));
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set_config_value(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& f : fields())
    out += f.key + " = " + f.get(c) + "\n";
  return out;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& msg) {
    throw ConfigError(key + ": " + msg);
  };
  if (problem != "model1d" && problem != "hydrogenic" && problem != "water" &&
      problem != "oscillator")
    fail("problem", "'" + problem + "' is not one of model1d, hydrogenic, water, oscillator");
  if (!(x_min < x_max))
    fail("x_max", "must exceed x_min");
  if (radial() && x_min != 0.0)
    fail("x_min", "radial problems start at r = 0");
  if (n_elements < 1)
    fail("n_elements", "must be >= 1");
  if (order < 3)
    fail("order", "basis order must be >= 3");
  if (channel_mode != "fixed_m" && channel_mode != "full")
    fail("channel_mode", "must be fixed_m or full");
  if (channel_count < 1)
    fail("channel_count", "must be >= 1");
  if (l_max < 0)
    fail("l_max", "must be >= 0");
  if (!(Z > 0))
    fail("Z", "must be positive");
  if (!(xi >= 0.0 && xi <= std::numbers::pi / 2 + 1e-12))
    fail("xi", fmt_double(xi) + " outside the accepted range [0, pi/2]");
  if (!(F0 >= 0.0))
    fail("F0", "must be >= 0");
  for (double f : scan_values)
    if (scan_axis == "F0" && f < 0)
      fail("scan_values", "field strengths must be >= 0");
  if (solver != "auto" && solver != "dense" && solver != "shift_invert")
    fail("solver", "must be auto, dense or shift_invert");
  if (n_eigs < 1)
    fail("n_eigs", "must be >= 1");
  if (node_count < 4)
    fail("node_count", "must be >= 4");
  if (!(singularity_offset >= 0))
    fail("singularity_offset", "must be >= 0");
  if (n_theta < 2 * l_max + 2)
    fail("n_theta", "must be >= 2 l_max + 2");
  if (n_phi < 4 * l_max + 2)
    fail("n_phi", "must be >= 4 l_max + 2");
  if (!(dt > 0))
    fail("dt", "must be positive");
  if (!(t_on > 0))
    fail("t_on", "must be positive");
  if (!(t_end > 0))
    fail("t_end", "must be positive");
  if (!(store_every >= dt))
    fail("store_every", "must be >= dt");
  try {
    water_params().validate();
  } catch (const ConfigError& e) {
    fail("water", e.what());
  }
}

WaterPotentialParams RunConfig::water_params() const {
  WaterPotentialParams p;
  p.alpha_o = alpha_o;
  p.alpha_h = alpha_h;
  p.n_o = n_o;
  p.n_h = n_h;
  p.r_oh = r_oh;
  p.hoh_angle = hoh_angle;
  return p;
}

std::filesystem::path preset_directory() {
  namespace fs = std::filesystem;
  if (const char* env = std::getenv("ECS_PRESET_DIR"); env && fs::is_directory(env))
    return env;
#ifdef ECS_PRESET_DIR
  if (fs::is_directory(ECS_PRESET_DIR))
    return ECS_PRESET_DIR;
#endif
  return "presets";
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  const auto dir = preset_directory();
  if (!std::filesystem::is_directory(dir))
    return out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".cfg")
      out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

RunConfig load_preset(const std::string& name) {
  const auto path = preset_directory() / (name + ".cfg");
  if (!std::filesystem::exists(path)) {
    std::string known;
    for (const auto& n : preset_names())
      known += " " + n;
    throw ConfigError("unknown preset '" + name + "'; available:" + known);
  }
  return load_config(path);
}

} // namespace ecs
