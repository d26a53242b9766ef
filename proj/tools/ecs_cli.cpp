// Command line front end: ecs_cli <solve|scan|propagate|validate|fcrit> [options]
#include "ecs/errors.hpp"
#include "ecs/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

ecs::RunConfig resolve_config(const std::string& config_path, const std::string& preset,
                              const std::vector<std::string>& overrides) {
  if (!config_path.empty() && !preset.empty())
    throw ecs::ConfigError("give either --config or --preset, not both");
  ecs::RunConfig c;
  if (!config_path.empty())
    c = ecs::load_config(config_path);
  else if (!preset.empty())
    c = ecs::load_preset(preset);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ecs::ConfigError("--set expects key=value, got '" + kv + "'");
    ecs::set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stark resonances by exterior complex scaling"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "out";
  std::vector<std::string> overrides;
  int threads = 1;
  unsigned seed = 12345;
  bool quiet = false;

  const std::vector<std::string> names = {"solve", "scan", "propagate", "validate", "fcrit"};
  std::vector<CLI::App*> subs;
  for (const auto& n : names) {
    auto* s = app.add_subcommand(n);
    s->add_option("--config", config_path, "config file");
    s->add_option("--preset", preset, "named preset");
    s->add_option("--out", out_dir, "output directory");
    s->add_option("--threads", threads, "assembly threads")->check(CLI::PositiveNumber);
    s->add_option("--seed", seed, "seed for randomized checks");
    s->add_option("--set", overrides, "override a config key (key=value)");
    s->add_flag("--quiet", quiet, "no progress log");
    subs.push_back(s);
  }
  auto* list = app.add_subcommand("presets", "list the shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (list->parsed()) {
    for (const auto& n : ecs::preset_names())
      std::cout << n << '\n';
    return 0;
  }

  try {
    const ecs::RunConfig c = resolve_config(config_path, preset, overrides);
    ecs::CommandContext ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    ctx.seed = seed;
    ctx.log = quiet ? nullptr : &std::cerr;
    nlohmann::json rec;
    if (subs[0]->parsed())
      rec = ecs::cmd_solve(c, ctx);
    else if (subs[1]->parsed())
      rec = ecs::cmd_scan(c, ctx);
    else if (subs[2]->parsed())
      rec = ecs::cmd_propagate(c, ctx);
    else if (subs[3]->parsed())
      rec = ecs::cmd_validate(c, ctx);
    else
      rec = ecs::cmd_fcrit(c, ctx);
    std::cout << rec.dump(2) << '\n';
    if (subs[3]->parsed() && !rec.value("all_pass", false))
      return 3;
    return 0;
  } catch (const ecs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
