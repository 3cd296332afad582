#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ppjump/commands.hpp"
#include "ppjump/config.hpp"
#include "ppjump/presets.hpp"

namespace fs = std::filesystem;
using namespace ppjump;

namespace {

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool allow_degenerate = false;
  unsigned threads = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "Scenario file")->required();
  cmd->add_option("--seed", o.seed, "Override the master seed");
  cmd->add_option("--out", o.out, "Output directory (default: output.directory)");
  cmd->add_flag("--allow-degenerate", o.allow_degenerate,
                "Accept models that violate the standing positivity assumptions");
  cmd->add_option("--threads", o.threads, "Ensemble worker threads (0: all cores)");
}

int run(const std::string& which, const RunOptions& o) {
  ScenarioConfig cfg;
  try {
    cfg = load_config(o.config, {o.allow_degenerate});
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const AssumptionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  if (o.seed) cfg.sim.seed = *o.seed;
  RunContext ctx;
  ctx.out_dir = o.out ? fs::path(*o.out) : fs::path(cfg.output.directory);
  ctx.threads = o.threads;
  ctx.console = &std::cout;

  try {
    if (which == "analyze") {
      cmd_analyze(cfg, ctx);
      return kExitOk;
    }
    if (which == "simulate") return cmd_simulate(cfg, ctx).exit_code;
    return cmd_verify(cfg, ctx).exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-time behaviour of a stochastic predator-prey model with jumps"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string which;
  for (const char* name : {"analyze", "simulate", "verify"}) {
    const char* help = name == std::string("analyze")    ? "Predict the long-time regime of each species"
                       : name == std::string("simulate") ? "Simulate paths and ensemble statistics"
                                                         : "Compare predictions with a simulated ensemble";
    CLI::App* cmd = app.add_subcommand(name, help);
    add_run_options(cmd, opts);
    cmd->callback([&which, name] { which = name; });
  }

  CLI::App* presets_cmd = app.add_subcommand("presets", "List or write the shipped scenarios");
  presets_cmd->require_subcommand(1);
  CLI::App* list_cmd = presets_cmd->add_subcommand("list", "List preset names");
  CLI::App* write_cmd = presets_cmd->add_subcommand("write", "Write a preset file");
  std::string preset_name;
  std::string preset_dir = ".";
  write_cmd->add_option("name", preset_name, "Preset name")->required();
  write_cmd->add_option("--out", preset_dir, "Directory to write <name>.cfg into");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidInput;
  }

  if (list_cmd->parsed()) {
    for (const Preset& p : presets()) std::cout << p.name << "  " << preset_summary(p) << "\n";
    return kExitOk;
  }
  if (write_cmd->parsed()) {
    const Preset* p = find_preset(preset_name);
    if (!p) {
      std::cerr << "error: unknown preset '" << preset_name << "'\n";
      return kExitInvalidInput;
    }
    fs::path target = fs::path(preset_dir) / (std::string(p->name) + ".cfg");
    fs::create_directories(target.parent_path());
    std::ofstream os(target, std::ios::binary);
    os << p->text;
    if (!os) {
      std::cerr << "error: cannot write " << target << "\n";
      return kExitRuntime;
    }
    std::cout << target.string() << "\n";
    return kExitOk;
  }
  return run(which, opts);
}
