#include <CLI11.hpp>

#include <map>
#include <ostream>

#include "commands.hpp"

namespace mfbench {

namespace {

struct Flags {
  std::string preset;
  std::string scale = "desk";
  std::string config_file;
  std::string regime;
  std::string out = "mfbench-out";
  std::vector<std::string> grid;
  std::vector<std::string> traces;
  // Keyed option values as text; set_key parses them.
  std::map<std::string, std::string> values;
  bool no_normalize = false;
  std::string variant;
};

const std::vector<std::pair<std::string, std::string>> kKeyedOptions = {
    {"label", "label"},         {"kind", "kind"},   {"m", "m"},           {"n", "n"},
    {"spectrum", "spectrum"},   {"r", "r"},         {"init", "init"},     {"xi", "xi"},
    {"zeta", "zeta"},           {"xi-n", "xi_n"},   {"solver", "solver"}, {"eta", "eta"},
    {"schedule", "schedule"},   {"lambda", "lambda"}, {"max-iters", "max_iters"},
    {"tol", "tol"},             {"seed", "seed"},   {"repeats", "repeats"}};

void add_experiment_options(CLI::App* cmd, Flags& f, bool with_preset) {
  if (with_preset) {
    cmd->add_option("--preset", f.preset, "fig1a|fig1b|fig1c|fig5a|fig5b|ep|op|up");
    cmd->add_option("--scale", f.scale, "desk (m=100) or paper (m=1000)")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--regime", f.regime, "sets r from rank(A): ep, op (3x) or up (half)")
        ->check(CLI::IsMember({"ep", "op", "up"}));
  }
  cmd->add_option("--config", f.config_file, "file of key=value entries");
  for (const auto& [name, key] : kKeyedOptions) {
    cmd->add_option("--" + name, f.values[name]);
  }
  cmd->add_option("--out", f.out, "output directory");
}

RunRequest build_request(CLI::App* cmd, Flags& f) {
  RunRequest req;
  if (!f.preset.empty()) req.preset = f.preset;
  req.scale = f.scale == "paper" ? Scale::paper : Scale::desk;
  if (!f.config_file.empty()) req.config_file = f.config_file;
  if (f.regime == "ep") req.regime = mf::Regime::ep;
  if (f.regime == "op") req.regime = mf::Regime::op;
  if (f.regime == "up") req.regime = mf::Regime::up;
  const bool has_eta = cmd->count("--eta") > 0;
  if (has_eta && cmd->count("--schedule") > 0) throw ConfigError("--eta and --schedule are mutually exclusive");
  for (const auto& [name, key] : kKeyedOptions) {
    if (cmd->count("--" + name) == 0) continue;
    const std::string& value = f.values[name];
    if (key == "eta") {
      req.sets.emplace_back("schedule", "fixed:" + value);
    } else {
      req.sets.emplace_back(key, value);
    }
    if (key == "m" && cmd->count("--n") == 0) req.sets.emplace_back("n", value);
  }
  if (!f.variant.empty()) req.sets.emplace_back("variant", f.variant);
  if (f.no_normalize) req.sets.emplace_back("normalize", "false");
  return req;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mfbench: low-rank factorization experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "run one experiment or preset");
  add_experiment_options(run, f, true);
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  add_experiment_options(sweep, f, true);
  sweep->add_option("--grid", f.grid, "key=v1,v2 (repeatable, at most 3)");
  auto* report = app.add_subcommand("report", "summarize trace files");
  report->add_option("traces", f.traces, "trace CSV files")->required();
  auto* nora = app.add_subcommand("nora", "adapter finetuning on a linear model");
  add_experiment_options(nora, f, false);
  nora->add_option("--variant", f.variant, "nora|nora-plus")->check(CLI::IsMember({"nora", "nora-plus"}));
  nora->add_flag("--no-normalize", f.no_normalize, "disable preconditioner normalization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(assemble(build_request(run, f)), f.out, out);
    if (nora->parsed()) return cmd_run(assemble(build_request(nora, f), nora_defaults()), f.out, out);
    if (sweep->parsed()) {
      std::vector<GridAxis> grid;
      for (const auto& g : f.grid) grid.push_back(parse_grid_axis(g));
      return cmd_sweep(assemble(build_request(sweep, f)), grid, f.out, out);
    }
    std::vector<std::filesystem::path> paths(f.traces.begin(), f.traces.end());
    return cmd_report(paths, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const mf::InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mfbench
