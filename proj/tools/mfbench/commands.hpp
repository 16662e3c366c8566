#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "presets.hpp"
#include "verdict.hpp"

namespace mfbench {

/// What the command line asked for, before it is resolved into configs.
struct RunRequest {
  std::optional<std::string> preset;
  Scale scale = Scale::desk;
  std::optional<std::filesystem::path> config_file;
  std::vector<std::pair<std::string, std::string>> sets;  // applied in order
  std::optional<mf::Regime> regime;
};

/// Defaults for the `nora` command: m = n = 32, r = 4, spectrum {2, 1.5, 1, 0.5}.
ExperimentConfig nora_defaults();

/// Resolves a request into validated configs (one per preset arm).
std::vector<ExperimentConfig> assemble(const RunRequest& request, const ExperimentConfig& defaults = {});

/// Reads `key=value` entries from a file, one per line or ';'-separated.
/// '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

struct RunResult {
  std::string run_id;
  ExperimentConfig config;  // seed set to the seed actually used, repeats = 1
  mf::Problem problem;
  mf::Trace trace;
  Verdict verdict;
};

std::string run_id_for(const ExperimentConfig& c, std::uint64_t seed);

/// Runs one seed of a config.
RunResult execute(const ExperimentConfig& c, std::uint64_t seed, const std::string& id_prefix = "");

int cmd_run(const std::vector<ExperimentConfig>& configs, const std::filesystem::path& out, std::ostream& log);

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Parses `key=v1,v2,...` (values split on '|' instead when present). The
/// pseudo-key `eta` sets a fixed schedule.
GridAxis parse_grid_axis(const std::string& spec);

int cmd_sweep(const std::vector<ExperimentConfig>& base, const std::vector<GridAxis>& grid,
              const std::filesystem::path& out, std::ostream& log);

int cmd_report(const std::vector<std::filesystem::path>& traces, std::ostream& out);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfbench
