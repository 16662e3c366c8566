#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mf/initialization.hpp"
#include "mf/nora.hpp"
#include "mf/problems.hpp"
#include "mf/solvers.hpp"

namespace mfbench {

/// Bad user input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed files; maps to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { factorize, nora };

/// One experiment arm. Serialized as `key=value` pairs joined by ';' in the
/// fixed order of kKeys, which is also the canonical form echoed into trace
/// files.
struct ExperimentConfig {
  std::string label = "run";
  Task task = Task::factorize;
  mf::Kind kind = mf::Kind::symmetric;
  int m = 100;
  int n = 100;  // ignored for symmetric problems
  std::string spectrum = "lin:1.0,-0.01,19,0.01";
  int r = 20;
  mf::InitKind init = mf::InitKind::nystrom;
  double xi = 1.0;
  double zeta = 1e-3;
  double xi_n = 0.0;
  mf::Method solver = mf::Method::scaledgd;
  std::string schedule = "fixed:0.5";
  double lambda = 0.01;
  int max_iters = 200;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  int repeats = 1;
  mf::nora::Variant variant = mf::nora::Variant::nora_plus;
  bool normalize = true;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline constexpr std::string_view kKeys[] = {
    "label", "task",     "kind",     "m",      "n",   "spectrum", "r",       "init",    "xi",        "zeta",
    "xi_n",  "solver",   "schedule", "lambda", "max_iters", "tol", "seed",   "repeats", "variant",   "normalize"};

std::string serialize(const ExperimentConfig& c);
ExperimentConfig parse_config(std::string_view text);

/// Sets one key from its textual value; throws ConfigError naming the key.
void set_key(ExperimentConfig& c, std::string_view key, std::string_view value);
bool is_known_key(std::string_view key);

/// Full validation (spectrum parses, ranks fit the shape, schedule valid).
void validate(const ExperimentConfig& c);

mf::TargetSpec target_spec(const ExperimentConfig& c, std::uint64_t seed);
mf::Problem build_problem(const ExperimentConfig& c, std::uint64_t seed);
mf::InitSpec init_spec(const ExperimentConfig& c, std::uint64_t seed);
mf::Schedule parse_schedule(std::string_view text, const mf::Problem* problem, int max_iters);
mf::SolverConfig solver_config(const ExperimentConfig& c, const mf::Problem& problem);

mf::nora::LinearFinetuneProblem build_nora_problem(const ExperimentConfig& c, std::uint64_t seed);
mf::nora::NoraConfig nora_config(const ExperimentConfig& c, std::uint64_t seed);

/// Step size used for the plateau measurement (fixed schedules only).
double nominal_eta(const ExperimentConfig& c);
bool is_fixed_schedule(const ExperimentConfig& c);

/// Seeds for repeats derive as base_seed + index.
inline std::uint64_t repeat_seed(const ExperimentConfig& c, int index) { return c.seed + static_cast<std::uint64_t>(index); }

std::string format_double(double v);

}  // namespace mfbench
