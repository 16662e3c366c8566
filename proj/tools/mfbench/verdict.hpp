#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "mf/diagnostics.hpp"

namespace mfbench {

enum class Check { pass, fail, na };
std::string_view to_string(Check c);

inline constexpr const char* kVerdictHeader =
    "run_id,verdict,phase2_slope,termination,align_ok,sigma_bound_ok,quad_contract_ok,weakopt_plateau_ok";

inline constexpr double kAlignTol = 1e-9;
inline constexpr double kSigmaSlack = 1e-9;
// Level a decaying-step UP run must reach for its plateau check to pass.
inline constexpr double kDecayedWeakOpt = 1e-6;

struct Verdict {
  std::string run_id;
  mf::RateEstimate rate;
  mf::Termination termination = mf::Termination::budget;
  Check align = Check::na;
  Check sigma_bound = Check::na;
  Check quad_contract = Check::na;
  Check weakopt_plateau = Check::na;
  double plateau = -1.0;  // weak_opt plateau for fixed-step UP runs, else -1
};

/// Problem the run was measured against (the synthesized target, or B - W0
/// for adapter runs).
mf::Problem problem_for(const ExperimentConfig& c);

/// Series the rate classifier looks at: weak_opt for UP, error otherwise.
std::vector<double> rate_series(const mf::Problem& p, const std::vector<mf::IterRecord>& records);

Verdict evaluate(const ExperimentConfig& c, const mf::Problem& p, const std::vector<mf::IterRecord>& records,
                 mf::Termination termination, std::string run_id);

/// Reconstructs the termination of a recorded run from its config.
mf::Termination infer_termination(const ExperimentConfig& c, const mf::Problem& p,
                                  const std::vector<mf::IterRecord>& records);

std::string verdict_row(const Verdict& v);
void write_verdicts(const std::filesystem::path& path, const std::vector<Verdict>& verdicts);

}  // namespace mfbench
