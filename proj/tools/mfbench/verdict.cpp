#include "verdict.hpp"

#include <cmath>
#include <fstream>

#include "trace_io.hpp"

namespace mfbench {

std::string_view to_string(Check c) {
  switch (c) {
    case Check::pass: return "pass";
    case Check::fail: return "fail";
    case Check::na: return "na";
  }
  return "na";
}

mf::Problem problem_for(const ExperimentConfig& c) {
  if (c.task == Task::nora) {
    const auto lf = build_nora_problem(c, c.seed);
    return mf::make_problem(lf.a_eff(), lf.r, mf::Kind::asymmetric);
  }
  return build_problem(c, c.seed);
}

std::vector<double> rate_series(const mf::Problem& p, const std::vector<mf::IterRecord>& records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(p.regime == mf::Regime::up ? r.weak_opt : r.error);
  return out;
}

namespace {

Check check(bool ok) { return ok ? Check::pass : Check::fail; }

bool sketch_init(const ExperimentConfig& c) {
  return c.init == mf::InitKind::nystrom || c.init == mf::InitKind::nystrom_via_gradient ||
         (c.init == mf::InitKind::perturbed_nystrom && c.xi_n == 0.0);
}

bool scaled_method(const ExperimentConfig& c) { return c.solver != mf::Method::gd; }

}  // namespace

Verdict evaluate(const ExperimentConfig& c, const mf::Problem& p, const std::vector<mf::IterRecord>& records,
                 mf::Termination termination, std::string run_id) {
  Verdict v;
  v.run_id = std::move(run_id);
  v.termination = termination;

  const std::vector<double> series = rate_series(p, records);
  try {
    mf::RateOptions opts;
    opts.floor = mf::rate_floor(p.frobenius(), series);
    v.rate = mf::classify_rate(series, opts);
  } catch (const mf::InsufficientData&) {
    v.rate = mf::RateEstimate{};
  }
  if (records.empty() || c.task == Task::nora) return v;

  mf::Trace trace;
  trace.records = records;
  trace.termination = termination;

  if (sketch_init(c) && scaled_method(c)) v.align = check(mf::max_leakage(trace) <= kAlignTol);

  const bool fixed = is_fixed_schedule(c);
  if (p.symmetric() && p.regime == mf::Regime::ep && sketch_init(c) && c.solver == mf::Method::scaledgd && fixed) {
    v.sigma_bound = check(mf::sigma_bound_margin(trace, nominal_eta(c), p.sigma_min()) >= -kSigmaSlack);
  }

  if (p.symmetric() && p.regime != mf::Regime::up) {
    const auto cc = mf::quadratic_contraction(trace, p.kappa, p.sigma_min());
    if (cc.applicable) v.quad_contract = check(cc.holds);
  }

  if (p.regime == mf::Regime::up) {
    if (fixed) {
      const double eta = nominal_eta(c);
      try {
        v.plateau = mf::weak_opt_plateau(trace, eta);
        v.weakopt_plateau = check(v.plateau <= eta * static_cast<double>(p.r));
      } catch (const mf::InsufficientData&) {
      }
    } else {
      v.weakopt_plateau = check(termination == mf::Termination::converged ||
                                records.back().weak_opt <= kDecayedWeakOpt);
    }
  }
  return v;
}

mf::Termination infer_termination(const ExperimentConfig& c, const mf::Problem& p,
                                  const std::vector<mf::IterRecord>& records) {
  if (records.empty()) return c.max_iters == 0 ? mf::Termination::budget : mf::Termination::refused_start;
  const auto& last = records.back();
  if (!std::isfinite(last.error)) return mf::Termination::diverged;
  const double stop = (c.task == Task::factorize && p.regime == mf::Regime::up) ? last.weak_opt : last.error;
  if (stop <= c.tol) return mf::Termination::converged;
  if (last.t >= c.max_iters) return mf::Termination::budget;
  return mf::Termination::singular_gram;
}

std::string verdict_row(const Verdict& v) {
  std::string row = v.run_id;
  row += ',';
  row += mf::to_string(v.rate.verdict);
  row += ',';
  row += format_full(v.rate.phase2_slope);
  row += ',';
  row += mf::to_string(v.termination);
  for (Check c : {v.align, v.sigma_bound, v.quad_contract, v.weakopt_plateau}) {
    row += ',';
    row += to_string(c);
  }
  return row;
}

void write_verdicts(const std::filesystem::path& path, const std::vector<Verdict>& verdicts) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << kVerdictHeader << '\n';
  for (const auto& v : verdicts) f << verdict_row(v) << '\n';
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace mfbench
