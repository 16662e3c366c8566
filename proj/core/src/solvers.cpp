#include "mf/solvers.hpp"

#include <chrono>
#include <cmath>

namespace mf {

Schedule Schedule::fixed_rate(double eta) {
  Schedule s;
  s.kind = ScheduleKind::fixed;
  s.eta = eta;
  return s;
}

Schedule Schedule::two_phase_rate(double eta1, int t1, double eta2) {
  Schedule s;
  s.kind = ScheduleKind::two_phase;
  s.eta1 = eta1;
  s.t1 = t1;
  s.eta2 = eta2;
  return s;
}

Schedule Schedule::step_decay_rate(std::vector<double> levels, std::vector<int> switch_at) {
  Schedule s;
  s.kind = ScheduleKind::step_decay;
  s.levels = std::move(levels);
  s.switch_at = std::move(switch_at);
  return s;
}

Schedule Schedule::default_step_decay() { return step_decay_rate({0.5, 0.1, 0.01, 0.001}, {50, 100, 150}); }

Schedule Schedule::theorem_two_phase(const Problem& problem, int max_iters, double c) {
  const double k3 = problem.kappa * problem.kappa * problem.kappa;
  const double eta1 = std::min(1.0, c / (k3 * problem.frobenius()));
  const double t1 = std::ceil(k3 * std::sqrt(static_cast<double>(problem.r)) * std::log(problem.kappa));
  const int capped = t1 >= max_iters ? max_iters : static_cast<int>(std::max(t1, 0.0));
  return two_phase_rate(eta1, capped, 0.5);
}

namespace {
bool valid_eta(double eta) { return eta > 0.0 && eta <= 1.0; }
}  // namespace

void Schedule::validate() const {
  switch (kind) {
    case ScheduleKind::fixed:
      if (!valid_eta(eta)) throw InvalidArgument("schedule: eta must lie in (0, 1]");
      break;
    case ScheduleKind::two_phase:
      if (!valid_eta(eta1) || !valid_eta(eta2)) throw InvalidArgument("schedule: eta1/eta2 must lie in (0, 1]");
      if (t1 < 0) throw InvalidArgument("schedule: t1 must be >= 0");
      break;
    case ScheduleKind::step_decay:
      if (levels.empty()) throw InvalidArgument("schedule: step_decay needs at least one level");
      if (switch_at.size() + 1 != levels.size()) {
        throw InvalidArgument("schedule: step_decay needs one switch iteration per extra level");
      }
      for (double l : levels) {
        if (!valid_eta(l)) throw InvalidArgument("schedule: levels must lie in (0, 1]");
      }
      for (std::size_t i = 0; i < switch_at.size(); ++i) {
        if (switch_at[i] < 0 || (i > 0 && switch_at[i] <= switch_at[i - 1])) {
          throw InvalidArgument("schedule: switch iterations must be increasing");
        }
      }
      break;
  }
}

double Schedule::at(int t, bool in_phase2) const {
  switch (kind) {
    case ScheduleKind::fixed: return eta;
    case ScheduleKind::two_phase: return (in_phase2 || t >= t1) ? eta2 : eta1;
    case ScheduleKind::step_decay: {
      std::size_t level = 0;
      while (level < switch_at.size() && t >= switch_at[level]) ++level;
      return levels[level];
    }
  }
  return eta;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::gd: return "gd";
    case Method::scaledgd: return "scaledgd";
    case Method::scaledgd_pinv: return "scaledgd-pinv";
    case Method::scaledgd_lambda: return "scaledgd-lambda";
  }
  return "?";
}

std::optional<Method> method_from_string(std::string_view s) {
  for (auto m : {Method::gd, Method::scaledgd, Method::scaledgd_pinv, Method::scaledgd_lambda}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  schedule.validate();
  if (max_iters < 0) throw InvalidArgument("solver: max_iters must be >= 0");
  if (!(tol > 0.0)) throw InvalidArgument("solver: tol must be positive");
  if (method == Method::scaledgd_lambda && !(lambda > 0.0)) {
    throw InvalidArgument("solver: scaledgd-lambda needs lambda > 0");
  }
}

namespace {

// x (x^T x)^dagger = pinv(x)^T.
Matrix pseudo_precondition(const Matrix& g, const Matrix& x) { return g * pinv(x).transpose(); }

Matrix precondition(const Matrix& g, const Matrix& x, PrecondMode mode) {
  return mode == PrecondMode::inverse ? gram_solve(x, g * x) : pseudo_precondition(g, x);
}

}  // namespace

Matrix scaledgd_sym_step(const Matrix& x, const Matrix& a, double eta, PrecondMode mode) {
  const Matrix residual = x * x.transpose() - a;
  return x - eta * precondition(residual, x, mode);
}

IterState scaledgd_asym_step(const IterState& state, const Matrix& a, double eta, PrecondMode mode) {
  if (!state.y) throw InvalidArgument("scaledgd_asym_step: state has no Y factor");
  const Matrix& x = state.x;
  const Matrix& y = *state.y;
  const Matrix residual = x * y.transpose() - a;
  IterState next;
  next.t = state.t + 1;
  next.y = y - eta * precondition(residual.transpose(), x, mode);
  next.x = state.t == 0 ? x : Matrix(x - eta * precondition(residual, y, mode));
  return next;
}

IterState gd_step(const IterState& state, const Matrix& a, double eta) {
  IterState next;
  next.t = state.t + 1;
  if (state.y) {
    const Matrix residual = state.x * state.y->transpose() - a;
    next.x = state.x - eta * residual * *state.y;
    next.y = *state.y - eta * residual.transpose() * state.x;
  } else {
    next.x = state.x - eta * (state.x * state.x.transpose() - a) * state.x;
  }
  return next;
}

Matrix scaledgd_lambda_step(const Matrix& x, const Matrix& a, double eta, double lambda) {
  const Matrix g = (x * x.transpose() - a) * x;
  return x - eta * damped_gram_solve(x, g, lambda);
}

IterState scaledgd_lambda_asym_step(const IterState& state, const Matrix& a, double eta, double lambda) {
  if (!state.y) throw InvalidArgument("scaledgd_lambda_asym_step: state has no Y factor");
  const Matrix& x = state.x;
  const Matrix& y = *state.y;
  const Matrix residual = x * y.transpose() - a;
  IterState next;
  next.t = state.t + 1;
  next.x = x - eta * damped_gram_solve(y, residual * y, lambda);
  next.y = y - eta * damped_gram_solve(x, residual.transpose() * x, lambda);
  return next;
}

namespace {

IterState advance(const IterState& s, const Matrix& a, double eta, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::gd: return gd_step(s, a, eta);
    case Method::scaledgd:
    case Method::scaledgd_pinv: {
      const PrecondMode mode = cfg.method == Method::scaledgd ? PrecondMode::inverse : PrecondMode::pseudo;
      if (s.y) return scaledgd_asym_step(s, a, eta, mode);
      IterState next;
      next.t = s.t + 1;
      next.x = scaledgd_sym_step(s.x, a, eta, mode);
      return next;
    }
    case Method::scaledgd_lambda: {
      if (s.y) return scaledgd_lambda_asym_step(s, a, eta, cfg.lambda);
      IterState next;
      next.t = s.t + 1;
      next.x = scaledgd_lambda_step(s.x, a, eta, cfg.lambda);
      return next;
    }
  }
  throw InvalidArgument("solver: unknown method");
}

IterRecord record_for(const Problem& p, const IterState& s, double eta, bool full) {
  const Matrix* y = s.y ? &*s.y : nullptr;
  if (full) return measure(p, s.x, y, s.t, eta);
  IterRecord rec;
  rec.t = s.t;
  rec.eta_used = eta;
  rec.error = y ? optimality_error(s.x, *y, p.a) : optimality_error(s.x, p.a);
  return rec;
}

bool record_finite(const IterRecord& r) { return std::isfinite(r.error); }

}  // namespace

Trace run(const Problem& problem, const InitResult& init, const SolverConfig& config,
          const IterObserver& observer) {
  config.validate();
  Trace trace;
  if (init.x0.rows() != problem.rows() || init.x0.cols() != problem.r) {
    throw InvalidArgument("run: initial X has the wrong shape");
  }
  if (problem.symmetric() == init.y0.has_value()) {
    throw InvalidArgument("run: Y factor presence does not match the problem kind");
  }
  if (config.max_iters == 0) {
    trace.termination = Termination::budget;
    return trace;
  }
  if (config.method == Method::scaledgd && !init.rank_ok) {
    trace.termination = Termination::refused_start;
    return trace;
  }

  // Weak optimality is only reachable in the under-parametrized regime;
  // the full diagnostics are needed to stop on it.
  const bool stop_on_weak_opt = problem.regime == Regime::up;
  const bool full = config.record_diagnostics || stop_on_weak_opt;
  const auto start = std::chrono::steady_clock::now();
  auto stamp = [&](IterRecord& rec) {
    rec.elapsed_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  };
  auto done = [&](const IterRecord& rec) {
    return (stop_on_weak_opt ? rec.weak_opt : rec.error) <= config.tol;
  };

  IterState state;
  state.x = init.x0;
  state.y = init.y0;
  IterRecord rec = record_for(problem, state, 0.0, full);
  stamp(rec);
  state.last_error = rec.error;
  trace.records.push_back(rec);
  if (observer) observer(state);
  if (done(rec)) {
    trace.termination = Termination::converged;
    return trace;
  }

  const double phase2_radius = 2.0 / (3.0 * problem.kappa * problem.kappa);
  bool in_phase2 = state.last_error <= phase2_radius;
  trace.termination = Termination::budget;
  for (int t = 0; t < config.max_iters; ++t) {
    const double eta = config.schedule.at(t, in_phase2);
    IterState next;
    try {
      next = advance(state, problem.a, eta, config);
    } catch (const SingularGram&) {
      trace.termination = Termination::singular_gram;
      break;
    }
    rec = record_for(problem, next, eta, full && all_finite(next.x) && (!next.y || all_finite(*next.y)));
    stamp(rec);
    next.last_error = rec.error;
    state = std::move(next);
    trace.records.push_back(rec);
    if (observer) observer(state);
    if (!record_finite(rec) || !all_finite(state.x) || (state.y && !all_finite(*state.y))) {
      trace.termination = Termination::diverged;
      break;
    }
    if (done(rec)) {
      trace.termination = Termination::converged;
      break;
    }
    in_phase2 = in_phase2 || rec.error <= phase2_radius;
  }
  return trace;
}

}  // namespace mf
