#include "mf/nora.hpp"

#include <chrono>
#include <cmath>

namespace mf::nora {

void LinearFinetuneProblem::validate() const {
  if (r < 1) throw InvalidArgument("nora: adapter rank must be >= 1");
  if (w0.rows() != b.rows() || w0.cols() != b.cols()) throw InvalidArgument("nora: W0 and B shapes differ");
  if (w0.size() == 0 || !all_finite(w0) || !all_finite(b)) throw InvalidArgument("nora: W0 and B must be finite");
}

std::string_view to_string(Variant v) { return v == Variant::nora ? "nora" : "nora-plus"; }

std::pair<Matrix, Matrix> nora_init(const LinearFinetuneProblem& problem, double xi, Seed seed) {
  problem.validate();
  Matrix x0 = problem.w0 * gaussian(problem.w0.cols(), problem.r, xi, seed);
  return {std::move(x0), Matrix::Zero(problem.w0.cols(), problem.r)};
}

namespace {

Matrix residual(const IterState& s, const LinearFinetuneProblem& p) {
  return p.w0 + s.x * s.y->transpose() - p.b;
}

// g (G + lambda I)^{-1}, divided by ||(G + lambda I)^{-1}||_F when normalizing.
Matrix precondition(const Matrix& g, const Matrix& factor, const NoraConfig& cfg) {
  Matrix out = damped_gram_solve(factor, g, cfg.lambda);
  if (cfg.normalize) {
    Matrix gram = factor.transpose() * factor;
    gram = 0.5 * (gram + gram.transpose());
    gram.diagonal().array() += cfg.lambda;
    const Matrix inv = gram.llt().solve(Matrix::Identity(gram.rows(), gram.cols()));
    out /= inv.norm();
  }
  return out;
}

}  // namespace

IterState nora_plus_step(const IterState& state, const LinearFinetuneProblem& problem, const NoraConfig& config) {
  if (!state.y) throw InvalidArgument("nora_plus_step: state has no Y factor");
  const Matrix res = residual(state, problem);
  Matrix gx = res * *state.y;
  Matrix gy = res.transpose() * state.x;
  if (state.t > 0) gx = precondition(gx, *state.y, config);
  gy = precondition(gy, state.x, config);
  IterState next;
  next.t = state.t + 1;
  next.x = state.x - config.lr * gx;
  next.y = *state.y - config.lr * gy;
  return next;
}

IterState nora_step(const IterState& state, const LinearFinetuneProblem& problem, const NoraConfig& config) {
  if (!state.y) throw InvalidArgument("nora_step: state has no Y factor");
  const Matrix res = residual(state, problem);
  IterState next;
  next.t = state.t + 1;
  next.x = state.x - config.lr * (res * *state.y);
  next.y = *state.y - config.lr * (res.transpose() * state.x);
  return next;
}

Trace run_nora(const LinearFinetuneProblem& problem, const NoraConfig& config, Variant variant,
               const IterObserver& observer) {
  problem.validate();
  if (!(config.lr >= 0.0)) throw InvalidArgument("nora: lr must be non-negative");
  if (!(config.lambda >= 0.0)) throw InvalidArgument("nora: lambda must be non-negative");
  if (config.max_iters < 0) throw InvalidArgument("nora: max_iters must be >= 0");
  const Problem target = make_problem(problem.a_eff(), problem.r, Kind::asymmetric);

  Trace trace;
  if (config.max_iters == 0) return trace;
  const auto start = std::chrono::steady_clock::now();
  auto stamp = [&](IterRecord& rec) {
    rec.elapsed_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  };

  auto [x0, y0] = nora_init(problem, config.xi, config.seed);
  IterState state;
  state.x = std::move(x0);
  state.y = std::move(y0);
  IterRecord rec = measure(target, state.x, &*state.y, 0, 0.0);
  stamp(rec);
  trace.records.push_back(rec);
  if (observer) observer(state);
  trace.termination = Termination::budget;
  if (rec.error <= config.tol) {
    trace.termination = Termination::converged;
    return trace;
  }
  for (int t = 0; t < config.max_iters; ++t) {
    IterState next;
    try {
      next = variant == Variant::nora_plus ? nora_plus_step(state, problem, config) : nora_step(state, problem, config);
    } catch (const SingularGram&) {
      trace.termination = Termination::singular_gram;
      break;
    }
    const bool finite = all_finite(next.x) && all_finite(*next.y);
    if (finite) {
      rec = measure(target, next.x, &*next.y, next.t, config.lr);
    } else {
      rec = IterRecord{};
      rec.t = next.t;
      rec.eta_used = config.lr;
      rec.error = std::nan("");
    }
    stamp(rec);
    next.last_error = rec.error;
    state = std::move(next);
    trace.records.push_back(rec);
    if (observer) observer(state);
    if (!finite) {
      trace.termination = Termination::diverged;
      break;
    }
    if (rec.error <= config.tol) {
      trace.termination = Termination::converged;
      break;
    }
  }
  return trace;
}

}  // namespace mf::nora
