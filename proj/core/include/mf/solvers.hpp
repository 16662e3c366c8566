#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mf/diagnostics.hpp"
#include "mf/initialization.hpp"
#include "mf/matcore.hpp"
#include "mf/problems.hpp"

namespace mf {

enum class ScheduleKind { fixed, two_phase, step_decay };

/// Learning-rate schedule. two_phase runs eta1 until iteration t1 or until
/// the optimality error first drops to 2 / (3 kappa^2), then eta2 for good.
struct Schedule {
  ScheduleKind kind = ScheduleKind::fixed;
  double eta = 0.5;
  double eta1 = 0.0;
  int t1 = 0;
  double eta2 = 0.5;
  std::vector<double> levels;
  std::vector<int> switch_at;  // levels[i + 1] starts at iteration switch_at[i]

  static Schedule fixed_rate(double eta);
  static Schedule two_phase_rate(double eta1, int t1, double eta2);
  static Schedule step_decay_rate(std::vector<double> levels, std::vector<int> switch_at);
  /// Step decay {0.5, 0.1, 0.01, 0.001}, switching every 50 iterations.
  static Schedule default_step_decay();
  /// eta1 = c / (kappa^3 ||A||_F), t1 = ceil(kappa^3 sqrt(r) ln kappa) capped
  /// at max_iters, eta2 = 0.5.
  static Schedule theorem_two_phase(const Problem& problem, int max_iters, double c = 1.0);

  void validate() const;
  /// Step size for iteration t; `in_phase2` tells two_phase whether the
  /// local region has been reached.
  double at(int t, bool in_phase2) const;
};

enum class Method { gd, scaledgd, scaledgd_pinv, scaledgd_lambda };
enum class PrecondMode { inverse, pseudo };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

struct SolverConfig {
  Method method = Method::scaledgd;
  Schedule schedule{};
  double lambda = 0.01;  // scaledgd_lambda only
  int max_iters = 100;
  double tol = 1e-12;
  bool record_diagnostics = true;

  void validate() const;
};

struct IterState {
  int t = 0;
  Matrix x;
  std::optional<Matrix> y;
  double last_error = 0.0;
};

/// x - eta (x x^T - a) x (x^T x)^{-1}, or with the pseudo-inverse in pseudo
/// mode. Inverse mode throws SingularGram on a rank-deficient x.
Matrix scaledgd_sym_step(const Matrix& x, const Matrix& a, double eta, PrecondMode mode);

/// Modified asymmetric ScaledGD. At t = 0 X is kept and only Y moves; from
/// t = 1 on both factors update from the pre-step iterates.
IterState scaledgd_asym_step(const IterState& state, const Matrix& a, double eta, PrecondMode mode);

/// Plain gradient step on 1/4 ||XX^T - A||^2 (no y) or 1/2 ||XY^T - A||^2.
IterState gd_step(const IterState& state, const Matrix& a, double eta);

/// x - eta (x x^T - a) x (x^T x + lambda I)^{-1}.
Matrix scaledgd_lambda_step(const Matrix& x, const Matrix& a, double eta, double lambda);

/// Damped asymmetric variant: both factors use (G + lambda I)^{-1}.
IterState scaledgd_lambda_asym_step(const IterState& state, const Matrix& a, double eta, double lambda);

using IterObserver = std::function<void(const IterState&)>;

/// Runs the configured method from `init`. The trace holds the initial
/// state as record t = 0 followed by one record per step. UP problems stop
/// on the weak-optimality residual, the others on the optimality error.
Trace run(const Problem& problem, const InitResult& init, const SolverConfig& config,
          const IterObserver& observer = {});

}  // namespace mf
