#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mf/matcore.hpp"
#include "mf/problems.hpp"

namespace mf {

struct IterRecord {
  int t = 0;
  double error = 0.0;
  double sigma_r_core = 0.0;
  double leakage_x = 0.0;
  double leakage_y = 0.0;  // 0 for symmetric problems
  double weak_opt = 0.0;
  double eta_used = 0.0;   // step size that produced this iterate (0 at t = 0)
  std::int64_t elapsed_ns = 0;
};

enum class Termination { converged, budget, diverged, singular_gram, refused_start };

std::string_view to_string(Termination t);
std::optional<Termination> termination_from_string(std::string_view s);

struct Trace {
  std::vector<IterRecord> records;
  Termination termination = Termination::budget;
  std::string config;  // canonical provenance string, filled by the caller

  std::vector<double> errors() const;
  std::vector<double> weak_opts() const;
};

enum class RateVerdict { one_step, quadratic, linear, sublinear, stalled, indeterminate };

std::string_view to_string(RateVerdict v);
std::optional<RateVerdict> verdict_from_string(std::string_view s);

struct RateEstimate {
  RateVerdict verdict = RateVerdict::indeterminate;
  double phase2_slope = 0.0;  // p in log e_{t+1} = p log e_t + c
  double contraction = 0.0;   // geometric-mean ratio e_{t+1}/e_t over the window
  int window_begin = 0;       // indices into the input sequence, inclusive
  int window_end = 0;
  double confidence = 0.0;    // sqrt(1 - R^2) of the log-log fit
  bool low_confidence = false;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-iteration metrics.

double optimality_error(const Matrix& x, const Matrix& a);
double optimality_error(const Matrix& x, const Matrix& y, const Matrix& a);

double weak_opt_residual(const Matrix& x, const Matrix& a_pinv);
double weak_opt_residual(const Matrix& x, const Matrix& y, const Matrix& a_pinv);

/// ||(I - Q Q^T) x||_F / max(||x||_F, eps).
double residual_leakage(const Matrix& x, const Matrix& col_basis_q);

/// sigma_k(X X^T) with k = min(r, r_A): the smallest eigenvalue of the
/// aligned core B_t = Phi_t Phi_t^T on its support.
double sigma_r_core(const Matrix& x, Eigen::Index r_a);

/// min over orthogonal R of ||x R - x_star||_F.
double procrustes_distance(const Matrix& x, const Matrix& x_star);

/// Distances from a symmetric factor to the aligned optimum Q_1 Sigma_1^{1/2}
/// built from the top-r part of the problem's eigendecomposition.
struct OptimumDistance {
  double raw = 0.0;
  double procrustes = 0.0;
};
OptimumDistance optimum_distance(const Problem& problem, const Matrix& x);

/// Smallest C with values[i] <= C * scales[i] for all i.
double fitted_constant(std::span<const double> values, std::span<const double> scales);

/// Lower bound on sigma_r(B_{t+1}) for ScaledGD from a Nystrom start.
double lemma2_lower_bound(int t, double eta, double sigma_r_b0, double sigma_r_a);

/// Fills one IterRecord for the iterate (x, y) of `problem`.
IterRecord measure(const Problem& problem, const Matrix& x, const Matrix* y, int t, double eta);

// Rate classification.

struct RateOptions {
  double floor = 0.0;    // values <= floor are dropped before fitting
  int window = 5;        // number of trailing usable points
  double max_residual = 0.15;
};

/// Round-off floor for a trace: 100 * eps * max(||A||_F, max_t e_t).
double rate_floor(double a_frobenius, std::span<const double> errors);

RateEstimate classify_rate(std::span<const double> errors, const RateOptions& opts = {});

// Certifiers evaluated on whole traces.

/// max over records of leakage_x and leakage_y.
double max_leakage(const Trace& trace);

/// Every record t >= 1 satisfies sigma_r_core(t) >= bound(t - 1) - slack.
/// Returns the worst margin (observed - bound); >= -slack means pass.
double sigma_bound_margin(const Trace& trace, double eta, double sigma_r_a);

struct ContractionCheck {
  bool applicable = false;  // some iterate entered the local region
  bool holds = true;
  int entry_t = -1;
  double worst_excess = 0.0;  // max of e_{t+1} - C e_t^2 over checked steps
};

/// Once e_t <= 2/(3 kappa^2) and sigma_r_core >= sigma_min(A)/3, checks
/// e_{t+1} <= (3 kappa^2 / 4) e_t^2 + slack on every subsequent step.
ContractionCheck quadratic_contraction(const Trace& trace, double kappa, double sigma_min_a,
                                       double slack = 1e-12);

/// Relative Frobenius mismatch between the observed B_{t+1} and the
/// recursion (1-eta)^2 B_t + 2 eta (1-eta) S + eta^2 S B_t^{-1} S for
/// B_t = Phi_t Phi_t^T, Phi_t = Q^T X_t, S = Q^T A Q.
double b_recursion_mismatch(const Matrix& x_t, const Matrix& x_next, const Matrix& q,
                            const Matrix& a, double eta);

/// Weak-optimality level reached after a fixed amount of "time" eta * t:
/// the weak_opt value at iteration ceil(horizon / eta). Comparing two step
/// sizes at equal eta * t isolates the O(eta r) neighbourhood term.
double weak_opt_plateau(const Trace& trace, double eta, double horizon = 20.0);

}  // namespace mf
