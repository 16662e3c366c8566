#pragma once

#include <utility>

#include "mf/diagnostics.hpp"
#include "mf/matcore.hpp"
#include "mf/problems.hpp"
#include "mf/solvers.hpp"

namespace mf::nora {

/// Adapter finetuning of a linear model with whitened data:
/// minimize 1/2 ||(W0 + X Y^T) - B||_F^2, i.e. asymmetric factorization of
/// A = B - W0.
struct LinearFinetuneProblem {
  Matrix w0;
  Matrix b;
  Eigen::Index r = 0;

  void validate() const;
  Matrix a_eff() const { return b - w0; }
};

struct NoraConfig {
  double xi = 0.1;
  double lambda = 1e-6;
  double lr = 0.5;
  bool normalize = true;
  int max_iters = 500;
  double tol = 1e-12;
  Seed seed{};
};

enum class Variant { nora, nora_plus };

std::string_view to_string(Variant v);

/// X0 = W0 Omega with Omega ~ N(0, xi^2) (n x r), Y0 = 0.
std::pair<Matrix, Matrix> nora_init(const LinearFinetuneProblem& problem, double xi, Seed seed);

/// One NoRA+ iteration at iteration index `state.t`. Gradients of the
/// finetuning loss are right-preconditioned by (G + lambda I)^{-1} of the
/// other factor (X's only when t > 0), optionally divided by the Frobenius
/// norm of that inverse, then applied as a plain descent step.
IterState nora_plus_step(const IterState& state, const LinearFinetuneProblem& problem,
                         const NoraConfig& config);

/// Plain gradient step on the finetuning loss (NoRA with vanilla descent).
IterState nora_step(const IterState& state, const LinearFinetuneProblem& problem, const NoraConfig& config);

/// Runs a variant from nora_init. Records are measured against A = B - W0.
Trace run_nora(const LinearFinetuneProblem& problem, const NoraConfig& config, Variant variant,
               const IterObserver& observer = {});

}  // namespace mf::nora
