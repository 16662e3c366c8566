#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "mf/matcore.hpp"
#include "mf/problems.hpp"

namespace mf {

enum class InitKind { nystrom, small_gaussian, perturbed_nystrom, nystrom_via_gradient };

std::string_view to_string(InitKind k);

struct InitSpec {
  InitKind kind = InitKind::nystrom;
  double xi = 1.0;     // sketch std
  double zeta = 1e-3;  // small-init std
  double xi_n = 0.0;   // perturbation std
  Seed seed{};
};

struct InitResult {
  Matrix x0;
  std::optional<Matrix> y0;
  // Numerical rank of x0 equals min(r, r_A) for the sketch initializers and
  // r for small Gaussian init.
  bool rank_ok = false;
};

/// x0 = A * Omega with Omega ~ N(0, xi^2) of shape cols(A) x r. For
/// asymmetric problems y0 is the zero n x r matrix.
InitResult nystrom_init(const Matrix& a, Eigen::Index r, Kind kind, const InitSpec& spec);

/// Both factors i.i.d. N(0, zeta^2); Y is drawn from seed + 1.
InitResult small_gaussian_init(Eigen::Index m, Eigen::Index n, Eigen::Index r, Kind kind,
                               const InitSpec& spec);

/// x0 = A * Omega + N with N ~ N(0, xi_n^2) drawn from the seed offset by
/// kNoiseSeedOffset. xi_n == 0 returns exactly the Nystrom result.
InitResult perturbed_nystrom_init(const Matrix& a, Eigen::Index r, Kind kind, const InitSpec& spec);
inline constexpr std::uint64_t kNoiseSeedOffset = 0x9E3779B97F4A7C15ull;

using SymGradOracle = std::function<Matrix(const Matrix& x)>;
using AsymGradOracle = std::function<std::pair<Matrix, Matrix>(const Matrix& x, const Matrix& y)>;

/// Nystrom initialization from gradient evaluations only. The symmetric
/// oracle must return (X X^T - A) X, the asymmetric one the pair
/// ((X Y^T - A) Y, (X Y^T - A)^T X). Without A at hand, rank_ok reports
/// whether x0 has full column rank.
InitResult nystrom_via_gradient(const SymGradOracle& grad, Eigen::Index m, Eigen::Index r,
                                const InitSpec& spec);
InitResult nystrom_via_gradient(const AsymGradOracle& grad, Eigen::Index m, Eigen::Index n,
                                Eigen::Index r, const InitSpec& spec);

/// Dispatch on spec.kind.
InitResult initialize(const Problem& problem, const InitSpec& spec);

}  // namespace mf
