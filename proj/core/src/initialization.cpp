#include "mf/initialization.hpp"

#include <cmath>

namespace mf {

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::nystrom: return "nystrom";
    case InitKind::small_gaussian: return "small";
    case InitKind::perturbed_nystrom: return "perturbed";
    case InitKind::nystrom_via_gradient: return "grad";
  }
  return "?";
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("init: ") + what + " must be positive");
}

bool sketch_rank_ok(const Matrix& x0, Eigen::Index r, Eigen::Index r_a) {
  return numerical_rank(x0) == std::min(r, r_a);
}

Matrix sketch(const Matrix& a, Eigen::Index r, const InitSpec& spec) {
  require_positive(spec.xi, "xi");
  if (r < 1) throw InvalidArgument("init: rank must be >= 1");
  return a * gaussian(a.cols(), r, spec.xi, spec.seed);
}

InitResult finish_sketch(Matrix x0, const Matrix& a, Eigen::Index r, Kind kind) {
  InitResult out;
  out.rank_ok = sketch_rank_ok(x0, r, numerical_rank(a));
  if (kind == Kind::asymmetric) out.y0 = Matrix::Zero(a.cols(), r);
  out.x0 = std::move(x0);
  return out;
}

// Probe scale for the gradient-only initializer. The cubic term of the
// symmetric gradient at t * Omega is O(t^3) = 2^-1200 and underflows to zero,
// leaving -t * A * Omega with the same rounding as A * Omega.
constexpr double kProbeScale = 0x1.0p-400;

}  // namespace

InitResult nystrom_init(const Matrix& a, Eigen::Index r, Kind kind, const InitSpec& spec) {
  if (kind == Kind::symmetric && a.rows() != a.cols()) throw InvalidArgument("init: symmetric target must be square");
  return finish_sketch(sketch(a, r, spec), a, r, kind);
}

InitResult small_gaussian_init(Eigen::Index m, Eigen::Index n, Eigen::Index r, Kind kind,
                               const InitSpec& spec) {
  require_positive(spec.zeta, "zeta");
  InitResult out;
  out.x0 = gaussian(m, r, spec.zeta, spec.seed);
  if (kind == Kind::asymmetric) out.y0 = gaussian(n, r, spec.zeta, spec.seed.offset(1));
  out.rank_ok = numerical_rank(out.x0) == r && (!out.y0 || numerical_rank(*out.y0) == r);
  return out;
}

InitResult perturbed_nystrom_init(const Matrix& a, Eigen::Index r, Kind kind, const InitSpec& spec) {
  if (!(spec.xi_n >= 0.0)) throw InvalidArgument("init: xi_n must be non-negative");
  Matrix x0 = sketch(a, r, spec);
  if (spec.xi_n > 0.0) x0 += gaussian(x0.rows(), x0.cols(), spec.xi_n, spec.seed.offset(kNoiseSeedOffset));
  return finish_sketch(std::move(x0), a, r, kind);
}

InitResult nystrom_via_gradient(const SymGradOracle& grad, Eigen::Index m, Eigen::Index r,
                                const InitSpec& spec) {
  require_positive(spec.xi, "xi");
  const Matrix omega = gaussian(m, r, spec.xi, spec.seed);
  // X0 = -G0 + Omega Omega^T Omega, evaluated at the probe t * Omega and
  // rescaled by 1/t (powers of two, so both scalings are exact).
  const Matrix probe = kProbeScale * omega;
  const Matrix g0 = grad(probe);
  if (g0.rows() != m || g0.cols() != r) throw InvalidArgument("init: gradient oracle returned the wrong shape");
  Matrix x0 = (-g0 + probe * (probe.transpose() * probe)) / kProbeScale;
  InitResult out;
  out.rank_ok = numerical_rank(x0) == r;
  out.x0 = std::move(x0);
  return out;
}

InitResult nystrom_via_gradient(const AsymGradOracle& grad, Eigen::Index m, Eigen::Index n,
                                Eigen::Index r, const InitSpec& spec) {
  require_positive(spec.xi, "xi");
  const Matrix omega = gaussian(n, r, spec.xi, spec.seed);
  auto [gx, gy] = grad(Matrix::Zero(m, r), omega);
  if (gx.rows() != m || gx.cols() != r) throw InvalidArgument("init: gradient oracle returned the wrong shape");
  InitResult out;
  out.x0 = -gx;
  out.y0 = Matrix::Zero(n, r);
  out.rank_ok = numerical_rank(out.x0) == r;
  return out;
}

InitResult initialize(const Problem& problem, const InitSpec& spec) {
  const Matrix& a = problem.a;
  switch (spec.kind) {
    case InitKind::nystrom:
      return nystrom_init(a, problem.r, problem.kind, spec);
    case InitKind::small_gaussian:
      return small_gaussian_init(a.rows(), a.cols(), problem.r, problem.kind, spec);
    case InitKind::perturbed_nystrom:
      return perturbed_nystrom_init(a, problem.r, problem.kind, spec);
    case InitKind::nystrom_via_gradient: {
      InitResult out;
      if (problem.symmetric()) {
        out = nystrom_via_gradient(SymGradOracle([&a](const Matrix& x) -> Matrix {
                                     return (x * x.transpose() - a) * x;
                                   }),
                                   a.rows(), problem.r, spec);
      } else {
        out = nystrom_via_gradient(AsymGradOracle([&a](const Matrix& x, const Matrix& y) {
                                     const Matrix res = x * y.transpose() - a;
                                     return std::pair<Matrix, Matrix>(res * y, res.transpose() * x);
                                   }),
                                   a.rows(), a.cols(), problem.r, spec);
      }
      // The oracle hides A, so the rank check is redone against r_A here.
      out.rank_ok = numerical_rank(out.x0) == std::min(problem.r, problem.r_a);
      return out;
    }
  }
  throw InvalidArgument("init: unknown kind");
}

}  // namespace mf
