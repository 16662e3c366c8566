#include "mf/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 53 random mantissa bits in (0, 1]; never returns 0 so log() stays finite.
double open_unit(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

Matrix symmetrized_gram(const Matrix& x) {
  Matrix g = x.transpose() * x;
  return 0.5 * (g + g.transpose());
}

double smallest_singular_value(const Matrix& x) {
  if (x.cols() == 0) return 0.0;
  Vector s = singular_values(x);
  return x.cols() > x.rows() ? 0.0 : s(s.size() - 1);
}

}  // namespace

double rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * kEps * sigma_max;
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double std, Seed seed) {
  if (rows < 1 || cols < 1) throw InvalidArgument("gaussian: shape must be positive");
  if (!(std > 0.0) || !std::isfinite(std)) throw InvalidArgument("gaussian: std must be positive");
  std::mt19937_64 gen(seed.value);
  Matrix out(rows, cols);
  // Box-Muller produces pairs; consume them row-major.
  double spare = 0.0;
  bool have_spare = false;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double z;
      if (have_spare) {
        z = spare;
        have_spare = false;
      } else {
        const double u1 = open_unit(gen);
        const double u2 = open_unit(gen);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        z = radius * std::cos(angle);
        spare = radius * std::sin(angle);
        have_spare = true;
      }
      out(i, j) = std * z;
    }
  }
  return out;
}

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> dec(a);
  if (dec.info() != Eigen::Success) {
    throw NumericalFailure("svd did not converge", static_cast<int>(std::min(a.rows(), a.cols())));
  }
  return dec.singularValues();
}

SvdResult svd(const Matrix& a) {
  if (!all_finite(a)) throw InvalidArgument("svd: non-finite input");
  SvdResult out;
  if (a.size() == 0) {
    out.u = Matrix(a.rows(), 0);
    out.v = Matrix(a.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericalFailure("svd did not converge", static_cast<int>(std::min(a.rows(), a.cols())));
  }
  const Vector& s = dec.singularValues();
  Eigen::Index k = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double tol = rank_tolerance(a.rows(), a.cols(), s(0));
    while (k < s.size() && s(k) > tol) ++k;
  }
  out.u = dec.matrixU().leftCols(k);
  out.s = s.head(k);
  out.v = dec.matrixV().leftCols(k);
  return out;
}

Eigen::Index numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Vector s = singular_values(a);
  if (s(0) <= 0.0) return 0;
  const double tol = rank_tolerance(a.rows(), a.cols(), s(0));
  return (s.array() > tol).count();
}

Matrix pinv(const Matrix& a) {
  SvdResult d = svd(a);
  return d.v * d.s.cwiseInverse().asDiagonal() * d.u.transpose();
}

Matrix column_basis(const Matrix& a) { return svd(a).u; }

Matrix orthonormalize(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  // Fix signs so that diag(R) >= 0; makes the factor unique.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix gram_solve(const Matrix& x, const Matrix& b) {
  if (b.cols() != x.cols()) throw InvalidArgument("gram_solve: b must have cols(x) columns");
  if (x.cols() > x.rows()) throw SingularGram(0.0);
  // Same rank convention as everywhere else: sigma_min(x) must clear the
  // tolerance relative to sigma_max(x).
  const Vector s = singular_values(x);
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  if (s.size() == 0 || smin <= rank_tolerance(x.rows(), x.cols(), s(0))) throw SingularGram(smin);
  // x = QR gives x^T x = R^T R, so b G^{-1} = ((R^{-1} R^{-T}) b^T)^T without
  // forming G and squaring cond(x).
  const Eigen::HouseholderQR<Matrix> qr(x);
  const Matrix r = qr.matrixQR().topRows(x.cols()).triangularView<Eigen::Upper>();
  const Matrix z = r.transpose().triangularView<Eigen::Lower>().solve(b.transpose());
  return r.triangularView<Eigen::Upper>().solve(z).transpose();
}

Matrix damped_gram_solve(const Matrix& x, const Matrix& b, double lambda) {
  if (b.cols() != x.cols()) throw InvalidArgument("damped_gram_solve: b must have cols(x) columns");
  if (!(lambda >= 0.0)) throw InvalidArgument("damped_gram_solve: lambda must be non-negative");
  if (lambda == 0.0) return gram_solve(x, b);
  Matrix g = symmetrized_gram(x);
  g.diagonal().array() += lambda;
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw SingularGram(smallest_singular_value(x));
  return llt.solve(b.transpose()).transpose();
}

Matrix gram_pinv(const Matrix& x) {
  SvdResult d = svd(x);
  return d.v * d.s.array().square().inverse().matrix().asDiagonal() * d.v.transpose();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace mf
