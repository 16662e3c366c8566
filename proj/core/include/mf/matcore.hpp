#pragma once

// Dense linear-algebra kernel shared by every other module. Matrices are
// plain Eigen dynamic matrices; this header adds the few decompositions the
// solvers need with a single, consistent numerical-rank convention.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Seed {
  std::uint64_t value = 0;

  constexpr Seed() = default;
  constexpr explicit Seed(std::uint64_t v) : value(v) {}
  constexpr Seed offset(std::uint64_t k) const { return Seed(value + k); }
  friend constexpr bool operator==(Seed, Seed) = default;
};

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

/// Raised when X^T X cannot be factored as a positive-definite matrix.
class SingularGram : public std::runtime_error {
 public:
  explicit SingularGram(double sigma_min)
      : std::runtime_error("singular Gram matrix (sigma_min = " + std::to_string(sigma_min) + ")"),
        sigma_min_(sigma_min) {}
  double sigma_min() const { return sigma_min_; }

 private:
  double sigma_min_;
};

struct SvdResult {
  Matrix u;  // m x k
  Vector s;  // k, descending
  Matrix v;  // n x k

  Eigen::Index rank() const { return s.size(); }
  Matrix reconstruct() const { return u * s.asDiagonal() * v.transpose(); }
};

/// sigma_i counts as zero iff sigma_i <= max(m, n) * eps * sigma_1.
double rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max);

/// I.i.d. N(0, std^2) entries. The stream is mt19937_64 keyed by the seed,
/// mapped through Box-Muller, filled in row-major order; identical on every
/// platform with IEEE doubles.
Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double std, Seed seed);

/// Compact SVD truncated at the numerical rank.
SvdResult svd(const Matrix& a);

/// Full list of singular values (no truncation), descending.
Vector singular_values(const Matrix& a);

Eigen::Index numerical_rank(const Matrix& a);

Matrix pinv(const Matrix& a);

/// Orthonormal basis of the numerical column space of `a`.
Matrix column_basis(const Matrix& a);

/// Orthonormal factor of a thin Householder QR (columns of `a` must be
/// linearly independent).
Matrix orthonormalize(const Matrix& a);

/// b * (x^T x)^{-1} through the R factor of a Householder QR of x. Throws SingularGram when x is numerically rank deficient.
Matrix gram_solve(const Matrix& x, const Matrix& b);

/// b * (x^T x + lambda I)^{-1}; lambda > 0 keeps this defined for any x.
Matrix damped_gram_solve(const Matrix& x, const Matrix& b, double lambda);

/// (x^T x)^dagger computed from the SVD of x, so the cut-off follows the
/// rank of x rather than the squared spectrum of its Gram matrix.
Matrix gram_pinv(const Matrix& x);

bool all_finite(const Matrix& a);

}  // namespace mf
