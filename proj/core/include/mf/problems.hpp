#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mf/matcore.hpp"

namespace mf {

enum class Kind { symmetric, asymmetric };
enum class Regime { ep, op, up };

std::string_view to_string(Kind k);
std::string_view to_string(Regime r);

struct TargetSpec {
  Eigen::Index m = 0;
  Eigen::Index n = 0;  // ignored (taken as m) for symmetric targets
  std::vector<double> spectrum;
  bool symmetric = true;
  Seed seed{};
};

/// Target matrix plus the exact factors it was built from. `u` and `v` hold
/// orthonormal bases of the column and row spaces (u == v for symmetric
/// targets) and `sigma` the non-zero singular values, descending.
struct Target {
  Matrix a;
  Matrix u;
  Matrix v;
  Vector sigma;
};

/// Checks the TargetSpec invariants; throws InvalidArgument.
void validate(const TargetSpec& spec);

/// A = Q diag(spectrum) Q^T (symmetric) or U diag(spectrum) V^T with the
/// orthonormal factors drawn from seeded Gaussians (seed, seed + 1).
Target synthesize(const TargetSpec& spec);
Matrix synthesize_target(const TargetSpec& spec);

Regime classify_regime(Eigen::Index r_a, Eigen::Index r);

struct Problem {
  Matrix a;
  Eigen::Index r = 0;
  Kind kind = Kind::symmetric;
  Eigen::Index r_a = 0;
  double kappa = 1.0;
  Regime regime = Regime::ep;

  // Column/row space bases and non-zero singular values of A.
  Matrix u;
  Matrix v;
  Vector sigma;
  Matrix a_pinv;

  Eigen::Index rows() const { return a.rows(); }
  Eigen::Index cols() const { return a.cols(); }
  bool symmetric() const { return kind == Kind::symmetric; }
  /// sigma_{r_A}(A): the smallest non-zero singular value.
  double sigma_min() const { return sigma.size() ? sigma(sigma.size() - 1) : 0.0; }
  double frobenius() const { return a.norm(); }
};

/// Problem from a synthesized target. kappa comes from the declared spectrum.
Problem make_problem(const TargetSpec& spec, Eigen::Index r);

/// Problem for an arbitrary finite matrix; bases and kappa come from its SVD.
/// Symmetric kind requires a square, symmetric, PSD matrix.
Problem make_problem(const Matrix& a, Eigen::Index r, Kind kind);

/// Parses `list:1.0,0.99,0.01`, `lin:start,step,count[,tail...]` or
/// `geo:first,last,count`.
std::vector<double> parse_spectrum(std::string_view shorthand);

}  // namespace mf
