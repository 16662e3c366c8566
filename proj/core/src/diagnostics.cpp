#include "mf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mf {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::budget: return "budget";
    case Termination::diverged: return "diverged";
    case Termination::singular_gram: return "singular-gram";
    case Termination::refused_start: return "refused-start";
  }
  return "?";
}

std::optional<Termination> termination_from_string(std::string_view s) {
  for (auto t : {Termination::converged, Termination::budget, Termination::diverged,
                 Termination::singular_gram, Termination::refused_start}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(RateVerdict v) {
  switch (v) {
    case RateVerdict::one_step: return "one_step";
    case RateVerdict::quadratic: return "quadratic";
    case RateVerdict::linear: return "linear";
    case RateVerdict::sublinear: return "sublinear";
    case RateVerdict::stalled: return "stalled";
    case RateVerdict::indeterminate: return "indeterminate";
  }
  return "?";
}

std::optional<RateVerdict> verdict_from_string(std::string_view s) {
  for (auto v : {RateVerdict::one_step, RateVerdict::quadratic, RateVerdict::linear,
                 RateVerdict::sublinear, RateVerdict::stalled, RateVerdict::indeterminate}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::vector<double> Trace::errors() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.error);
  return out;
}

std::vector<double> Trace::weak_opts() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.weak_opt);
  return out;
}

double optimality_error(const Matrix& x, const Matrix& a) { return (x * x.transpose() - a).norm(); }

double optimality_error(const Matrix& x, const Matrix& y, const Matrix& a) {
  return (x * y.transpose() - a).norm();
}

double weak_opt_residual(const Matrix& x, const Matrix& a_pinv) {
  return weak_opt_residual(x, x, a_pinv);
}

double weak_opt_residual(const Matrix& x, const Matrix& y, const Matrix& a_pinv) {
  Matrix w = y.transpose() * (a_pinv * x);
  w.diagonal().array() -= 1.0;
  return w.norm();
}

double residual_leakage(const Matrix& x, const Matrix& col_basis_q) {
  const Matrix outside = x - col_basis_q * (col_basis_q.transpose() * x);
  return outside.norm() / std::max(x.norm(), kEps);
}

double sigma_r_core(const Matrix& x, Eigen::Index r_a) {
  const Eigen::Index k = std::min<Eigen::Index>(x.cols(), r_a);
  if (k < 1) return 0.0;
  const Vector s = singular_values(x);
  if (s.size() < k) return 0.0;
  return s(k - 1) * s(k - 1);
}

double procrustes_distance(const Matrix& x, const Matrix& x_star) {
  if (x.rows() != x_star.rows() || x.cols() != x_star.cols()) {
    throw InvalidArgument("procrustes_distance: shape mismatch");
  }
  // R = U V^T from x^T x* = U S V^T attains the minimum; evaluating the
  // residual directly avoids cancellation when the distance is tiny.
  Eigen::JacobiSVD<Matrix> svd(x.transpose() * x_star, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix rot = svd.matrixU() * svd.matrixV().transpose();
  return (x * rot - x_star).norm();
}

OptimumDistance optimum_distance(const Problem& problem, const Matrix& x) {
  if (!problem.symmetric()) throw InvalidArgument("optimum_distance: symmetric problems only");
  if (x.rows() != problem.rows()) throw InvalidArgument("optimum_distance: shape mismatch");
  const Eigen::Index k = std::min<Eigen::Index>(x.cols(), problem.r_a);
  Matrix x_star = Matrix::Zero(x.rows(), x.cols());
  x_star.leftCols(k) = problem.u.leftCols(k) * problem.sigma.head(k).cwiseSqrt().asDiagonal();
  return {(x - x_star).norm(), procrustes_distance(x, x_star)};
}

double fitted_constant(std::span<const double> values, std::span<const double> scales) {
  if (values.size() != scales.size() || values.empty()) {
    throw InvalidArgument("fitted_constant: need equally many values and scales");
  }
  double c = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(scales[i] > 0.0)) throw InvalidArgument("fitted_constant: scales must be positive");
    c = std::max(c, values[i] / scales[i]);
  }
  return c;
}

double lemma2_lower_bound(int t, double eta, double sigma_r_b0, double sigma_r_a) {
  const double q = 1.0 - eta;
  return std::pow(q, 2 * t + 2) * sigma_r_b0 + q * sigma_r_a - std::pow(q, 2 * t + 3) * sigma_r_a;
}

IterRecord measure(const Problem& problem, const Matrix& x, const Matrix* y, int t, double eta) {
  IterRecord rec;
  rec.t = t;
  rec.eta_used = eta;
  if (y) {
    rec.error = optimality_error(x, *y, problem.a);
    rec.leakage_y = residual_leakage(*y, problem.v);
    rec.weak_opt = weak_opt_residual(x, *y, problem.a_pinv);
  } else {
    rec.error = optimality_error(x, problem.a);
    rec.weak_opt = weak_opt_residual(x, problem.a_pinv);
  }
  rec.leakage_x = residual_leakage(x, problem.u);
  if (all_finite(x)) rec.sigma_r_core = sigma_r_core(x, problem.r_a);
  else rec.sigma_r_core = std::numeric_limits<double>::quiet_NaN();
  return rec;
}

double rate_floor(double a_frobenius, std::span<const double> errors) {
  double scale = a_frobenius;
  for (double e : errors) {
    if (std::isfinite(e)) scale = std::max(scale, e);
  }
  return 100.0 * kEps * scale;
}

RateEstimate classify_rate(std::span<const double> errors, const RateOptions& opts) {
  const int n = static_cast<int>(errors.size());
  if (n >= 2 && std::isfinite(errors[0]) && errors[0] > 0.0 && std::isfinite(errors[1]) &&
      errors[1] / errors[0] <= 1e-8) {
    RateEstimate est;
    est.verdict = RateVerdict::one_step;
    est.window_begin = 0;
    est.window_end = 1;
    est.contraction = errors[1] / errors[0];
    return est;
  }

  auto usable = [&](int i) { return std::isfinite(errors[i]) && errors[i] > opts.floor && errors[i] > 0.0; };
  // Consecutive usable pairs (e_i, e_{i+1}) from the trailing contiguous
  // stretch of usable values, at most window - 1 of them.
  std::vector<int> pair_starts;
  int last = n - 1;
  while (last >= 0 && !usable(last)) --last;
  int first = last;
  while (first > 0 && usable(first - 1)) --first;
  const int max_pairs = std::max(opts.window - 1, 2);
  for (int i = std::max(first, last - max_pairs); i < last; ++i) pair_starts.push_back(i);
  if (pair_starts.size() < 2) throw InsufficientData("classify_rate: fewer than 3 usable error values");

  const std::size_t np = pair_starts.size();
  std::vector<double> xs(np), ys(np);
  for (std::size_t k = 0; k < np; ++k) {
    xs[k] = std::log(errors[pair_starts[k]]);
    ys[k] = std::log(errors[pair_starts[k] + 1]);
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < np; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= np;
  my /= np;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < np; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }

  RateEstimate est;
  est.window_begin = pair_starts.front();
  est.window_end = pair_starts.back() + 1;
  est.phase2_slope = sxx > 0.0 ? sxy / sxx : 1.0;
  const double intercept = my - est.phase2_slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < np; ++k) {
    const double r = ys[k] - (est.phase2_slope * xs[k] + intercept);
    ssr += r * r;
  }
  est.confidence = syy > 0.0 ? std::sqrt(ssr / syy) : 0.0;
  est.low_confidence = est.confidence > opts.max_residual;
  double mean_log_ratio = 0.0;
  for (std::size_t k = 0; k < np; ++k) mean_log_ratio += ys[k] - xs[k];
  est.contraction = std::exp(mean_log_ratio / static_cast<double>(np));

  const double p = est.phase2_slope;
  if (est.contraction >= 0.999) {
    est.verdict = RateVerdict::stalled;
  } else if (p >= 1.7 && p <= 2.3) {
    est.verdict = RateVerdict::quadratic;
  } else if (p >= 0.8 && p <= 1.2) {
    // A log-contraction that shrinks by more than 20% across the window
    // means the per-step ratio is drifting towards 1.
    const double first_step = ys.front() - xs.front();
    const double last_step = ys.back() - xs.back();
    est.verdict = (first_step < 0.0 && last_step > 0.8 * first_step) ? RateVerdict::sublinear : RateVerdict::linear;
  } else if (p < 0.8) {
    est.verdict = RateVerdict::sublinear;
  } else {
    est.verdict = RateVerdict::indeterminate;
    est.low_confidence = true;
  }
  return est;
}

double max_leakage(const Trace& trace) {
  double worst = 0.0;
  for (const auto& r : trace.records) worst = std::max({worst, r.leakage_x, r.leakage_y});
  return worst;
}

double sigma_bound_margin(const Trace& trace, double eta, double sigma_r_a) {
  if (trace.records.empty()) return 0.0;
  const double b0 = trace.records.front().sigma_r_core;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const auto& rec = trace.records[i];
    const double bound = lemma2_lower_bound(rec.t - 1, eta, b0, sigma_r_a);
    worst = std::min(worst, rec.sigma_r_core - bound);
  }
  return std::isfinite(worst) ? worst : 0.0;
}

ContractionCheck quadratic_contraction(const Trace& trace, double kappa, double sigma_min_a, double slack) {
  ContractionCheck out;
  const auto& recs = trace.records;
  const double radius = 2.0 / (3.0 * kappa * kappa);
  const double c = 0.75 * kappa * kappa;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    if (!out.applicable) {
      if (recs[i].error <= radius && recs[i].sigma_r_core >= sigma_min_a / 3.0) {
        out.applicable = true;
        out.entry_t = recs[i].t;
      } else {
        continue;
      }
    }
    const double excess = recs[i + 1].error - c * recs[i].error * recs[i].error;
    out.worst_excess = recs[i].t == out.entry_t ? excess : std::max(out.worst_excess, excess);
    if (excess > slack) out.holds = false;
  }
  return out;
}

double b_recursion_mismatch(const Matrix& x_t, const Matrix& x_next, const Matrix& q, const Matrix& a,
                            double eta) {
  const Matrix phi = q.transpose() * x_t;
  const Matrix phi_next = q.transpose() * x_next;
  const Matrix s = q.transpose() * a * q;
  const Matrix b = phi * phi.transpose();
  const Matrix b_next = phi_next * phi_next.transpose();
  const Matrix predicted = (1 - eta) * (1 - eta) * b + 2 * eta * (1 - eta) * s +
                           eta * eta * s * b.ldlt().solve(s);
  return (b_next - predicted).norm() / std::max(b_next.norm(), kEps);
}

double weak_opt_plateau(const Trace& trace, double eta, double horizon) {
  if (!(eta > 0.0)) throw InvalidArgument("weak_opt_plateau: eta must be positive");
  const int t_target = static_cast<int>(std::ceil(horizon / eta - 1e-9));
  for (const auto& r : trace.records) {
    if (r.t == t_target) return r.weak_opt;
  }
  throw InsufficientData("weak_opt_plateau: trace ends before iteration " + std::to_string(t_target));
}

}  // namespace mf
