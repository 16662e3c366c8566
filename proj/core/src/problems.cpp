#include "mf/problems.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace mf {

std::string_view to_string(Kind k) { return k == Kind::symmetric ? "sym" : "asym"; }

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::ep: return "ep";
    case Regime::op: return "op";
    case Regime::up: return "up";
  }
  return "?";
}

void validate(const TargetSpec& spec) {
  const Eigen::Index n = spec.symmetric ? spec.m : spec.n;
  if (spec.m < 1 || n < 1) throw InvalidArgument("target: dimensions must be positive");
  if (spec.spectrum.empty()) throw InvalidArgument("target: spectrum is empty");
  if (static_cast<Eigen::Index>(spec.spectrum.size()) > std::min(spec.m, n)) {
    throw InvalidArgument("target: spectrum has " + std::to_string(spec.spectrum.size()) +
                          " values but min(m, n) = " + std::to_string(std::min(spec.m, n)));
  }
  for (std::size_t i = 0; i < spec.spectrum.size(); ++i) {
    const double s = spec.spectrum[i];
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("target: spectrum must be positive");
    if (i > 0 && s > spec.spectrum[i - 1]) throw InvalidArgument("target: spectrum must be non-increasing");
  }
}

Target synthesize(const TargetSpec& spec) {
  validate(spec);
  const auto k = static_cast<Eigen::Index>(spec.spectrum.size());
  const Eigen::Index n = spec.symmetric ? spec.m : spec.n;
  Target t;
  t.sigma = Eigen::Map<const Vector>(spec.spectrum.data(), k);
  t.u = orthonormalize(gaussian(spec.m, k, 1.0, spec.seed));
  t.v = spec.symmetric ? t.u : orthonormalize(gaussian(n, k, 1.0, spec.seed.offset(1)));
  t.a = t.u * t.sigma.asDiagonal() * t.v.transpose();
  if (spec.symmetric) t.a = 0.5 * (t.a + t.a.transpose());
  return t;
}

Matrix synthesize_target(const TargetSpec& spec) { return synthesize(spec).a; }

Regime classify_regime(Eigen::Index r_a, Eigen::Index r) {
  if (r == r_a) return Regime::ep;
  return r > r_a ? Regime::op : Regime::up;
}

namespace {

void finish(Problem& p) {
  p.r_a = p.sigma.size();
  p.kappa = p.r_a ? p.sigma(0) / p.sigma(p.r_a - 1) : 1.0;
  p.regime = classify_regime(p.r_a, p.r);
  p.a_pinv = p.v * p.sigma.cwiseInverse().asDiagonal() * p.u.transpose();
}

}  // namespace

Problem make_problem(const TargetSpec& spec, Eigen::Index r) {
  if (r < 1) throw InvalidArgument("problem: rank r must be >= 1");
  Target t = synthesize(spec);
  Problem p;
  p.a = std::move(t.a);
  p.r = r;
  p.kind = spec.symmetric ? Kind::symmetric : Kind::asymmetric;
  p.u = std::move(t.u);
  p.v = std::move(t.v);
  p.sigma = std::move(t.sigma);
  finish(p);
  return p;
}

Problem make_problem(const Matrix& a, Eigen::Index r, Kind kind) {
  if (r < 1) throw InvalidArgument("problem: rank r must be >= 1");
  if (a.size() == 0 || !all_finite(a)) throw InvalidArgument("problem: target must be finite and non-empty");
  Problem p;
  p.a = a;
  p.r = r;
  p.kind = kind;
  SvdResult d = svd(a);
  if (kind == Kind::symmetric) {
    if (a.rows() != a.cols()) throw InvalidArgument("problem: symmetric target must be square");
    const double scale = d.rank() ? d.s(0) : 1.0;
    if ((a - a.transpose()).norm() > 1e-12 * std::max(scale, 1.0)) {
      throw InvalidArgument("problem: symmetric target is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) throw InvalidArgument("problem: symmetric target is not PSD");
    p.u = d.u;
    p.v = d.u;
  } else {
    p.u = d.u;
    p.v = d.v;
  }
  p.sigma = d.s;
  finish(p);
  return p;
}

namespace {

double to_double(std::string_view tok, std::string_view whole) {
  while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
  while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
  // std::from_chars for double needs GCC 11+, which we require anyway.
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw InvalidArgument("spectrum: bad number '" + std::string(tok) + "' in '" + std::string(whole) + "'");
  }
  return v;
}

std::vector<double> split_numbers(std::string_view body, std::string_view whole) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    const std::size_t comma = body.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? body.size() : comma;
    out.push_back(to_double(body.substr(start, end - start), whole));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<double> parse_spectrum(std::string_view shorthand) {
  const std::size_t colon = shorthand.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("spectrum: expected 'list:', 'lin:' or 'geo:' prefix in '" + std::string(shorthand) + "'");
  }
  const std::string_view kind = shorthand.substr(0, colon);
  const std::vector<double> nums = split_numbers(shorthand.substr(colon + 1), shorthand);
  std::vector<double> out;
  if (kind == "list") {
    out = nums;
  } else if (kind == "lin") {
    if (nums.size() < 3) throw InvalidArgument("spectrum: lin needs start,step,count[,tail...]");
    const double count = nums[2];
    if (count < 0 || count != std::floor(count)) throw InvalidArgument("spectrum: lin count must be a non-negative integer");
    for (int i = 0; i < static_cast<int>(count); ++i) {
      // Round to 12 decimals so 1.0 - 0.01 * i reproduces the literal list.
      const double v = nums[0] + nums[1] * i;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    out.insert(out.end(), nums.begin() + 3, nums.end());
  } else if (kind == "geo") {
    if (nums.size() != 3) throw InvalidArgument("spectrum: geo needs first,last,count");
    const double count = nums[2];
    if (count < 1 || count != std::floor(count)) throw InvalidArgument("spectrum: geo count must be a positive integer");
    const int k = static_cast<int>(count);
    if (!(nums[0] > 0.0) || !(nums[1] > 0.0)) throw InvalidArgument("spectrum: geo endpoints must be positive");
    for (int i = 0; i < k; ++i) {
      out.push_back(k == 1 ? nums[0] : nums[0] * std::pow(nums[1] / nums[0], static_cast<double>(i) / (k - 1)));
    }
    if (k > 1) out.back() = nums[1];
  } else {
    throw InvalidArgument("spectrum: unknown generator '" + std::string(kind) + "'");
  }
  if (out.empty()) throw InvalidArgument("spectrum: empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) throw InvalidArgument("spectrum: values must be positive");
    if (i > 0 && out[i] > out[i - 1]) throw InvalidArgument("spectrum: values must be non-increasing");
  }
  return out;
}

}  // namespace mf
