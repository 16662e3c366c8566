#include <gtest/gtest.h>

#include <cmath>

#include "mf/diagnostics.hpp"
#include "mf/initialization.hpp"
#include "mf/solvers.hpp"

using mf::Matrix;
using mf::Seed;

namespace {

mf::Problem sym_problem(Eigen::Index m, const char* spectrum, Eigen::Index r, std::uint64_t seed = 1) {
  mf::TargetSpec t;
  t.m = m;
  t.n = m;
  t.spectrum = mf::parse_spectrum(spectrum);
  t.symmetric = true;
  t.seed = Seed(seed);
  return mf::make_problem(t, r);
}

mf::InitResult nystrom(const mf::Problem& p, std::uint64_t seed) {
  mf::InitSpec s;
  s.seed = Seed(seed);
  return mf::initialize(p, s);
}

mf::RateVerdict verdict(std::vector<double> e) { return mf::classify_rate(e).verdict; }

}  // namespace

TEST(OptimalityError, Examples) {
  EXPECT_EQ(mf::optimality_error(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), 0.0);
  const Matrix a = mf::gaussian(3, 3, 1.0, Seed(1));
  EXPECT_DOUBLE_EQ(mf::optimality_error(Matrix::Zero(3, 2), a), a.norm());
  Matrix x(2, 1), y(2, 1);
  x << 1, 1;
  y << 1, 0;
  EXPECT_NEAR(mf::optimality_error(x, y, Matrix::Identity(2, 2)), std::sqrt(2.0), 1e-15);
}

TEST(WeakOpt, TopFactorIsWeaklyOptimal) {
  const mf::Problem p = sym_problem(12, "list:3,2,1,0.5", 2);
  const Matrix x = p.u.leftCols(2) * p.sigma.head(2).cwiseSqrt().asDiagonal();
  EXPECT_LE(mf::weak_opt_residual(x, p.a_pinv), 1e-10);
}

TEST(WeakOpt, ZeroFactor) {
  EXPECT_NEAR(mf::weak_opt_residual(Matrix::Zero(4, 3), Matrix::Identity(4, 4)), std::sqrt(3.0), 1e-15);
}

TEST(WeakOpt, AsymmetricAfterOneStep) {
  mf::TargetSpec t;
  t.m = 20;
  t.n = 15;
  t.spectrum = mf::parse_spectrum("geo:1,0.01,8");
  t.symmetric = false;
  t.seed = Seed(3);
  const mf::Problem p = mf::make_problem(t, 4);
  const auto init = nystrom(p, 5);
  const auto next = mf::scaledgd_asym_step(mf::IterState{0, init.x0, init.y0, 0.0}, p.a, 1.0, mf::PrecondMode::inverse);
  EXPECT_LE(mf::weak_opt_residual(next.x, *next.y, p.a_pinv), 1e-10);
}

TEST(WeakOpt, WeakOptimalityIsBasisIndependent) {
  // (X, Y) -> (X G, Y G^{-T}) maps the residual matrix R to G^{-1} R G, so
  // the zero set is invariant for any invertible G and the norm for
  // orthogonal G.
  mf::TargetSpec t;
  t.m = 20;
  t.n = 15;
  t.spectrum = mf::parse_spectrum("geo:1,0.01,8");
  t.symmetric = false;
  t.seed = Seed(3);
  const mf::Problem p = mf::make_problem(t, 4);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto init = nystrom(p, s);
    const auto opt =
        mf::scaledgd_asym_step(mf::IterState{0, init.x0, init.y0, 0.0}, p.a, 1.0, mf::PrecondMode::inverse);
    const Matrix g = mf::gaussian(4, 4, 1.0, Seed(100 + s)) + 3.0 * Matrix::Identity(4, 4);
    const Matrix g_inv_t = g.inverse().transpose();
    EXPECT_LE(mf::weak_opt_residual(opt.x * g, *opt.y * g_inv_t, p.a_pinv), 1e-9);

    const Matrix x = mf::gaussian(20, 4, 1.0, Seed(200 + s));
    const Matrix y = mf::gaussian(15, 4, 1.0, Seed(300 + s));
    const double base = mf::weak_opt_residual(x, y, p.a_pinv);
    const Matrix rot = mf::orthonormalize(mf::gaussian(4, 4, 1.0, Seed(400 + s)));
    EXPECT_NEAR(mf::weak_opt_residual(x * rot, y * rot, p.a_pinv), base, 1e-10 * base);
    const Matrix r = y.transpose() * p.a_pinv * x - Matrix::Identity(4, 4);
    const double similar = (g.inverse() * r * g).norm();
    EXPECT_NEAR(mf::weak_opt_residual(x * g, y * g_inv_t, p.a_pinv), similar, 1e-9 * similar);
  }
}

TEST(Leakage, Examples) {
  const Matrix q = mf::orthonormalize(mf::gaussian(5, 2, 1.0, Seed(2)));
  EXPECT_LE(mf::residual_leakage(q, q), 1e-15);
  Eigen::JacobiSVD<Matrix> svd(q, Eigen::ComputeFullU);
  const Matrix perp = svd.matrixU().rightCols(3);
  EXPECT_NEAR(mf::residual_leakage(perp, q), 1.0, 1e-12);
  EXPECT_EQ(mf::residual_leakage(Matrix::Zero(5, 2), q), 0.0);
}

TEST(Leakage, NystromStartOfRankTwoTarget) {
  const mf::Problem p = sym_problem(4, "list:1,0.5", 2, 7);
  EXPECT_LE(mf::residual_leakage(nystrom(p, 1).x0, p.u), 1e-12);
}

TEST(Lemma2Bound, Examples) {
  EXPECT_EQ(mf::lemma2_lower_bound(3, 1.0, 2.0, 5.0), 0.0);
  EXPECT_DOUBLE_EQ(mf::lemma2_lower_bound(0, 0.5, 1.0, 1.0), 0.25 + 0.5 - 0.125);
  EXPECT_NEAR(mf::lemma2_lower_bound(200, 0.5, 1.0, 0.8), 0.4, 1e-15);
}

TEST(ClassifyRate, Examples) {
  const auto q = mf::classify_rate(std::vector<double>{1e-1, 1e-2, 1e-4, 1e-8, 1e-16});
  EXPECT_EQ(q.verdict, mf::RateVerdict::quadratic);
  EXPECT_NEAR(q.phase2_slope, 2.0, 0.05);
  const auto l = mf::classify_rate(std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
  EXPECT_EQ(l.verdict, mf::RateVerdict::linear);
  EXPECT_NEAR(l.phase2_slope, 1.0, 1e-9);
  EXPECT_NEAR(l.contraction, 0.1, 1e-9);
  EXPECT_EQ(verdict({1.0, 1e-14}), mf::RateVerdict::one_step);
}

TEST(ClassifyRate, OtherVerdicts) {
  std::vector<double> sub;
  for (int t = 1; t <= 5; ++t) sub.push_back(1.0 / (t * t));
  EXPECT_EQ(verdict(sub), mf::RateVerdict::sublinear);
  EXPECT_EQ(verdict({1.0, 0.9999, 0.9998, 0.9997, 0.9996, 0.9995}), mf::RateVerdict::stalled);
  std::vector<double> tail{1.0, 0.5, 0.25, 0.125};
  for (int i = 0; i < 5; ++i) tail.push_back(1e-20);  // below any floor
  mf::RateOptions o;
  o.floor = 1e-14;
  EXPECT_EQ(mf::classify_rate(tail, o).verdict, mf::RateVerdict::linear);
}

TEST(ClassifyRate, InsufficientData) {
  EXPECT_THROW(mf::classify_rate(std::vector<double>{0.0, 0.0, 0.0}), mf::InsufficientData);
  EXPECT_THROW(mf::classify_rate(std::vector<double>{1.0, 0.5}), mf::InsufficientData);
  EXPECT_THROW(mf::classify_rate(std::vector<double>{}), mf::InsufficientData);
}

TEST(ClassifyRate, ScaleInvariantVerdict) {
  const std::vector<std::vector<double>> seqs = {
      {1e-1, 1e-2, 1e-4, 1e-8, 1e-16}, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, {1.0, 0.5, 0.33, 0.25, 0.2, 0.1666}};
  for (const auto& s : seqs) {
    const auto base = verdict(s);
    for (double scale : {1e-3, 0.7, 42.0, 1e6}) {
      std::vector<double> scaled;
      for (double v : s) scaled.push_back(v * scale);
      EXPECT_EQ(verdict(scaled), base) << "scale " << scale;
    }
  }
}

TEST(ClassifyRate, FloorScalesWithLargestError) {
  const std::vector<double> e{10.0, 1.0};
  EXPECT_DOUBLE_EQ(mf::rate_floor(2.0, e), 100.0 * std::numeric_limits<double>::epsilon() * 10.0);
  EXPECT_DOUBLE_EQ(mf::rate_floor(20.0, e), 100.0 * std::numeric_limits<double>::epsilon() * 20.0);
}

TEST(Procrustes, Examples) {
  const Matrix xs = mf::gaussian(6, 3, 1.0, Seed(1));
  EXPECT_LE(mf::procrustes_distance(xs, xs), 1e-10);
  EXPECT_NEAR(mf::procrustes_distance(Matrix::Zero(6, 3), xs), xs.norm(), 1e-12);
  for (std::uint64_t s = 2; s < 12; ++s) {
    const Matrix rot = mf::orthonormalize(mf::gaussian(3, 3, 1.0, Seed(s)));
    EXPECT_LE(mf::procrustes_distance(xs * rot, xs), 1e-10);
    const Matrix other = mf::gaussian(6, 3, 1.0, Seed(100 + s));
    EXPECT_NEAR(mf::procrustes_distance(other * rot, xs), mf::procrustes_distance(other, xs), 1e-10);
  }
  EXPECT_THROW(mf::procrustes_distance(xs, Matrix::Zero(6, 2)), mf::InvalidArgument);
}

TEST(Measure, SymmetricRecord) {
  const mf::Problem p = sym_problem(10, "list:1,0.5,0.25", 2);
  const auto init = nystrom(p, 1);
  const auto rec = mf::measure(p, init.x0, nullptr, 4, 0.5);
  EXPECT_EQ(rec.t, 4);
  EXPECT_EQ(rec.eta_used, 0.5);
  EXPECT_DOUBLE_EQ(rec.error, mf::optimality_error(init.x0, p.a));
  EXPECT_EQ(rec.leakage_y, 0.0);
  EXPECT_LE(rec.leakage_x, 1e-12);
  const mf::Vector s = mf::singular_values(init.x0);
  EXPECT_NEAR(rec.sigma_r_core, s(1) * s(1), 1e-12);
}

TEST(Certifiers, EpRunSatisfiesLemmaTwoAndContraction) {
  const mf::Problem p = sym_problem(60, "geo:1,0.01,10", 10);
  mf::SolverConfig c;
  c.schedule = mf::Schedule::fixed_rate(0.5);
  c.max_iters = 100;
  const auto trace = mf::run(p, nystrom(p, 2), c);
  EXPECT_LE(mf::max_leakage(trace), 1e-9);
  EXPECT_GE(mf::sigma_bound_margin(trace, 0.5, p.sigma_min()), -1e-9);
  const auto cc = mf::quadratic_contraction(trace, p.kappa, p.sigma_min());
  EXPECT_TRUE(cc.applicable);
  EXPECT_TRUE(cc.holds);
  EXPECT_GE(cc.entry_t, 0);
}

TEST(Certifiers, ContractionDetectsLinearTail) {
  mf::Trace t;
  double e = 1e-6;
  for (int i = 0; i < 10; ++i, e *= 0.5) {
    mf::IterRecord r;
    r.t = i;
    r.error = e;
    r.sigma_r_core = 1.0;
    t.records.push_back(r);
  }
  const auto cc = mf::quadratic_contraction(t, 10.0, 1.0);
  EXPECT_TRUE(cc.applicable);
  EXPECT_FALSE(cc.holds);
  EXPECT_GT(cc.worst_excess, 0.0);
  mf::Trace far;
  far.records = {mf::IterRecord{0, 1.0}, mf::IterRecord{1, 0.9}};
  EXPECT_FALSE(mf::quadratic_contraction(far, 10.0, 1.0).applicable);
}

TEST(Certifiers, BRecursionMatches) {
  const mf::Problem p = sym_problem(30, "geo:1,0.05,6", 6);
  Matrix x = nystrom(p, 3).x0;
  for (int t = 0; t < 8; ++t) {
    const Matrix next = mf::scaledgd_sym_step(x, p.a, 0.5, mf::PrecondMode::inverse);
    EXPECT_LE(mf::b_recursion_mismatch(x, next, p.u, p.a, 0.5), 1e-8) << "t = " << t;
    x = next;
  }
  // A step that is not ScaledGD breaks the recursion.
  const Matrix wrong = mf::scaledgd_sym_step(x, p.a, 0.3, mf::PrecondMode::inverse);
  const Matrix x0 = nystrom(p, 3).x0;
  EXPECT_GT(mf::b_recursion_mismatch(x0, mf::scaledgd_sym_step(x0, p.a, 0.3, mf::PrecondMode::inverse), p.u, p.a, 0.5),
            1e-4);
  (void)wrong;
}

TEST(Plateau, RecordAtMatchedTime) {
  mf::Trace t;
  for (int i = 0; i <= 300; ++i) t.records.push_back(mf::IterRecord{i, 0.0, 0.0, 0.0, 0.0, 1.0 / (i + 1)});
  EXPECT_DOUBLE_EQ(mf::weak_opt_plateau(t, 0.1), 1.0 / 201);
  EXPECT_DOUBLE_EQ(mf::weak_opt_plateau(t, 0.5), 1.0 / 41);
  EXPECT_THROW(mf::weak_opt_plateau(t, 0.01), mf::InsufficientData);
}

TEST(UnderParametrized, PlateauConstantAndOptimumDistance) {
  // Constant step: the reported constant C in weak_opt <= C eta r is finite.
  const mf::Problem p = sym_problem(40, "geo:1,0.1,16", 4);
  mf::SolverConfig c;
  c.schedule = mf::Schedule::fixed_rate(0.1);
  c.max_iters = 400;
  const auto trace = mf::run(p, nystrom(p, 1), c);
  const double plateau = mf::weak_opt_plateau(trace, 0.1);
  const std::vector<double> v{plateau};
  const std::vector<double> sc{0.1 * 4};
  const double cfit = mf::fitted_constant(v, sc);
  EXPECT_TRUE(std::isfinite(cfit));
  EXPECT_GE(cfit, 0.0);

  // Distance to the aligned optimum over r in {2, 4, 8, 16}: report both
  // raw and rotation-minimized values, and the constant for r^{3/4}.
  const mf::Problem big = sym_problem(80, "geo:1,0.1,32", 2);
  std::vector<double> raw, rot, scale;
  for (Eigen::Index r : {2, 4, 8, 16}) {
    const mf::Problem pr = mf::make_problem(big.a, r, mf::Kind::symmetric);
    mf::SolverConfig sc2;
    sc2.schedule = mf::Schedule::default_step_decay();
    sc2.max_iters = 600;
    sc2.tol = 1e-9;
    mf::InitSpec s;
    s.seed = Seed(5);
    Matrix last;
    mf::run(pr, mf::initialize(pr, s), sc2, [&](const mf::IterState& st) { last = st.x; });
    const auto d = mf::optimum_distance(pr, last);
    EXPECT_LE(d.procrustes, d.raw + 1e-12);
    raw.push_back(d.raw);
    rot.push_back(d.procrustes);
    scale.push_back(std::pow(static_cast<double>(r), 0.75));
  }
  const double c_rot = mf::fitted_constant(rot, scale);
  EXPECT_TRUE(std::isfinite(c_rot));
  for (std::size_t i = 0; i < rot.size(); ++i) EXPECT_LE(rot[i], c_rot * scale[i] * (1 + 1e-12));
  ::testing::Test::RecordProperty("procrustes_constant", std::to_string(c_rot));
  ::testing::Test::RecordProperty("raw_constant", std::to_string(mf::fitted_constant(raw, scale)));
}

TEST(FittedConstant, Validation) {
  const std::vector<double> v{1.0, 4.0}, s{1.0, 2.0};
  EXPECT_DOUBLE_EQ(mf::fitted_constant(v, s), 2.0);
  const std::vector<double> bad{0.0, 1.0};
  EXPECT_THROW(mf::fitted_constant(v, bad), mf::InvalidArgument);
  EXPECT_THROW(mf::fitted_constant(std::vector<double>{}, std::vector<double>{}), mf::InvalidArgument);
}

TEST(Termination, Strings) {
  for (auto t : {mf::Termination::converged, mf::Termination::budget, mf::Termination::diverged,
                 mf::Termination::singular_gram, mf::Termination::refused_start}) {
    EXPECT_EQ(mf::termination_from_string(mf::to_string(t)), t);
  }
  EXPECT_EQ(mf::to_string(mf::Termination::singular_gram), "singular-gram");
  for (auto v : {mf::RateVerdict::one_step, mf::RateVerdict::quadratic, mf::RateVerdict::linear,
                 mf::RateVerdict::sublinear, mf::RateVerdict::stalled, mf::RateVerdict::indeterminate}) {
    EXPECT_EQ(mf::verdict_from_string(mf::to_string(v)), v);
  }
}
