#include <gtest/gtest.h>

#include "mf/nora.hpp"
#include "oracle.hpp"

using mf::Matrix;
using mf::Seed;
namespace nora = mf::nora;

namespace {

nora::LinearFinetuneProblem adapter_problem(std::uint64_t seed, Eigen::Index m = 32, Eigen::Index r = 4) {
  mf::TargetSpec t;
  t.m = m;
  t.n = m;
  t.spectrum = {2.0, 1.5, 1.0, 0.5};
  t.symmetric = false;
  t.seed = Seed(seed);
  nora::LinearFinetuneProblem p;
  p.w0 = mf::orthonormalize(mf::gaussian(m, m, 1.0, Seed(seed + 2)));
  p.b = p.w0 + mf::synthesize_target(t);
  p.r = r;
  return p;
}

mf::IterState at(const Matrix& x, const Matrix& y, int t) { return mf::IterState{t, x, y, 0.0}; }

}  // namespace

TEST(NoraInit, PreservesPretrainedMap) {
  const auto p = adapter_problem(1);
  const auto [x0, y0] = nora::nora_init(p, 0.1, Seed(3));
  EXPECT_EQ((x0 * y0.transpose()).norm(), 0.0);
  EXPECT_EQ(y0, Matrix::Zero(32, 4));
}

TEST(NoraInit, IdentityWeightGivesTheSketch) {
  nora::LinearFinetuneProblem p{Matrix::Identity(3, 3), Matrix::Identity(3, 3), 2};
  EXPECT_EQ(nora::nora_init(p, 0.5, Seed(4)).first, mf::gaussian(3, 2, 0.5, Seed(4)));
}

TEST(NoraInit, RankOneWeightKeepsColumnsInItsRange) {
  mf::Vector u = mf::gaussian(5, 1, 1.0, Seed(1)).col(0);
  mf::Vector v = mf::gaussian(4, 1, 1.0, Seed(2)).col(0);
  nora::LinearFinetuneProblem p{u * v.transpose(), Matrix::Zero(5, 4), 2};
  const Matrix x0 = nora::nora_init(p, 1.0, Seed(3)).first;
  const mf::Vector q = u.normalized();
  EXPECT_LE((x0 - q * (q.transpose() * x0)).norm(), 1e-12);
}

TEST(NoraInit, Validation) {
  nora::LinearFinetuneProblem p{Matrix::Identity(3, 3), Matrix::Identity(3, 2), 2};
  EXPECT_THROW(nora::nora_init(p, 0.1, Seed(1)), mf::InvalidArgument);
  p.b = Matrix::Identity(3, 3);
  p.r = 0;
  EXPECT_THROW(nora::nora_init(p, 0.1, Seed(1)), mf::InvalidArgument);
}

TEST(NoraPlusStep, OptimumIsFixed) {
  const auto p = adapter_problem(2);
  const Matrix a = p.a_eff();
  const auto sv = mf::svd(a);
  const Matrix x = sv.u * sv.s.cwiseSqrt().asDiagonal();
  const Matrix y = sv.v * sv.s.cwiseSqrt().asDiagonal();
  const auto next = nora::nora_plus_step(at(x, y, 3), p, nora::NoraConfig{});
  EXPECT_LE((next.x - x).norm(), 1e-12);
  EXPECT_LE((*next.y - y).norm(), 1e-12);
}

TEST(NoraPlusStep, FirstStepLeavesXAlone) {
  const auto p = adapter_problem(3);
  const auto [x0, y0] = nora::nora_init(p, 0.1, Seed(1));
  EXPECT_EQ(nora::nora_plus_step(at(x0, y0, 0), p, nora::NoraConfig{}).x, x0);
}

TEST(NoraPlusStep, MatchesScaledGdWithoutDampingOrNormalization) {
  const auto p = adapter_problem(4);
  nora::NoraConfig c;
  c.lambda = 0.0;
  c.normalize = false;
  c.lr = 0.7;
  const Matrix x = mf::gaussian(32, 4, 1.0, Seed(10));
  const Matrix y = mf::gaussian(32, 4, 1.0, Seed(11));
  // At t = 0 the two only coincide from Y = 0, where X's raw gradient vanishes.
  for (int t : {0, 1, 5}) {
    const Matrix yt = t == 0 ? Matrix::Zero(32, 4) : y;
    const auto got = nora::nora_plus_step(at(x, yt, t), p, c);
    const auto ref = mf::scaledgd_asym_step(at(x, yt, t), p.a_eff(), 0.7, mf::PrecondMode::inverse);
    EXPECT_LE((got.x - ref.x).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((*got.y - *ref.y).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(NoraPlusStep, NormalizedDirectionFollowsTheFormula) {
  const auto p = adapter_problem(5, 8, 2);
  nora::NoraConfig c;
  c.lambda = 0.0;
  c.lr = 1.0;
  const Matrix x = mf::gaussian(8, 2, 1.0, Seed(1));
  const Matrix y = mf::gaussian(8, 2, 1.0, Seed(2));
  for (double scale : {1.0, 0.3, 4.0}) {
    const Matrix ys = scale * y;
    const auto got = nora::nora_plus_step(at(x, ys, 1), p, c);
    // G_X (Y^T Y)^{-1} / ||(Y^T Y)^{-1}||_F via the closed-form 2x2 inverse.
    const oracle::Grid res =
        oracle::axpy(oracle::mul(oracle::from(x), oracle::tr(oracle::from(ys))), -1.0, oracle::from(p.a_eff()));
    const oracle::Grid ginv = oracle::inv2(oracle::mul(oracle::tr(oracle::from(ys)), oracle::from(ys)));
    oracle::Grid dir = oracle::mul(oracle::mul(res, oracle::from(ys)), ginv);
    const double nrm = oracle::fro(ginv);
    for (auto& row : dir)
      for (double& v : row) v /= nrm;
    const oracle::Grid expected = oracle::axpy(oracle::from(x), -1.0, dir);
    EXPECT_LE(oracle::max_abs_diff(oracle::from(got.x), expected), 1e-10) << "scale " << scale;
  }
}

TEST(NoraStep, PlainGradient) {
  const auto p = adapter_problem(6, 6, 2);
  nora::NoraConfig c;
  c.lr = 0.2;
  const Matrix x = mf::gaussian(6, 2, 1.0, Seed(1));
  const Matrix y = mf::gaussian(6, 2, 1.0, Seed(2));
  const auto got = nora::nora_step(at(x, y, 0), p, c);
  const auto ref = mf::gd_step(at(x, y, 0), p.a_eff(), 0.2);
  EXPECT_LE((got.x - ref.x).norm(), 1e-13);
  EXPECT_LE((*got.y - *ref.y).norm(), 1e-13);
}

TEST(RunNora, DefaultsConvergeOnAdapterProblem) {
  const auto p = adapter_problem(1);
  nora::NoraConfig c;
  c.seed = Seed(7);
  const auto trace = nora::run_nora(p, c, nora::Variant::nora_plus);
  EXPECT_LE(trace.records.back().error, 1e-6 * p.a_eff().norm());
  EXPECT_LE(trace.records.back().t, 500);
  EXPECT_DOUBLE_EQ(trace.records.front().error, p.a_eff().norm());
}

TEST(RunNora, ZeroLearningRateFreezes) {
  const auto p = adapter_problem(2);
  nora::NoraConfig c;
  c.lr = 0.0;
  c.max_iters = 10;
  const auto trace = nora::run_nora(p, c, nora::Variant::nora);
  for (const auto& r : trace.records) EXPECT_EQ(r.error, trace.records.front().error);
}

TEST(RunNora, Deterministic) {
  const auto p = adapter_problem(3);
  nora::NoraConfig c;
  c.max_iters = 40;
  const auto a = nora::run_nora(p, c, nora::Variant::nora_plus);
  const auto b = nora::run_nora(p, c, nora::Variant::nora_plus);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].error, b.records[i].error);
}

TEST(RunNora, SingularGramWithoutDamping) {
  const auto p = adapter_problem(4);
  nora::NoraConfig c;
  c.lambda = 0.0;
  c.normalize = false;
  c.max_iters = 5;
  nora::LinearFinetuneProblem zero = p;
  zero.w0 = Matrix::Zero(32, 32);
  zero.b = p.a_eff();
  // X0 = 0 * Omega is rank deficient, so the first undamped solve fails.
  const auto trace = nora::run_nora(zero, c, nora::Variant::nora_plus);
  EXPECT_EQ(trace.termination, mf::Termination::singular_gram);
}

TEST(RunNora, Validation) {
  const auto p = adapter_problem(1);
  nora::NoraConfig c;
  c.lr = -1.0;
  EXPECT_THROW(nora::run_nora(p, c, nora::Variant::nora), mf::InvalidArgument);
  c.lr = 0.5;
  c.lambda = -1.0;
  EXPECT_THROW(nora::run_nora(p, c, nora::Variant::nora), mf::InvalidArgument);
}
