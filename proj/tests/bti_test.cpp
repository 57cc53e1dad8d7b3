#include "risopt/bti.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "risopt/model.hpp"
#include "test_util.hpp"

namespace risopt {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct Instance {
  MatrixXcd A;
  VectorXcd e, g;
  MatrixXcd Q;
  double zg, zq;
};

Instance RandomInstance(Rng& rng, int n, int l) {
  Instance in;
  in.A = testing::RandomHermitian(n, rng);
  in.e = testing::RandomPhases(l, rng);
  in.g = testing::RandomVector(n, rng);
  in.Q = testing::RandomMatrix(l, n, rng);
  in.zg = 0.05 + rng.Uniform();
  in.zq = 0.05 + rng.Uniform();
  return in;
}

TEST(BtiDataTest, IdentitiesAgainstExplicitConstruction) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 3;
    const int l = 1 + (trial / 3) % 6;
    const Instance in = RandomInstance(rng, n, l);
    const BtiData d = ComputeBtiData(in.A, in.e, in.g, in.Q, in.zg, in.zq, 0.05, 1.0);
    const MatrixXcd M = BuildMExplicit(in.A, in.e, in.zg, in.zq);
    const VectorXcd m = BuildMvecExplicit(in.A, in.e, in.g, in.Q, in.zg, in.zq);
    EXPECT_LE(testing::RelErr(d.trace_term, M.trace().real()), 1e-10);
    EXPECT_LE(testing::RelErr(d.frob_term, M.norm()), 1e-10);
    EXPECT_LE(testing::RelErr(d.mvec_norm, m.norm()), 1e-10);
    EXPECT_LE(M.trace().imag(), 1e-12 * M.norm());
  }
}

TEST(BtiDataTest, NoUncertainty) {
  Rng rng(2);
  const Instance in = RandomInstance(rng, 2, 3);
  const BtiData d = ComputeBtiData(in.A, in.e, in.g, in.Q, 0.0, 0.0, 0.05, 1.0);
  EXPECT_EQ(d.trace_term, 0.0);
  EXPECT_EQ(d.frob_term, 0.0);
  EXPECT_EQ(d.mvec_norm, 0.0);
  const VectorXcd h = EffectiveChannel(in.g, in.Q, in.e);
  EXPECT_NEAR(d.m_scalar, RealQuadraticForm(h, in.A) - 1.05, 1e-12);
  EXPECT_EQ(BuildMvecExplicit(in.A, in.e, in.g, in.Q, 0.0, 0.0).norm(), 0.0);
}

TEST(BtiDataTest, IdentityATrace) {
  Rng rng(3);
  const int n = 3;
  const Instance in = RandomInstance(rng, n, 4);
  const MatrixXcd I = MatrixXcd::Identity(n, n);
  const BtiData d = ComputeBtiData(I, in.e, in.g, in.Q, 1.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(d.trace_term, 5.0 * n, 1e-12);
  EXPECT_NEAR(BuildMExplicit(I, in.e, 1.0, 1.0).trace().real(), 5.0 * n, 1e-12);
}

TEST(BtiDataTest, SingleBlockWithoutCascadeError) {
  Rng rng(4);
  const Instance in = RandomInstance(rng, 2, 3);
  const MatrixXcd M = BuildMExplicit(in.A, in.e, in.zg, 0.0);
  EXPECT_LE((M.topLeftCorner(2, 2) - in.zg * in.zg * in.A).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(M.bottomRows(6).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(M.rightCols(6).cwiseAbs().maxCoeff(), 0.0);
  const VectorXcd m = BuildMvecExplicit(in.A, in.e, in.g, in.Q, in.zg, 0.0);
  const VectorXcd h = EffectiveChannel(in.g, in.Q, in.e);
  EXPECT_LE(testing::RelErr(m.norm(), in.zg * (in.A * h).norm()), 1e-12);
}

TEST(BtiDataTest, MinEigenvalueScale) {
  Rng rng(5);
  const Instance in = RandomInstance(rng, 3, 2);
  const BtiData d = ComputeBtiData(in.A, in.e, in.g, in.Q, in.zg, in.zq, 0.0, 1.0);
  const double kappa = in.zg * in.zg + 2 * in.zq * in.zq;
  EXPECT_NEAR(d.min_eig_scale,
              kappa * Eigen::SelfAdjointEigenSolver<MatrixXcd>(in.A).eigenvalues()(0), 1e-12);
}

TEST(BtiDataTest, RejectsNegativeMu) {
  Rng rng(6);
  const Instance in = RandomInstance(rng, 2, 2);
  EXPECT_THROW(ComputeBtiData(in.A, in.e, in.g, in.Q, 0.1, 0.1, 0.0, 1.0, -1.0),
               std::invalid_argument);
}

// The explicit quadratic form in i = [i_g; conj(vec(I_Q))] reproduces the
// Hermitian form of the perturbed effective channel.
TEST(BtiDataTest, QuadraticEventMatchesPerturbedChannel) {
  Rng rng(7);
  const int n = 2, l = 3;
  const Instance in = RandomInstance(rng, n, l);
  const MatrixXcd M = BuildMExplicit(in.A, in.e, in.zg, in.zq);
  const VectorXcd m = BuildMvecExplicit(in.A, in.e, in.g, in.Q, in.zg, in.zq);
  const VectorXcd h = EffectiveChannel(in.g, in.Q, in.e);
  const double scalar = RealQuadraticForm(h, in.A);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXcd ig = testing::RandomVector(n, rng);
    const MatrixXcd iq = testing::RandomMatrix(l, n, rng);
    VectorXcd i(n + n * l);
    i.head(n) = ig;
    i.tail(n * l) = iq.reshaped().conjugate();
    const double explicit_form =
        RealQuadraticForm(i, M) + 2.0 * m.dot(i).real() + scalar;
    const VectorXcd h_true =
        EffectiveChannel(in.g + in.zg * ig, in.Q + in.zq * iq, in.e);
    EXPECT_LE(testing::RelErr(explicit_form, RealQuadraticForm(h_true, in.A)), 1e-10);
  }
}

TEST(CheckBtiTest, DeterministicCases) {
  BtiData d;
  d.m_scalar = 5.0;
  BtiCheck c = CheckBti(d, 0.01);
  EXPECT_TRUE(c.feasible);
  EXPECT_EQ(c.a_min, 0.0);
  EXPECT_EQ(c.b_min, 0.0);
  d.m_scalar = -1.0;
  EXPECT_FALSE(CheckBti(d, 0.01).feasible);
}

TEST(CheckBtiTest, MinimalSlacksAndMargin) {
  BtiData d;
  d.trace_term = 2.0;
  d.frob_term = 3.0;
  d.mvec_norm = 2.0;
  d.min_eig_scale = -0.5;
  d.m_scalar = 40.0;
  const double tau = 0.05;
  const BtiCheck c = CheckBti(d, tau);
  EXPECT_NEAR(c.a_min, std::sqrt(9.0 + 8.0), 1e-15);
  EXPECT_EQ(c.b_min, 0.5);
  const double li = std::log(1.0 / tau);
  EXPECT_NEAR(c.margin, 2.0 - std::sqrt(2 * li) * std::sqrt(17.0) - li * 0.5 + 40.0, 1e-12);
}

TEST(CheckBtiTest, Monotonicity) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    BtiData d;
    d.trace_term = rng.Normal();
    d.frob_term = std::abs(rng.Normal());
    d.mvec_norm = std::abs(rng.Normal());
    d.min_eig_scale = rng.Normal();
    d.m_scalar = 3.0 * rng.Normal();
    const double tau = 0.001 + 0.5 * rng.Uniform();
    if (!CheckBti(d, tau).feasible) continue;
    BtiData up = d;
    up.m_scalar += std::abs(rng.Normal());
    EXPECT_TRUE(CheckBti(up, tau).feasible);
    EXPECT_TRUE(CheckBti(d, std::min(1.0, tau * (1.0 + rng.Uniform()))).feasible);
  }
  EXPECT_THROW(CheckBti(BtiData{}, 0.0), std::invalid_argument);
  EXPECT_THROW(CheckBti(BtiData{}, 1.5), std::invalid_argument);
}

TEST(CheckBtiTest, ConservativeOnBoundaryInstances) {
  Rng rng(9);
  const double tau = 0.05;
  const int draws = 10000;
  const int limit = testing::BinomialQuantile(draws, tau, 0.99);
  int tested = 0;
  while (tested < 20) {
    const int n = 1 + tested % 3, l = 1 + tested % 4;
    Instance in = RandomInstance(rng, n, l);
    in.zg *= 0.3;
    in.zq *= 0.3;
    const VectorXcd v = testing::RandomVector(n, rng);
    in.A = BuildA(v * v.adjoint(), 1.0, 0.05, 0.05);
    BtiData d = ComputeBtiData(in.A, in.e, in.g, in.Q, in.zg, in.zq, 0.05, 0.0);
    const double margin = CheckBti(d, tau).margin;
    if (!(margin > 0.0)) continue;
    // Put the instance exactly on the boundary of the restriction.
    d.m_scalar -= margin;
    const MatrixXcd M = BuildMExplicit(in.A, in.e, in.zg, in.zq);
    const VectorXcd m = BuildMvecExplicit(in.A, in.e, in.g, in.Q, in.zg, in.zq);
    int violations = 0;
    for (int k = 0; k < draws; ++k) {
      const VectorXcd i = testing::RandomVector(static_cast<int>(M.rows()), rng);
      violations += RealQuadraticForm(i, M) + 2.0 * m.dot(i).real() + d.m_scalar < 0.0;
    }
    EXPECT_LE(violations, limit) << "instance " << tested;
    ++tested;
  }
}

TEST(CheckDesignTest, AgreesWithManualAssembly) {
  SystemParams p;
  p.num_elements = 4;
  const ChannelRealization ch = GenerateChannel(p, 3);
  Rng rng(10);
  const VectorXcd v = 1e-2 * testing::RandomVector(2, rng);
  const VectorXcd e = testing::RandomPhases(4, rng);
  const BtiData d = BtiDataFor(v, e, ch, p);
  const MatrixXcd A = BuildA(v * v.adjoint(), p.target_rate, p.beta_t, p.beta_r);
  const BtiData ref = ComputeBtiData(A, e, ch.g_hat, ch.Q_hat, ch.zeta_g, ch.zeta_q,
                                     p.beta_r, p.noise_power);
  EXPECT_EQ(d.trace_term, ref.trace_term);
  EXPECT_EQ(d.m_scalar, ref.m_scalar);
  EXPECT_EQ(CheckDesign(v, e, ch, p).margin, CheckBti(ref, p.outage).margin);
}

}  // namespace
}  // namespace risopt
