#include "risopt/beamform.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "risopt/bti.hpp"
#include "risopt/embed.hpp"
#include "risopt/evaluate.hpp"
#include "test_util.hpp"

namespace risopt {
namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

SystemParams Ideal(int l) {
  SystemParams p;
  p.num_elements = l;
  p.beta_t = p.beta_r = 0.0;
  p.delta_c = 0.0;
  return p;
}

double MrtPower(const ChannelRealization& ch, const SystemParams& p, const VectorXcd& e) {
  const VectorXcd h = EffectiveChannel(ch.g_hat, ch.Q_hat, e);
  return (std::exp2(p.target_rate) - 1.0) * p.noise_power / h.squaredNorm();
}

// Value of the left-hand side of constraint `con` at the given blocks,
// excluding the contribution of scalar-block entry `skip`.
double ConstraintValue(const conic::ConicProblem& prob, int con,
                       const std::vector<MatrixXd>& x, int scalar_block, int skip) {
  double acc = 0.0;
  for (int k = 0; k < prob.num_blocks(); ++k) {
    MatrixXd a = prob.ConstraintMatrix(con, k);
    if (k == scalar_block) a(skip, skip) = 0.0;
    acc += a.cwiseProduct(x[k]).sum();
  }
  return acc;
}

void ExpectEmbeddedHermitian(const MatrixXd& t) {
  const Eigen::Index n = t.rows() / 2;
  const MatrixXd re = t.topLeftCorner(n, n);
  const MatrixXd im = t.bottomLeftCorner(n, n);
  EXPECT_LE((t.bottomRightCorner(n, n) - re).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((t.topRightCorner(n, n) + im).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((re - re.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((im + im.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TransmitProgramTest, CompiledDataIsHermitian) {
  SystemParams p;
  p.num_elements = 4;
  const ChannelRealization ch = GenerateChannel(p, 1);
  Rng rng(1);
  const TransmitProgram prog = BuildTransmitProgram(testing::RandomPhases(4, rng), ch, p);
  EXPECT_GT(prog.kappa, 0.0);
  ASSERT_EQ(prog.problem.num_blocks(), 4);
  for (int i = 0; i < prog.problem.num_constraints(); ++i) {
    ExpectEmbeddedHermitian(prog.problem.ConstraintMatrix(i, prog.v_block));
  }
  ExpectEmbeddedHermitian(prog.problem.ObjectiveMatrix(prog.v_block));
}

TEST(TransmitProgramTest, NonRobustProgramHasNoConicSlacks) {
  const SystemParams p = Ideal(3);
  const ChannelRealization ch = GenerateChannel(p, 2);
  const TransmitProgram prog = BuildTransmitProgram(VectorXcd::Ones(3), ch, p);
  EXPECT_EQ(prog.problem.num_blocks(), 2);
  EXPECT_EQ(prog.problem.num_constraints(), 1);
  EXPECT_EQ(prog.arrow_block, -1);
}

TEST(TransmitProgramTest, RateConstraintSlackEqualsBtiMargin) {
  SystemParams p;
  p.num_elements = 4;
  const ChannelRealization ch = GenerateChannel(p, 3);
  Rng rng(3);
  const VectorXcd e = testing::RandomPhases(4, rng);
  const VectorXcd v = *ScaleToFeasible(testing::RandomVector(2, rng), e, ch, p);
  const TransmitProgram prog = BuildTransmitProgram(e, ch, p);
  const BtiCheck chk = CheckDesign(v, e, ch, p);
  const double to_norm = 1.0 / prog.norm.PowerToTrue(1.0);
  std::vector<MatrixXd> x(prog.problem.num_blocks());
  x[prog.v_block] = conic::EmbedHermitian(v * v.adjoint() * to_norm);
  x[prog.scalar_block] = MatrixXd::Zero(3, 3);
  x[prog.scalar_block](0, 0) = chk.a_min / p.noise_power;
  x[prog.scalar_block](1, 1) = chk.b_min / p.noise_power;
  for (int k : {prog.arrow_block, prog.lmi_block}) {
    x[k] = MatrixXd::Zero(prog.problem.blocks()[k].dim, prog.problem.blocks()[k].dim);
  }
  const double lhs = ConstraintValue(prog.problem, 0, x, prog.scalar_block, 2);
  const double slack = lhs - prog.problem.Rhs()(0);
  EXPECT_NEAR(slack, chk.margin / p.noise_power, 1e-7);
  EXPECT_GE(slack, -1e-9);
}

TEST(SolveTransmitTest, MatchesMatchedFilterWithoutImpairments) {
  const SystemParams p = Ideal(8);
  for (int seed = 1; seed <= 5; ++seed) {
    const ChannelRealization ch = GenerateChannel(p, seed);
    Rng rng(seed);
    const VectorXcd e = testing::RandomPhases(8, rng);
    const TransmitResult r = SolveTransmit(e, ch, p, rng);
    const double want = MrtPower(ch, p, e);
    EXPECT_LE(testing::RelErr(r.v.squaredNorm(), want), 5e-3) << seed;
    EXPECT_LE(testing::RelErr(r.info.objective, want), 1e-6) << seed;
    const VectorXcd h = EffectiveChannel(ch.g_hat, ch.Q_hat, e);
    EXPECT_NEAR(std::abs(h.dot(r.v)) / (h.norm() * r.v.norm()), 1.0, 1e-6);
  }
}

TEST(SolveTransmitTest, UnreachableRateIsInfeasible) {
  SystemParams p;
  p.num_elements = 4;
  p.beta_t = 0.0;
  p.beta_r = 0.6;
  const ChannelRealization ch = GenerateChannel(p, 4);
  Rng rng(4);
  EXPECT_THROW(SolveTransmit(VectorXcd::Ones(4), ch, p, rng), InfeasibleError);
}

TEST(SolveTransmitTest, ExtractedBeamformerIsFeasibleAndAboveRelaxation) {
  SystemParams p;
  p.num_elements = 8;
  for (int seed = 1; seed <= 3; ++seed) {
    const ChannelRealization ch = GenerateChannel(p, seed);
    Rng rng(seed);
    const VectorXcd e = testing::RandomPhases(8, rng);
    const TransmitResult r = SolveTransmit(e, ch, p, rng);
    const BtiCheck chk = CheckDesign(r.v, e, ch, p);
    EXPECT_TRUE(chk.feasible);
    EXPECT_LE(std::abs(chk.margin), 1e-6 * p.noise_power);
    EXPECT_GE(r.v.squaredNorm(), r.info.objective * (1.0 - 1e-8));
    EXPECT_GE(r.info.rank1_ratio, 0.0);
    EXPECT_LE(r.info.rank1_ratio, 1.0 + 1e-12);
  }
}

TEST(ScaleToFeasibleTest, LandsOnTheBoundary) {
  SystemParams p;
  p.num_elements = 6;
  const ChannelRealization ch = GenerateChannel(p, 5);
  Rng rng(5);
  const VectorXcd e = testing::RandomPhases(6, rng);
  const VectorXcd v = testing::RandomVector(2, rng);
  const auto s = ScaleToFeasible(v, e, ch, p);
  ASSERT_TRUE(s.has_value());
  const BtiCheck chk = CheckDesign(*s, e, ch, p);
  EXPECT_TRUE(chk.feasible);
  EXPECT_LE(chk.margin, 1e-7 * p.noise_power);
  EXPECT_FALSE(ScaleToFeasible(VectorXcd::Zero(2), e, ch, p).has_value());
  // Smaller scales are infeasible.
  EXPECT_FALSE(CheckDesign(0.999 * *s, e, ch, p).feasible);
}

TEST(GaussianRandomizeVTest, RankOneShortcut) {
  SystemParams p = Ideal(4);
  const ChannelRealization ch = GenerateChannel(p, 6);
  Rng rng(6);
  const VectorXcd u = testing::RandomVector(2, rng);
  const MatrixXcd V = u * u.adjoint();
  const VectorXcd v = GaussianRandomizeV(V, VectorXcd::Ones(4), ch, p, 200, rng);
  EXPECT_NEAR(v.squaredNorm(), V.trace().real(), 1e-8 * V.trace().real());
}

TEST(GaussianRandomizeVTest, IsotropicCovarianceNearRelaxationOptimum) {
  const SystemParams p = Ideal(4);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelRealization ch = GenerateChannel(p, 100 + trial);
    Rng rng(trial);
    const VectorXcd e = testing::RandomPhases(4, rng);
    const VectorXcd v =
        GaussianRandomizeV(MatrixXcd::Identity(2, 2), e, ch, p, 200, rng);
    const double snr = Snr(v, e, ch.g_hat, ch.Q_hat, 0.0, 0.0, p.noise_power);
    EXPECT_GE(AchievableRate(snr), p.target_rate - 1e-9);
    EXPECT_LE(v.squaredNorm(), 1.05 * MrtPower(ch, p, e)) << trial;
  }
}

TEST(GaussianRandomizeVTest, NoCandidatesForHigherRank) {
  const SystemParams p = Ideal(4);
  const ChannelRealization ch = GenerateChannel(p, 7);
  Rng rng(7);
  EXPECT_THROW(GaussianRandomizeV(MatrixXcd::Identity(2, 2), VectorXcd::Ones(4), ch, p,
                                  0, rng),
               RandomizationFailed);
}

TEST(GaussianRandomizeETest, RankOneRecoversPhases) {
  SystemParams p;
  p.num_elements = 5;
  const ChannelRealization ch = GenerateChannel(p, 8);
  Rng rng(8);
  const VectorXcd e_true = testing::RandomPhases(5, rng);
  VectorXcd x(6);
  x << e_true, 1.0;
  x *= std::polar(1.0, 0.4);
  const VectorXcd v = 1e-2 * testing::RandomVector(2, rng);
  const VectorXcd e = GaussianRandomizeE(x * x.adjoint(), v, ch, p, 50, rng);
  EXPECT_NEAR(std::abs(e.dot(e_true)), 5.0, 1e-9);
  for (int l = 0; l < 5; ++l) EXPECT_NEAR(std::abs(e(l)), 1.0, 1e-15);
}

TEST(GaussianRandomizeETest, BeatsRandomPhases) {
  SystemParams p;
  p.num_elements = 4;
  int wins = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ChannelRealization ch = GenerateChannel(p, 200 + trial);
    Rng rng(trial);
    const MatrixXcd g = testing::RandomMatrix(5, 5, rng);
    MatrixXcd E = g * g.adjoint();
    const Eigen::VectorXd d = E.diagonal().real().cwiseSqrt().cwiseInverse();
    E = d.asDiagonal() * E * d.asDiagonal();
    const VectorXcd v = 3e-3 * testing::RandomVector(2, rng);
    const VectorXcd e = GaussianRandomizeE(E, v, ch, p, 200, rng);
    const VectorXcd e_rand = testing::RandomPhases(4, rng);
    wins += CheckDesign(v, e, ch, p).margin > CheckDesign(v, e_rand, ch, p).margin;
  }
  EXPECT_GE(wins, 90);
}

TEST(GaussianRandomizeETest, SingleElementIsDeterministic) {
  SystemParams p;
  p.num_elements = 1;
  const ChannelRealization ch = GenerateChannel(p, 9);
  MatrixXcd E(2, 2);
  E << 1.0, std::polar(1.0, 0.3), std::polar(1.0, -0.3), 1.0;
  const VectorXcd v = VectorXcd::Constant(2, 1e-3);
  Rng r1(1), r2(2);
  const VectorXcd a = GaussianRandomizeE(E, v, ch, p, 100, r1);
  const VectorXcd b = GaussianRandomizeE(E, v, ch, p, 100, r2);
  EXPECT_LE((a - b).norm(), 1e-12);
  EXPECT_NEAR(std::arg(a(0)), 0.3, 1e-9);
}

TEST(SolvePhaseTest, IncumbentIsFeasibleForCompiledProgram) {
  SystemParams p;
  p.num_elements = 6;
  const ChannelRealization ch = GenerateChannel(p, 10);
  Rng rng(10);
  const VectorXcd e = testing::RandomPhases(6, rng);
  const VectorXcd v = SolveTransmit(e, ch, p, rng).v;
  const BtiCheck chk = CheckDesign(v, e, ch, p);
  const PhaseProgram prog = BuildPhaseProgram(v, chk.a_min, ch, p);
  VectorXcd x(7);
  x << e, 1.0;
  std::vector<MatrixXd> blocks(prog.problem.num_blocks());
  blocks[prog.e_block] = conic::EmbedHermitian(x * x.adjoint());
  blocks[prog.scalar_block] = MatrixXd::Zero(5, 5);
  blocks[prog.scalar_block](1, 1) = chk.a_min / p.noise_power;
  blocks[prog.scalar_block](2, 2) = chk.b_min / p.noise_power;
  blocks[prog.lmi_block] = MatrixXd::Zero(4, 4);
  const Eigen::VectorXd rhs = prog.problem.Rhs();
  // Rate constraint with mu = 0: slack s1 equals the BTI margin.
  const double s1 = ConstraintValue(prog.problem, 0, blocks, prog.scalar_block, 3) - rhs(0);
  EXPECT_NEAR(s1, chk.margin / p.noise_power, 1e-6);
  EXPECT_GE(s1, -1e-6);
  // Linearized norm constraint at a = a_prev is tight.
  const int lin = 1 + 7;
  const double s2 = ConstraintValue(prog.problem, lin, blocks, prog.scalar_block, 4) - rhs(lin);
  EXPECT_NEAR(s2, 0.0, 1e-6 * (1.0 + std::abs(rhs(lin))));
  // Unit diagonal.
  for (int i = 1; i <= 7; ++i) {
    EXPECT_NEAR(ConstraintValue(prog.problem, i, blocks, prog.scalar_block, 0), 1.0, 1e-12);
  }
}

TEST(SolvePhaseTest, SingleElementMatchesGridSearch) {
  const SystemParams p = Ideal(1);
  for (int seed = 1; seed <= 5; ++seed) {
    const ChannelRealization ch = GenerateChannel(p, seed);
    Rng rng(seed);
    const VectorXcd e0 = testing::RandomPhases(1, rng);
    const VectorXcd v = 3.0 * *ScaleToFeasible(testing::RandomVector(2, rng), e0, ch, p);
    const PhaseResult r = SolvePhase(v, 1.0, ch, p, rng);
    double best = -1e300;
    for (int k = 0; k < 360; ++k) {
      const VectorXcd e = VectorXcd::Constant(1, std::polar(1.0, k * std::numbers::pi / 180));
      best = std::max(best, CheckDesign(v, e, ch, p).margin);
    }
    const double got = CheckDesign(v, r.e, ch, p).margin;
    EXPECT_GE(got, best - 1e-6 * std::abs(best)) << seed;
    EXPECT_GE(r.info.rank1_ratio, 1.0 - 1e-6);
  }
}

TEST(SolvePhaseTest, KeepsBetterIncumbent) {
  SystemParams p;
  p.num_elements = 4;
  const ChannelRealization ch = GenerateChannel(p, 11);
  Rng rng(11);
  const VectorXcd e0 = testing::RandomPhases(4, rng);
  const VectorXcd v = SolveTransmit(e0, ch, p, rng).v;
  const double a_prev = CheckDesign(v, e0, ch, p).a_min;
  const PhaseResult r = SolvePhase(v, a_prev, ch, p, rng, &e0);
  EXPECT_GE(CheckDesign(v, r.e, ch, p).margin, CheckDesign(v, e0, ch, p).margin);
  EXPECT_GE(r.mu, -1e-9 * p.noise_power);
  // The linearization under-estimates a^2, so the accepted slack also meets
  // the original norm constraint.
  EXPECT_LE(2.0 * a_prev * r.info.a - a_prev * a_prev, r.info.a * r.info.a);
}

TEST(AlternatingOptimizeTest, RobustDesignEndToEnd) {
  SystemParams p;
  p.num_elements = 8;
  p.delta_c = 0.01;
  const ChannelRealization ch = GenerateChannel(p, 1);
  const Design d = AlternatingOptimize(ch, p, 1);
  EXPECT_NO_THROW(d.CheckInvariants());
  EXPECT_TRUE(CheckDesign(d.v, d.e, ch, p).feasible);
  const OutageEstimate est = EstimateOutage(d, ch, p, 2000, 77);
  EXPECT_LE(est.p_hat, p.outage);
  for (size_t i = 1; i < d.trace.size(); ++i) {
    EXPECT_LE(d.trace[i], d.trace[i - 1] * (1.0 + 1e-7));
  }
  EXPECT_GE(d.power, d.relaxation_bound * (1.0 - 1e-8));
}

TEST(AlternatingOptimizeTest, Deterministic) {
  SystemParams p;
  p.num_elements = 6;
  const ChannelRealization ch = GenerateChannel(p, 2);
  const Design a = AlternatingOptimize(ch, p, 5);
  const Design b = AlternatingOptimize(ch, p, 5);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.e, b.e);
}

TEST(AlternatingOptimizeTest, SingleElementMatchesBruteForce) {
  const SystemParams p = Ideal(1);
  for (int seed = 1; seed <= 5; ++seed) {
    const ChannelRealization ch = GenerateChannel(p, seed);
    double best = 1e300;
    for (int k = 0; k < 360; ++k) {
      const VectorXcd e = VectorXcd::Constant(1, std::polar(1.0, k * std::numbers::pi / 180));
      best = std::min(best, MrtPower(ch, p, e));
    }
    const Design d = AlternatingOptimize(ch, p, seed);
    EXPECT_LE(testing::RelErr(d.power, best), 0.01) << seed;
  }
}

TEST(AlternatingOptimizeTest, TraceCsv) {
  SystemParams p;
  p.num_elements = 4;
  const Design d = AlternatingOptimize(GenerateChannel(p, 3), p, 3);
  std::ostringstream out;
  WriteTraceCsv(d, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iteration,power_watts,mu,a,b,sdp_status");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(d.iterations.size()));
}

}  // namespace
}  // namespace risopt
