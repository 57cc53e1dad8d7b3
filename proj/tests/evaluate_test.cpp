#include "risopt/evaluate.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "risopt/bti.hpp"

namespace risopt {
namespace {

using Eigen::VectorXcd;

SystemParams Small() {
  SystemParams p;
  p.num_elements = 8;
  return p;
}

TEST(EstimateOutageTest, DeterministicWithoutUncertainty) {
  SystemParams p = Small();
  p.delta_c = 0.0;
  const ChannelRealization ch = GenerateChannel(p, 1);
  const Design d = AlternatingOptimize(ch, p, 1);
  const OutageEstimate est = EstimateOutage(d, ch, p, 500, 3);
  EXPECT_TRUE(est.p_hat == 0.0 || est.p_hat == 1.0);
  EXPECT_EQ(est.ci_halfwidth, 0.0);
}

TEST(EstimateOutageTest, IgnoringImpairmentsAlwaysFails) {
  SystemParams p = Small();
  const ChannelRealization ch = GenerateChannel(p, 2);
  SystemParams ideal = p;
  ideal.beta_t = ideal.beta_r = 0.0;
  ChannelRealization exact = ch;
  exact.zeta_g = exact.zeta_q = 0.0;
  const Design d = AlternatingOptimize(exact, ideal, 2);
  EXPECT_EQ(EstimateOutage(d, exact, p, 1000, 4).p_hat, 1.0);
}

TEST(EstimateOutageTest, RobustDesignMeetsTarget) {
  SystemParams p = Small();
  p.delta_c = 0.02;
  const ChannelRealization ch = GenerateChannel(p, 3);
  const Design d = AlternatingOptimize(ch, p, 3);
  const int n = 2000;
  const OutageEstimate est = EstimateOutage(d, ch, p, n, 5);
  // One-sided binomial test at tau: reject only if far above tau.
  EXPECT_LE(est.p_hat, p.outage + 2.33 * std::sqrt(p.outage * (1 - p.outage) / n));
  EXPECT_LE(est.p_hat, p.outage + 3.0 * est.ci_halfwidth);
}

TEST(EstimateOutageTest, FieldsConsistentAndSeedReproducible) {
  SystemParams p = Small();
  p.delta_c = 0.03;
  const ChannelRealization ch = GenerateChannel(p, 4);
  const Design d = DesignScheme(Scheme::kNonrobustCsi, ch, p, 4);
  const OutageEstimate a = EstimateOutage(d, ch, p, 3000, 9);
  const OutageEstimate b = EstimateOutage(d, ch, p, 3000, 9, 3);
  EXPECT_EQ(a.n_violations, b.n_violations);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.n_samples, 3000);
  EXPECT_EQ(a.seed, 9u);
  EXPECT_LE(a.n_violations, a.n_samples);
  EXPECT_DOUBLE_EQ(a.p_hat, a.n_violations / 3000.0);
  EXPECT_DOUBLE_EQ(a.ci_halfwidth, 1.96 * std::sqrt(a.p_hat * (1 - a.p_hat) / 3000));
  EXPECT_GT(a.p_hat, 0.0);
  EXPECT_LT(a.p_hat, 1.0);
  EXPECT_THROW(EstimateOutage(d, ch, p, 0, 1), std::invalid_argument);
}

TEST(EstimateOutageTest, MonotoneInTargetRate) {
  SystemParams p = Small();
  p.delta_c = 0.03;
  const ChannelRealization ch = GenerateChannel(p, 5);
  const Design d = DesignScheme(Scheme::kNonrobustCsi, ch, p, 5);
  double prev = 0.0;
  for (double rate : {1.0, 1.3, 1.5, 1.7, 2.0}) {
    SystemParams q = p;
    q.target_rate = rate;
    const double phat = EstimateOutage(d, ch, q, 1000, 6).p_hat;
    EXPECT_GE(phat, prev);
    prev = phat;
  }
}

TEST(SchemeTest, NamesRoundTrip) {
  for (Scheme s : {Scheme::kProposed, Scheme::kNonrobustCsi, Scheme::kNonrobustHwi,
                   Scheme::kNonrobustBoth, Scheme::kPerfectRef}) {
    EXPECT_EQ(ParseScheme(ToString(s)), s);
  }
  EXPECT_FALSE(ParseScheme("robust").has_value());
}

TEST(SchemeTest, DesignAssumptions) {
  SystemParams p = Small();
  const ChannelRealization ch = GenerateChannel(p, 6);
  EXPECT_EQ(DesignChannel(Scheme::kProposed, ch).zeta_q, ch.zeta_q);
  EXPECT_EQ(DesignChannel(Scheme::kNonrobustCsi, ch).zeta_q, 0.0);
  EXPECT_EQ(DesignParams(Scheme::kNonrobustCsi, p).beta_r, p.beta_r);
  EXPECT_EQ(DesignChannel(Scheme::kNonrobustHwi, ch).zeta_g, ch.zeta_g);
  EXPECT_EQ(DesignParams(Scheme::kNonrobustHwi, p).beta_t, 0.0);
  EXPECT_EQ(DesignParams(Scheme::kNonrobustBoth, p).beta_r, 0.0);
  EXPECT_EQ(DesignChannel(Scheme::kNonrobustBoth, ch).zeta_g, 0.0);
  // Only the reference is also evaluated under ideal assumptions.
  EXPECT_EQ(EvaluationParams(Scheme::kNonrobustBoth, p).beta_r, p.beta_r);
  EXPECT_EQ(EvaluationChannel(Scheme::kNonrobustBoth, ch).zeta_q, ch.zeta_q);
  EXPECT_EQ(EvaluationParams(Scheme::kPerfectRef, p).beta_r, 0.0);
  EXPECT_EQ(EvaluationChannel(Scheme::kPerfectRef, ch).zeta_q, 0.0);
}

TEST(SchemeTest, BaselineOrderingOnOneChannel) {
  SystemParams p = Small();
  p.delta_c = 0.02;
  const ChannelRealization ch = GenerateChannel(p, 7);
  const double proposed = DesignScheme(Scheme::kProposed, ch, p, 7).power;
  const double csi = DesignScheme(Scheme::kNonrobustCsi, ch, p, 7).power;
  const double hwi = DesignScheme(Scheme::kNonrobustHwi, ch, p, 7).power;
  const double both = DesignScheme(Scheme::kNonrobustBoth, ch, p, 7).power;
  const double ref = DesignScheme(Scheme::kPerfectRef, ch, p, 7).power;
  EXPECT_EQ(both, ref);
  for (double x : {proposed, csi, hwi, both}) EXPECT_LE(ref, x * (1 + 1e-9));
  EXPECT_GE(proposed, csi);
  EXPECT_GE(proposed, hwi);
}

TEST(SchemeTest, NonrobustBothAlwaysFailsUnderTrueModel) {
  SystemParams p = Small();
  p.delta_c = 0.01;
  const ChannelRealization ch = GenerateChannel(p, 8);
  const Design d = DesignScheme(Scheme::kNonrobustBoth, ch, p, 8);
  EXPECT_GE(EstimateOutage(d, ch, p, 2000, 8).p_hat, 0.95);
}

}  // namespace
}  // namespace risopt
