#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "hdloc/analysis.hpp"
#include "hdloc/statistics.hpp"

namespace hdloc {
namespace {

ScenarioSpec identity_law(Distribution d, Index p) { return {d, ScatterSpec::identity(p), "law"}; }

TEST(Moments, StandardNormal) {
  const MomentEstimates m = estimate_moments(identity_law(law::Normal{}, 2000), 4000, 1);
  EXPECT_NEAR(m.m2 / 2000.0, 1.0, 0.01);
  EXPECT_NEAR(m.minv * std::sqrt(m.m2), 1.0, 0.01);
  EXPECT_DOUBLE_EQ(m.c0, m.mpairinv);
}

TEST(Moments, MultivariateT) {
  const MomentEstimates m = estimate_moments(identity_law(law::MultivariateT{4}, 2000), 10000, 2);
  EXPECT_NEAR(m.m2 / 2000.0, 2.0, 0.06);
}

TEST(Moments, Deterministic) {
  const auto spec = identity_law(law::MixedNormal{0.2, 3.0}, 50);
  const MomentEstimates a = estimate_moments(spec, 2000, 3);
  const MomentEstimates b = estimate_moments(spec, 2000, 3);
  EXPECT_EQ(a.minv, b.minv);
  EXPECT_EQ(a.mpairinv, b.mpairinv);
  EXPECT_EQ(a.m2, b.m2);
}

TEST(Moments, ScatterEntersOnlyThroughC0) {
  const ScenarioSpec spec{law::Normal{}, ScatterSpec::toeplitz(0.5, 400), "I"};
  const MomentEstimates m = estimate_moments(spec, 4000, 4);
  // E||X_1 + X_2||^{-1} ~ (2 tr Sigma)^{-1/2} under concentration.
  EXPECT_NEAR(m.c0 * std::sqrt(2.0 * 400.0), 1.0, 0.02);
  EXPECT_NEAR(m.mpairinv * std::sqrt(2.0 * 400.0), 1.0, 0.01);
}

TEST(AsymptoticPower, NullAndMidpoint) {
  EXPECT_NEAR(asymptotic_power_sr(0.0, 100.0, 0.03, 40, 400, 0.05), 0.05, 1e-12);
  EXPECT_NEAR(asymptotic_power_cq(0.0, 100.0, 400.0, 40, 400, 0.05), 0.05, 1e-12);
  // Drift 2 c0^2 p n theta'theta / sqrt(2 tr) equal to z_alpha gives 1/2.
  const double z = normal_upper_quantile(0.05);
  const double c0 = 0.03, tr = 250.0;
  const Index n = 40, p = 400;
  const double theta2 = z * std::sqrt(2.0 * tr) / (2.0 * c0 * c0 * p * n);
  EXPECT_NEAR(asymptotic_power_sr(theta2, tr, c0, n, p, 0.05), 0.5, 1e-12);
  double previous = 0.0;
  for (double t : {0.0, 0.1, 0.2, 0.4, 0.8}) {
    const double beta = asymptotic_power_sr(t, tr, c0, n, p, 0.05);
    EXPECT_GT(beta, previous);
    previous = beta;
  }
}

TEST(AsymptoticPower, DriftRatioIsAre) {
  // Phi^{-1}(beta) + z_alpha is the drift; the SR/CQ ratio is 2 c0^2 m2.
  const double z = normal_upper_quantile(0.05);
  const double c0 = 0.02, m2 = 800.0, tr = 300.0;
  const double sr = asymptotic_power_sr(0.05, tr, c0, 40, 400, 0.05);
  const double cq = asymptotic_power_cq(0.05, tr, m2, 40, 400, 0.05);
  const auto drift = [&](double beta) { return z - normal_upper_quantile(beta); };
  EXPECT_NEAR(drift(sr) / drift(cq), 2.0 * c0 * c0 * m2, 1e-9);
}

TEST(AsymptoticPower, GaussianDriftsAgree) {
  const ScenarioSpec spec{law::Normal{}, ScatterSpec::identity(2000), "N"};
  const MomentEstimates m = estimate_moments(spec, 4000, 5);
  const double z = normal_upper_quantile(0.05);
  const auto drift = [&](double beta) { return z - normal_upper_quantile(beta); };
  const double sr = asymptotic_power_sr(2.0, 2000.0, m.c0, 40, 2000, 0.05);
  const double cq = asymptotic_power_cq(2.0, 2000.0, m.m2, 40, 2000, 0.05);
  EXPECT_NEAR(drift(sr) / drift(cq), 1.0, 0.02);
}

TEST(Are, TableColumns) {
  const auto laws = are_table_distributions();
  ASSERT_EQ(laws.size(), 8u);
  EXPECT_EQ(laws.front().label, "t3");
  EXPECT_EQ(laws[5].label, "N(0,I)");
  EXPECT_EQ(laws.back().label, "MN(0.05,10)");
}

TEST(Are, NormalIsOne) {
  const auto rows = are_table({{"N", law::Normal{}}}, 2000, 4000, 6);
  EXPECT_NEAR(rows[0].ss_cq, 1.0, 0.02);
  EXPECT_NEAR(rows[0].sr_cq, 1.0, 0.02);
  EXPECT_NEAR(rows[0].sr_ss, 1.0, 0.02);
}

TEST(Are, StudentThreeAndBounds) {
  const auto rows = are_table({{"t3", law::MultivariateT{3}}, {"mn", law::MixedNormal{0.2, 3.0}}}, 2000, 10000, 7);
  EXPECT_NEAR(rows[0].ss_cq / 2.54, 1.0, 0.03);
  for (const AreRow& r : rows) {
    EXPECT_GE(r.ss_cq + 3.0 * r.se_ss_cq, 1.0) << r.label;
    EXPECT_GE(r.sr_cq + 3.0 * r.se_sr_cq, 1.0) << r.label;
    EXPECT_LE(r.sr_ss - 3.0 * r.se_sr_ss, 1.0) << r.label;
    EXPECT_NEAR(r.sr_ss * r.ss_cq, r.sr_cq, 1e-12 * r.sr_cq) << r.label;
  }
}

TEST(TauF, UnivariateIsOneThird) {
  const std::array<Index, 1> dims = {1};
  const auto est = tau_f_check(law::Normal{}, dims, 2000, 200, 8);
  EXPECT_LT(std::abs(est[0].tau - 1.0 / 3.0), 5.0 * est[0].se + 1e-3);
}

TEST(TauF, TrendsToOneHalf) {
  const std::array<Index, 3> dims = {50, 200, 800};
  const auto est = tau_f_check(law::Normal{}, dims, 100, 200, 9);
  for (const auto& e : est) EXPECT_NEAR(e.tau, 0.5, 0.05) << "p=" << e.p;
  EXPECT_LE(std::abs(est[2].tau - 0.5), std::abs(est[0].tau - 0.5) + 3.0 * est[0].se);
}

TEST(TauF, NeedsInnerDraws) {
  const std::array<Index, 1> dims = {10};
  EXPECT_THROW(tau_f_check(law::Normal{}, dims, 10, 99, 1), Error);
}

}  // namespace
}  // namespace hdloc
