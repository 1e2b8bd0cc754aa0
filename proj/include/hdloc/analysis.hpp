#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdloc/samplers.hpp"

namespace hdloc {

/// Monte Carlo moments of the standardized variate eps (identity scatter) and
/// c0 = E||X_1 + X_2||^{-1} under the scenario's own scatter.
struct MomentEstimates {
  double c0 = 0.0;
  double m2 = 0.0;        // E||eps||^2
  double minv = 0.0;      // E||eps||^{-1}
  double mpairinv = 0.0;  // E||eps_1 + eps_2||^{-1}
  double se_c0 = 0.0;
  double se_m2 = 0.0;
  double se_minv = 0.0;
  double se_mpairinv = 0.0;
};

/// Elliptical laws draw their radial variate by stratified sampling (one
/// stratum per replication). For t laws the E||eps||^2 term additionally
/// importance-samples the radial quantile. Standard errors come from 20
/// batch means.
MomentEstimates estimate_moments(const ScenarioSpec& spec, int reps, std::uint64_t seed);

/// Phi(-z_alpha + 2 c0^2 p n theta^T theta / sqrt(2 tr(Sigma^2))).
double asymptotic_power_sr(double theta_norm2, double trace_sigma2, double c0, Index n, Index p, double alpha);

/// Phi(-z_alpha + n p theta^T theta / (E||eps||^2 sqrt(2 tr(Sigma^2)))).
double asymptotic_power_cq(double theta_norm2, double trace_sigma2, double m2, Index n, Index p, double alpha);

struct AreRow {
  std::string label;
  double ss_cq = 0.0;
  double sr_cq = 0.0;
  double sr_ss = 0.0;
  double se_ss_cq = 0.0;
  double se_sr_cq = 0.0;
  double se_sr_ss = 0.0;
  MomentEstimates moments;
};

struct LabeledDistribution {
  std::string label;
  Distribution distribution;
};

/// Columns of the ARE table: t_3, t_4, t_5, t_6, t_10, N(0, I), MN(0.2, 3), MN(0.05, 10).
std::vector<LabeledDistribution> are_table_distributions();

/// ARE(SS,CQ) = minv^2 m2, ARE(SR,CQ) = 2 mpairinv^2 m2, ARE(SR,SS) = 2 mpairinv^2 / minv^2.
std::vector<AreRow> are_table(const std::vector<LabeledDistribution>& laws, Index p, int reps, std::uint64_t seed);

struct TauEstimate {
  Index p = 0;
  double tau = 0.0;
  double se = 0.0;
};

/// tau_F = E||u||^2 with u = E(U(eps_i - eps_j) | eps_i). The inner
/// expectation is an average over `inner` draws, debiased by subtracting the
/// inner-sample trace variance divided by `inner`.
std::vector<TauEstimate> tau_f_check(const Distribution& dist, std::span<const Index> dims, int outer, int inner,
                                     std::uint64_t seed);

}  // namespace hdloc
