#include "hdloc/analysis.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "hdloc/statistics.hpp"

namespace hdloc {
namespace {

constexpr int kBatches = 20;

struct MomentSamples {
  std::vector<double> c0;
  std::vector<double> m2;
  std::vector<double> minv;
  std::vector<double> pairinv;
};

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  double total = 0.0;
  for (std::size_t i = begin; i < end; ++i) total += v[i];
  return total / static_cast<double>(end - begin);
}

/// Batch means of a per-replication series over kBatches contiguous batches.
std::vector<double> batch_means(const std::vector<double>& v) {
  std::vector<double> out(kBatches);
  const std::size_t size = v.size();
  for (int b = 0; b < kBatches; ++b) {
    out[b] = mean_of(v, size * b / kBatches, size * (b + 1) / kBatches);
  }
  return out;
}

double standard_error(const std::vector<double>& batches) {
  const double m = std::accumulate(batches.begin(), batches.end(), 0.0) / batches.size();
  double ss = 0.0;
  for (double b : batches) ss += (b - m) * (b - m);
  return std::sqrt(ss / (batches.size() - 1.0) / batches.size());
}

std::vector<std::size_t> shuffled_strata(int reps, Rng& rng) {
  std::vector<std::size_t> perm(reps);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

MomentSamples moment_samples(const ScenarioSpec& spec, int reps, std::uint64_t seed) {
  if (reps < 1000) throw Error("moment estimation needs at least 1000 replications");
  validate(spec.distribution);
  const Index p = spec.scatter.p();
  const bool identity = spec.scatter.is_identity();
  const ScatterFactor factor(spec.scatter);

  Rng strata_rng(substream_seed(seed, ~std::uint64_t{0}));
  const auto strata1 = shuffled_strata(reps, strata_rng);
  const auto strata2 = shuffled_strata(reps, strata_rng);

  const auto* mvt = std::get_if<law::MultivariateT>(&spec.distribution);
  const auto* mixed = std::get_if<law::MixedNormal>(&spec.distribution);
  const bool stratified = mvt != nullptr || mixed != nullptr;
  boost::math::chi_squared_distribution<double> chi2(mvt ? mvt->df : 1);

  MomentSamples out;
  out.c0.resize(reps);
  out.m2.resize(reps);
  out.minv.resize(reps);
  out.pairinv.resize(reps);

  Matrix eps(2, p);
  Matrix pair(1, p);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  for (int r = 0; r < reps; ++r) {
    DrawStreams streams(substream_seed(seed, static_cast<std::uint64_t>(r)));
    std::array<double, 2> m2_rows{};
    if (stratified) {
      for (Index k = 0; k < eps.size(); ++k) eps.data()[k] = normal(streams.core);
      for (int k = 0; k < 2; ++k) {
        const std::size_t stratum = (k == 0 ? strata1 : strata2)[r];
        const double u = std::max((stratum + uniform(streams.mixing)) / reps, 1e-300);
        const double kernel2 = eps.row(k).squaredNorm();
        if (mvt) {
          eps.row(k) *= std::sqrt(mvt->df / boost::math::quantile(chi2, u));
          // df / chi2 has a heavy left-quantile tail; the substitution
          // u -> u^power with weight power * u^(power - 1) makes it bounded.
          const double power = std::max(1.0, mvt->df / (mvt->df - 2.0));
          const double shifted = std::max(std::pow(u, power), 1e-300);
          m2_rows[k] = power * std::pow(u, power - 1.0) * mvt->df / boost::math::quantile(chi2, shifted) * kernel2;
        } else {
          const double scale = u < mixed->gamma ? mixed->tau : 1.0;
          eps.row(k) *= scale;
          m2_rows[k] = scale * scale * kernel2;
        }
      }
    } else {
      draw_standardized(spec.distribution, eps, streams);
      m2_rows = {eps.row(0).squaredNorm(), eps.row(1).squaredNorm()};
    }
    const double n1 = eps.row(0).norm();
    const double n2 = eps.row(1).norm();
    pair.row(0) = eps.row(0) + eps.row(1);
    const double pair_norm = pair.row(0).norm();
    out.m2[r] = 0.5 * (m2_rows[0] + m2_rows[1]);
    out.minv[r] = 0.5 * (1.0 / n1 + 1.0 / n2);
    out.pairinv[r] = 1.0 / pair_norm;
    if (identity) {
      out.c0[r] = out.pairinv[r];
    } else {
      factor.apply_rows(pair);
      out.c0[r] = 1.0 / pair.row(0).norm();
    }
  }
  return out;
}

MomentEstimates summarize(const MomentSamples& s) {
  const std::size_t size = s.m2.size();
  MomentEstimates e;
  e.c0 = mean_of(s.c0, 0, size);
  e.m2 = mean_of(s.m2, 0, size);
  e.minv = mean_of(s.minv, 0, size);
  e.mpairinv = mean_of(s.pairinv, 0, size);
  e.se_c0 = standard_error(batch_means(s.c0));
  e.se_m2 = standard_error(batch_means(s.m2));
  e.se_minv = standard_error(batch_means(s.minv));
  e.se_mpairinv = standard_error(batch_means(s.pairinv));
  return e;
}

struct AreValues {
  double ss_cq, sr_cq, sr_ss;
};

AreValues are_from(double m2, double minv, double mpairinv) {
  return {minv * minv * m2, 2.0 * mpairinv * mpairinv * m2, 2.0 * mpairinv * mpairinv / (minv * minv)};
}

void check_power_inputs(double theta_norm2, double trace_sigma2, Index n, Index p, double alpha) {
  if (!(theta_norm2 >= 0.0) || !(trace_sigma2 > 0.0) || n < 1 || p < 1) {
    throw Error("asymptotic power: inputs must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
}

}  // namespace

MomentEstimates estimate_moments(const ScenarioSpec& spec, int reps, std::uint64_t seed) {
  return summarize(moment_samples(spec, reps, seed));
}

double asymptotic_power_sr(double theta_norm2, double trace_sigma2, double c0, Index n, Index p, double alpha) {
  check_power_inputs(theta_norm2, trace_sigma2, n, p, alpha);
  if (!(c0 > 0.0)) throw Error("asymptotic power: c0 must be positive");
  const double drift = 2.0 * c0 * c0 * static_cast<double>(p) * static_cast<double>(n) * theta_norm2 /
                       std::sqrt(2.0 * trace_sigma2);
  return normal_upper_tail(normal_upper_quantile(alpha) - drift);
}

double asymptotic_power_cq(double theta_norm2, double trace_sigma2, double m2, Index n, Index p, double alpha) {
  check_power_inputs(theta_norm2, trace_sigma2, n, p, alpha);
  if (!(m2 > 0.0)) throw Error("asymptotic power: m2 must be positive");
  const double drift = static_cast<double>(n) * static_cast<double>(p) * theta_norm2 /
                       (m2 * std::sqrt(2.0 * trace_sigma2));
  return normal_upper_tail(normal_upper_quantile(alpha) - drift);
}

std::vector<LabeledDistribution> are_table_distributions() {
  return {
      {"t3", law::MultivariateT{3}},          {"t4", law::MultivariateT{4}},
      {"t5", law::MultivariateT{5}},          {"t6", law::MultivariateT{6}},
      {"t10", law::MultivariateT{10}},        {"N(0,I)", law::Normal{}},
      {"MN(0.2,3)", law::MixedNormal{0.2, 3.0}}, {"MN(0.05,10)", law::MixedNormal{0.05, 10.0}},
  };
}

std::vector<AreRow> are_table(const std::vector<LabeledDistribution>& laws, Index p, int reps, std::uint64_t seed) {
  std::vector<AreRow> rows;
  rows.reserve(laws.size());
  for (const auto& law : laws) {
    const ScenarioSpec spec{law.distribution, ScatterSpec::identity(p), law.label};
    const MomentSamples samples = moment_samples(spec, reps, seed);

    AreRow row;
    row.label = law.label;
    row.moments = summarize(samples);
    const AreValues v = are_from(row.moments.m2, row.moments.minv, row.moments.mpairinv);
    row.ss_cq = v.ss_cq;
    row.sr_cq = v.sr_cq;
    row.sr_ss = v.sr_ss;

    const auto m2 = batch_means(samples.m2);
    const auto minv = batch_means(samples.minv);
    const auto pairinv = batch_means(samples.pairinv);
    std::vector<double> ss_cq(kBatches), sr_cq(kBatches), sr_ss(kBatches);
    for (int b = 0; b < kBatches; ++b) {
      const AreValues bv = are_from(m2[b], minv[b], pairinv[b]);
      ss_cq[b] = bv.ss_cq;
      sr_cq[b] = bv.sr_cq;
      sr_ss[b] = bv.sr_ss;
    }
    row.se_ss_cq = standard_error(ss_cq);
    row.se_sr_cq = standard_error(sr_cq);
    row.se_sr_ss = standard_error(sr_ss);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TauEstimate> tau_f_check(const Distribution& dist, std::span<const Index> dims, int outer, int inner,
                                     std::uint64_t seed) {
  if (inner < 100) throw Error("tau_f_check: inner loop needs at least 100 draws");
  if (outer < 2) throw Error("tau_f_check: outer loop needs at least 2 draws");
  validate(dist);
  std::vector<TauEstimate> out;
  for (const Index p : dims) {
    if (p < 1) throw Error("tau_f_check: dimension must be positive");
    const std::uint64_t dim_seed = substream_seed(seed, static_cast<std::uint64_t>(p));
    Matrix center(1, p);
    Matrix others(inner, p);
    Eigen::RowVectorXd mean_sign(p);
    Eigen::RowVectorXd sign(p);
    std::vector<double> corrected(outer);
    for (int i = 0; i < outer; ++i) {
      DrawStreams streams(substream_seed(dim_seed, static_cast<std::uint64_t>(i)));
      draw_standardized(dist, center, streams);
      draw_standardized(dist, others, streams);
      mean_sign.setZero();
      double sum_norm2 = 0.0;
      for (Index j = 0; j < inner; ++j) {
        sign = center.row(0) - others.row(j);
        if (detail::normalize_in_place(sign)) sum_norm2 += 1.0;
        mean_sign += sign;
      }
      const double m = inner;
      mean_sign /= m;
      const double mean_norm2 = mean_sign.squaredNorm();
      const double trace_var = (sum_norm2 - m * mean_norm2) / (m - 1.0);
      corrected[i] = mean_norm2 - trace_var / m;
    }
    const double tau = std::accumulate(corrected.begin(), corrected.end(), 0.0) / outer;
    double ss = 0.0;
    for (double c : corrected) ss += (c - tau) * (c - tau);
    out.push_back({p, tau, std::sqrt(ss / (outer - 1.0) / outer)});
  }
  return out;
}

}  // namespace hdloc
