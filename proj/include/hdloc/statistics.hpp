#pragma once

#include <cstddef>
#include <string>

#include "hdloc/core_math.hpp"

namespace hdloc {

enum class TraceMode { Full, Reduced };
enum class TestKind { SR, SS, CQ, TSR };

std::string to_string(TraceMode mode);
TraceMode parse_trace_mode(const std::string& text);
std::string to_string(TestKind kind);
TestKind parse_test_kind(const std::string& text);

/// Outcome of a one-sided asymptotic test. z == raw / sigma_hat,
/// p_value == 1 - Phi(z), reject == (z > z_alpha).
struct TestResult {
  double raw = 0.0;
  double trace_hat = 0.0;
  double sigma_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
  /// Observations whose spatial sign is zero (SS only).
  std::size_t zero_signs = 0;
};

/// Upper-alpha standard normal quantile z_alpha.
double normal_upper_quantile(double alpha);
/// 1 - Phi(z).
double normal_upper_tail(double z);

/// Signed-rank statistic by direct enumeration of ordered distinct
/// quadruples. O(n^4 p); the reference for sr_statistic_fast.
double sr_statistic_naive(const SampleMatrix& x);

/// Same statistic in O(n^2 p). With v_a = sum_{b != a} U(X_a + X_b):
///   P_n^4 T_n = ||sum_a v_a||^2 - 4 S - 2 Z,
///   S = sum_a ||v_a||^2 - Z,  Z = sum_{a != b} ||U(X_a + X_b)||^2.
double sr_statistic_fast(const SampleMatrix& x);

/// Sign-based ratio-consistent estimator of tr(Sigma^2) over all ordered
/// distinct quadruples. Equals the average of trace_sigma2_reduced over i0.
double trace_sigma2_full(const SampleMatrix& x);

/// Same summand with the first index frozen at i0, normalized by the number
/// of surviving ordered triples (n-1)(n-2)(n-3).
double trace_sigma2_reduced(const SampleMatrix& x, Index i0);

/// Frozen index used by the reduced estimators: observation n/2 (1-based).
Index reduced_trace_index(Index n);

TestResult sr_test(const SampleMatrix& x, double alpha, TraceMode mode = TraceMode::Reduced);

double ss_statistic(const SampleMatrix& x);
TestResult ss_test(const SampleMatrix& x, double alpha);

double cq_statistic(const SampleMatrix& x);
/// Moment-based U-statistic estimate of tr(Lambda^2) from pairwise differences.
double cq_trace_lambda2(const SampleMatrix& x, TraceMode mode = TraceMode::Full);
TestResult cq_test(const SampleMatrix& x, double alpha, TraceMode mode = TraceMode::Full);

/// ||n^-2 sum_{i,j} U(S^{-1/2}(X_i + X_j))||^2 with S the sample covariance,
/// without the standardizing constant. Requires n > p.
double tsr_statistic(const SampleMatrix& x);

/// Raw statistic of any test, as used by the size-corrected protocol.
double raw_statistic(TestKind kind, const SampleMatrix& x);

/// Asymptotic test by kind. `mode` selects the SR trace estimator; CQ always
/// uses the full form. TSR has no asymptotic reference and throws.
TestResult run_test(TestKind kind, const SampleMatrix& x, double alpha, TraceMode mode = TraceMode::Reduced);

}  // namespace hdloc
