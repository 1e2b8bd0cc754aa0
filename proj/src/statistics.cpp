#include "hdloc/statistics.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>

namespace hdloc {
namespace {

void require_rows(const SampleMatrix& x, Index minimum, const char* what) {
  if (x.n() < minimum) {
    std::ostringstream msg;
    msg << what << " (need n >= " << minimum << ", got n = " << x.n() << ")";
    throw Error(msg.str());
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
}

double falling(Index n, int m) {
  double out = 1.0;
  for (int k = 0; k < m; ++k) out *= static_cast<double>(n - k);
  return out;
}

/// Rows a*n + b hold U(X_a - X_b); the diagonal rows are zero.
Matrix difference_signs(const SampleMatrix& x) {
  const Index n = x.n();
  Matrix signs = Matrix::Zero(n * n, x.p());
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      auto row = signs.row(a * n + b);
      row = x.row(a) - x.row(b);
      detail::normalize_in_place(row);
      signs.row(b * n + a) = -row;
    }
  }
  return signs;
}

/// sum over ordered distinct (j, k, l), none equal to i0, of
/// U(X_i0 - X_j)^T U(X_k - X_l) * U(X_k - X_j)^T U(X_i0 - X_l).
double frozen_index_sum(const Matrix& signs, Index n, Index i0) {
  // gram(a, b*n + c) = U(X_i0 - X_a)^T U(X_b - X_c)
  const Eigen::MatrixXd gram = signs.middleRows(i0 * n, n) * signs.transpose();
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j == i0) continue;
    for (Index k = 0; k < n; ++k) {
      if (k == i0 || k == j) continue;
      const Index kj = k * n + j;
      double partial = 0.0;
      for (Index l = 0; l < n; ++l) {
        if (l == i0 || l == j || l == k) continue;
        partial += gram(j, k * n + l) * gram(l, kj);
      }
      total += partial;
    }
  }
  return total;
}

TestResult standardize(double raw, double trace_hat, double sigma_hat, double alpha) {
  if (!(sigma_hat > 0.0) || !std::isfinite(sigma_hat)) throw Error("degenerate variance estimate");
  TestResult r;
  r.raw = raw;
  r.trace_hat = trace_hat;
  r.sigma_hat = sigma_hat;
  r.z = raw / sigma_hat;
  r.p_value = normal_upper_tail(r.z);
  r.reject = r.z > normal_upper_quantile(alpha);
  return r;
}

}  // namespace

std::string to_string(TraceMode mode) { return mode == TraceMode::Full ? "full" : "reduced"; }

TraceMode parse_trace_mode(const std::string& text) {
  if (text == "full") return TraceMode::Full;
  if (text == "reduced") return TraceMode::Reduced;
  throw Error("unknown trace mode '" + text + "' (expected full or reduced)");
}

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::SR:
      return "SR";
    case TestKind::SS:
      return "SS";
    case TestKind::CQ:
      return "CQ";
    case TestKind::TSR:
      return "TSR";
  }
  return "?";
}

TestKind parse_test_kind(const std::string& text) {
  std::string upper;
  for (char c : text) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (upper == "SR") return TestKind::SR;
  if (upper == "SS") return TestKind::SS;
  if (upper == "CQ") return TestKind::CQ;
  if (upper == "TSR") return TestKind::TSR;
  throw Error("unknown test '" + text + "' (expected sr, ss, cq or tsr)");
}

double normal_upper_quantile(double alpha) {
  check_alpha(alpha);
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), alpha));
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double sr_statistic_naive(const SampleMatrix& x) {
  require_rows(x, 4, "distinct quadruples unavailable");
  const Index n = x.n();
  Matrix walsh(n * n, x.p());
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      auto row = walsh.row(a * n + b);
      row = x.row(a) + x.row(b);
      detail::normalize_in_place(row);
    }
  }
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      for (Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        for (Index l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          total += walsh.row(i * n + j).dot(walsh.row(k * n + l));
        }
      }
    }
  }
  return total / falling(n, 4);
}

double sr_statistic_fast(const SampleMatrix& x) {
  require_rows(x, 4, "distinct quadruples unavailable");
  const Index n = x.n();
  const Index p = x.p();
  Matrix v = Matrix::Zero(n, p);
  Eigen::RowVectorXd sum(p);
  double z_half = 0.0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      sum = x.row(a) + x.row(b);
      if (detail::normalize_in_place(sum)) z_half += 1.0;
      v.row(a) += sum;
      v.row(b) += sum;
    }
  }
  const double z = 2.0 * z_half;
  const double w1 = v.colwise().sum().squaredNorm();
  const double s = v.rowwise().squaredNorm().sum() - z;
  return (w1 - 4.0 * s - 2.0 * z) / falling(n, 4);
}

Index reduced_trace_index(Index n) { return n / 2 - 1; }

double trace_sigma2_reduced(const SampleMatrix& x, Index i0) {
  require_rows(x, 4, "distinct quadruples unavailable");
  const Index n = x.n();
  if (i0 < 0 || i0 >= n) {
    std::ostringstream msg;
    msg << "frozen index " << i0 << " out of range [0, " << n << ")";
    throw Error(msg.str());
  }
  const double p = static_cast<double>(x.p());
  const Matrix signs = difference_signs(x);
  return 2.0 * p * p * frozen_index_sum(signs, n, i0) / falling(n - 1, 3);
}

double trace_sigma2_full(const SampleMatrix& x) {
  require_rows(x, 4, "distinct quadruples unavailable");
  const Index n = x.n();
  const double p = static_cast<double>(x.p());
  const Matrix signs = difference_signs(x);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) total += frozen_index_sum(signs, n, i);
  return 2.0 * p * p * total / falling(n, 4);
}

TestResult sr_test(const SampleMatrix& x, double alpha, TraceMode mode) {
  check_alpha(alpha);
  require_rows(x, 4, "distinct quadruples unavailable");
  const double raw = sr_statistic_fast(x);
  const double trace = mode == TraceMode::Full ? trace_sigma2_full(x)
                                               : trace_sigma2_reduced(x, reduced_trace_index(x.n()));
  if (!(trace > 0.0)) throw Error("degenerate trace estimate");
  const double n = static_cast<double>(x.n());
  const double p = static_cast<double>(x.p());
  return standardize(raw, trace, std::sqrt(8.0 * trace / (n * n * p * p)), alpha);
}

double ss_statistic(const SampleMatrix& x) {
  require_rows(x, 2, "spatial-sign statistic needs two observations");
  Matrix signs = x.data();
  for (Index i = 0; i < signs.rows(); ++i) {
    auto row = signs.row(i);
    detail::normalize_in_place(row);
  }
  const Eigen::RowVectorXd total = signs.colwise().sum();
  const double n = static_cast<double>(x.n());
  return (total.squaredNorm() - signs.rowwise().squaredNorm().sum()) / (n * (n - 1.0));
}

TestResult ss_test(const SampleMatrix& x, double alpha) {
  check_alpha(alpha);
  require_rows(x, 2, "spatial-sign statistic needs two observations");
  const Index rows = x.n();
  Matrix signs = x.data();
  std::size_t zeros = 0;
  for (Index i = 0; i < rows; ++i) {
    auto row = signs.row(i);
    if (!detail::normalize_in_place(row)) ++zeros;
  }
  const Eigen::MatrixXd gram = signs * signs.transpose();
  double off = 0.0;
  double off_sq = 0.0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < rows; ++j) {
      if (i == j) continue;
      off += gram(i, j);
      off_sq += gram(i, j) * gram(i, j);
    }
  }
  const double n = static_cast<double>(rows);
  const double pairs = n * (n - 1.0);
  const double trace_b2 = off_sq / pairs;
  if (!(trace_b2 > 0.0)) throw Error("degenerate variance estimate");
  TestResult r = standardize(off / pairs, trace_b2, std::sqrt(2.0 * trace_b2 / pairs), alpha);
  r.zero_signs = zeros;
  return r;
}

double cq_statistic(const SampleMatrix& x) {
  require_rows(x, 2, "mean statistic needs two observations");
  const Eigen::MatrixXd gram = x.data() * x.data().transpose();
  const double n = static_cast<double>(x.n());
  return (gram.sum() - gram.trace()) / (n * (n - 1.0));
}

double cq_trace_lambda2(const SampleMatrix& x, TraceMode mode) {
  require_rows(x, 4, "distinct quadruples unavailable");
  const Index n = x.n();
  // Differences are location-free; centering first keeps the Gram entries small.
  const Matrix centered = x.data().rowwise() - x.data().colwise().mean();
  const Eigen::MatrixXd k = centered * centered.transpose();
  // (X_a - X_b)^T (X_c - X_d)
  auto inner = [&k](Index a, Index b, Index c, Index d) { return k(a, c) - k(a, d) - k(b, c) + k(b, d); };

  auto frozen = [&](Index i) {
    double total = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      for (Index kk = 0; kk < n; ++kk) {
        if (kk == i || kk == j) continue;
        for (Index l = 0; l < n; ++l) {
          if (l == i || l == j || l == kk) continue;
          total += inner(i, j, kk, l) * inner(kk, j, i, l);
        }
      }
    }
    return total;
  };

  // Each summand has expectation 2 tr(Lambda^2).
  if (mode == TraceMode::Reduced) return frozen(reduced_trace_index(n)) / (2.0 * falling(n - 1, 3));
  double total = 0.0;
  for (Index i = 0; i < n; ++i) total += frozen(i);
  return total / (2.0 * falling(n, 4));
}

TestResult cq_test(const SampleMatrix& x, double alpha, TraceMode mode) {
  check_alpha(alpha);
  require_rows(x, 4, "distinct quadruples unavailable");
  const double raw = cq_statistic(x);
  const double trace = cq_trace_lambda2(x, mode);
  if (!(trace > 0.0)) throw Error("degenerate variance estimate");
  const double n = static_cast<double>(x.n());
  return standardize(raw, trace, std::sqrt(2.0 * trace / (n * (n - 1.0))), alpha);
}

double tsr_statistic(const SampleMatrix& x) {
  const Index n = x.n();
  const Index p = x.p();
  if (n <= p) {
    std::ostringstream msg;
    msg << "sample covariance is singular: need n > p (got n = " << n << ", p = " << p << ")";
    throw Error(msg.str());
  }
  const Matrix centered = x.data().rowwise() - x.data().colwise().mean();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("sample covariance is singular");
  // rows y_i = L^{-1} x_i, so that Y = X L^{-T}
  const Matrix y = llt.matrixL().solve(x.data().transpose()).transpose();

  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(p);
  Eigen::RowVectorXd sum(p);
  for (Index i = 0; i < n; ++i) {
    sum = y.row(i);
    detail::normalize_in_place(sum);
    total += sum;
    for (Index j = i + 1; j < n; ++j) {
      sum = y.row(i) + y.row(j);
      detail::normalize_in_place(sum);
      total += 2.0 * sum;
    }
  }
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  return (scale * total).squaredNorm();
}

double raw_statistic(TestKind kind, const SampleMatrix& x) {
  switch (kind) {
    case TestKind::SR:
      return sr_statistic_fast(x);
    case TestKind::SS:
      return ss_statistic(x);
    case TestKind::CQ:
      return cq_statistic(x);
    case TestKind::TSR:
      return tsr_statistic(x);
  }
  throw Error("unknown test kind");
}

TestResult run_test(TestKind kind, const SampleMatrix& x, double alpha, TraceMode mode) {
  switch (kind) {
    case TestKind::SR:
      return sr_test(x, alpha, mode);
    case TestKind::SS:
      return ss_test(x, alpha);
    case TestKind::CQ:
      return cq_test(x, alpha, TraceMode::Full);
    case TestKind::TSR:
      throw Error("TSR has no asymptotic reference; use the size-corrected protocol");
  }
  throw Error("unknown test kind");
}

}  // namespace hdloc
