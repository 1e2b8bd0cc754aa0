#include "hdloc/core_math.hpp"

#include <cmath>
#include <sstream>

#include "hdloc/rng.hpp"

namespace hdloc {

SampleMatrix::SampleMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error("sample matrix must have at least one row and one column");
  }
  if (!data_.allFinite()) {
    for (Index i = 0; i < data_.rows(); ++i) {
      for (Index j = 0; j < data_.cols(); ++j) {
        if (!std::isfinite(data_(i, j))) {
          std::ostringstream msg;
          msg << "non-finite entry at row " << i + 1 << ", column " << j + 1;
          throw Error(msg.str());
        }
      }
    }
  }
}

ScatterSpec ScatterSpec::toeplitz(double rho, Index p) {
  if (p < 1) throw Error("scatter dimension must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw Error("toeplitz rho must lie in (-1, 1)");
  return ScatterSpec(Toeplitz{rho}, p);
}

ScatterSpec ScatterSpec::explicit_matrix(Eigen::MatrixXd sigma) {
  const Index p = sigma.rows();
  if (p < 1 || sigma.cols() != p) throw Error("scatter matrix must be square and non-empty");
  if (!sigma.allFinite()) throw Error("scatter matrix has non-finite entries");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error("scatter matrix is not symmetric");
  }
  return ScatterSpec(Explicit{std::move(sigma)}, p);
}

double ScatterSpec::rho() const {
  if (const auto* t = std::get_if<Toeplitz>(&kind_)) return t->rho;
  throw Error("rho requested from an explicit scatter matrix");
}

Eigen::MatrixXd ScatterSpec::materialize() const {
  if (const auto* e = std::get_if<Explicit>(&kind_)) return e->sigma;
  const double r = rho();
  Eigen::MatrixXd sigma(p_, p_);
  for (Index i = 0; i < p_; ++i) {
    for (Index j = 0; j < p_; ++j) {
      sigma(i, j) = std::pow(r, static_cast<double>(std::abs(i - j)));
    }
  }
  return sigma;
}

double ScatterSpec::trace_squared() const {
  if (const auto* e = std::get_if<Explicit>(&kind_)) return e->sigma.squaredNorm();
  // sum_{i,j} rho^{2|i-j|} = p + 2 sum_d (p - d) rho^{2d}
  const double r2 = rho() * rho();
  double total = static_cast<double>(p_);
  double power = 1.0;
  for (Index d = 1; d < p_; ++d) {
    power *= r2;
    if (power == 0.0) break;
    total += 2.0 * static_cast<double>(p_ - d) * power;
  }
  return total;
}

Vector spatial_sign(const Vector& x) {
  if (!x.allFinite()) throw Error("spatial_sign: non-finite input");
  Vector u = x;
  detail::normalize_in_place(u);
  return u;
}

Eigen::MatrixXd scatter_sqrt(const ScatterSpec& spec) {
  const Eigen::MatrixXd sigma = spec.materialize();
  const Index p = sigma.rows();
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    double pivot = sigma(j, j) - lower.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0)) {
      std::ostringstream msg;
      msg << "scatter matrix is not positive definite: pivot " << j + 1 << " = " << pivot;
      throw Error(msg.str());
    }
    const double d = std::sqrt(pivot);
    lower(j, j) = d;
    for (Index i = j + 1; i < p; ++i) {
      lower(i, j) = (sigma(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / d;
    }
  }
  return lower;
}

ScatterFactor::ScatterFactor(const ScatterSpec& spec)
    : p_(spec.p()), recursive_(spec.is_toeplitz()) {
  if (recursive_) {
    rho_ = spec.rho();
  } else {
    lower_ = scatter_sqrt(spec);
  }
}

void ScatterFactor::apply_rows(Matrix& rows) const {
  if (rows.cols() != p_) throw Error("scatter factor dimension mismatch");
  if (!recursive_) {
    rows = rows * lower_.transpose();
    return;
  }
  if (rho_ == 0.0) return;
  // x_0 = z_0, x_k = rho x_{k-1} + sqrt(1 - rho^2) z_k
  const double innovation = std::sqrt(1.0 - rho_ * rho_);
  for (Index i = 0; i < rows.rows(); ++i) {
    double* x = rows.row(i).data();
    for (Index k = 1; k < p_; ++k) x[k] = rho_ * x[k - 1] + innovation * x[k];
  }
}

SphereMomentCheck sphere_moment_check(const Eigen::MatrixXd& m, int reps, std::uint64_t seed) {
  const Index p = m.rows();
  if (m.cols() != p) throw Error("sphere_moment_check: matrix must be square");
  if (p < 2) throw Error("sphere_moment_check: dimension must be at least 2");
  if (reps < 1000) throw Error("sphere_moment_check: at least 1000 replications required");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    throw Error("sphere_moment_check: matrix must be symmetric");
  }

  Rng rng(seed);
  std::normal_distribution<double> normal;
  Vector u(p);
  double s2 = 0, ss2 = 0, s4 = 0, ss4 = 0;
  for (int r = 0; r < reps; ++r) {
    do {
      for (Index k = 0; k < p; ++k) u(k) = normal(rng);
    } while (!detail::normalize_in_place(u));
    const double q = u.dot(m * u);
    const double q2 = q * q;
    const double q4 = q2 * q2;
    s2 += q2;
    ss2 += q2 * q2;
    s4 += q4;
    ss4 += q4 * q4;
  }
  const double count = reps;
  auto standard_error = [count](double sum, double sum_sq) {
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
    return std::sqrt(var / count);
  };

  const Eigen::MatrixXd m2 = m * m;
  const double tr = m.trace();
  const double tr2 = m2.trace();
  const double tr3 = (m2 * m).trace();
  const double tr4 = (m2 * m2).trace();
  const double pd = static_cast<double>(p);
  // E(g^T M g)^4 for Gaussian g, from the cumulants 2^{r-1}(r-1)! tr(M^r);
  // dividing by E||g||^8 = p(p+2)(p+4)(p+6) gives the sphere moment.
  const double gauss4 = tr * tr * tr * tr + 12.0 * tr * tr * tr2 + 12.0 * tr2 * tr2 +
                        32.0 * tr * tr3 + 48.0 * tr4;

  SphereMomentCheck out;
  out.mc2 = s2 / count;
  out.se2 = standard_error(s2, ss2);
  out.exact2 = (tr * tr + 2.0 * tr2) / (pd * pd + 2.0 * pd);
  out.mc4 = s4 / count;
  out.se4 = standard_error(s4, ss4);
  out.exact4 = gauss4 / (pd * (pd + 2.0) * (pd + 4.0) * (pd + 6.0));
  return out;
}

}  // namespace hdloc
