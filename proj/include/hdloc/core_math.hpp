#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <variant>

namespace hdloc {

/// Row-major so that one observation is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An n x p block of observations (rows) over p variables (columns).
/// All entries are finite; n >= 1 and p >= 1. Operations that need more
/// rows check their own minimum.
class SampleMatrix {
 public:
  explicit SampleMatrix(Matrix data);

  Index n() const { return data_.rows(); }
  Index p() const { return data_.cols(); }
  const Matrix& data() const { return data_; }
  auto row(Index i) const { return data_.row(i); }

 private:
  Matrix data_;
};

/// Scatter (shape) matrix of an elliptical law, either the Toeplitz family
/// rho^|i-j| or an explicit symmetric matrix.
class ScatterSpec {
 public:
  static ScatterSpec toeplitz(double rho, Index p);
  static ScatterSpec identity(Index p) { return toeplitz(0.0, p); }
  /// Symmetry is checked here; positive definiteness is checked when the
  /// matrix is factorized.
  static ScatterSpec explicit_matrix(Eigen::MatrixXd sigma);

  Index p() const { return p_; }
  bool is_toeplitz() const { return std::holds_alternative<Toeplitz>(kind_); }
  bool is_identity() const { return is_toeplitz() && rho() == 0.0; }
  double rho() const;

  Eigen::MatrixXd materialize() const;
  /// tr(Sigma^2), closed form for the Toeplitz family.
  double trace_squared() const;

 private:
  struct Toeplitz {
    double rho;
  };
  struct Explicit {
    Eigen::MatrixXd sigma;
  };

  ScatterSpec(std::variant<Toeplitz, Explicit> kind, Index p) : kind_(std::move(kind)), p_(p) {}

  std::variant<Toeplitz, Explicit> kind_;
  Index p_;
};

/// U(x) = x / ||x||, and U(0) = 0. Throws on non-finite input.
Vector spatial_sign(const Vector& x);

/// Lower-triangular Cholesky factor L with L L^T = Sigma. Throws, naming the
/// failing pivot, when Sigma is not positive definite.
Eigen::MatrixXd scatter_sqrt(const ScatterSpec& spec);

/// Applies the Cholesky factor of a scatter matrix to row vectors. The
/// Toeplitz family uses the AR(1) recursion, which is the same triangular
/// factor applied in O(p) per row.
class ScatterFactor {
 public:
  explicit ScatterFactor(const ScatterSpec& spec);

  Index p() const { return p_; }
  /// Replaces every row z of `rows` by L z.
  void apply_rows(Matrix& rows) const;

 private:
  Index p_;
  bool recursive_;
  double rho_ = 0.0;
  Eigen::MatrixXd lower_;
};

struct SphereMomentCheck {
  double mc2;
  double se2;
  double exact2;
  double mc4;
  double se4;
  double exact4;
};

/// Monte Carlo estimates of E(u^T M u)^2 and E(u^T M u)^4 for u uniform on
/// the unit sphere, next to their closed forms.
SphereMomentCheck sphere_moment_check(const Eigen::MatrixXd& m, int reps, std::uint64_t seed);

namespace detail {

/// Normalizes in place; returns false (and leaves zeros) for a zero vector.
template <typename Derived>
bool normalize_in_place(Eigen::MatrixBase<Derived>& x) {
  const double norm = x.norm();
  if (norm > 0.0) {
    x /= norm;
    return true;
  }
  x.setZero();
  return false;
}

}  // namespace detail

}  // namespace hdloc
