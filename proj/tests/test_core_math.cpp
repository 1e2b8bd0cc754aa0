#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hdloc/core_math.hpp"

namespace hdloc {
namespace {

Eigen::MatrixXd random_symmetric(Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = normal(rng);
  return (a + a.transpose()) / 2.0;
}

TEST(SpatialSign, Examples) {
  Vector x(2);
  x << 3.0, 4.0;
  const Vector u = spatial_sign(x);
  EXPECT_DOUBLE_EQ(u(0), 0.6);
  EXPECT_DOUBLE_EQ(u(1), 0.8);

  const Vector zero = Vector::Zero(3);
  EXPECT_EQ(spatial_sign(zero), zero);

  Vector unit(3);
  unit << 0.0, 1.0, 0.0;
  EXPECT_EQ(spatial_sign(unit), unit);
}

TEST(SpatialSign, ScaleFree) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 100; ++rep) {
    Vector x(6);
    for (auto& v : x) v = normal(rng);
    const double c = std::exp(4.0 * normal(rng));
    EXPECT_LE((spatial_sign(c * x) - spatial_sign(x)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(SpatialSign, RejectsNonFinite) {
  Vector x(2);
  x << 1.0, std::nan("");
  EXPECT_THROW(spatial_sign(x), Error);
}

TEST(SampleMatrix, NamesNonFiniteEntry) {
  Matrix m = Matrix::Ones(3, 4);
  m(1, 2) = INFINITY;
  try {
    SampleMatrix s(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 3"), std::string::npos) << e.what();
  }
}

TEST(ScatterSqrt, IdentityAndZeroRho) {
  EXPECT_TRUE(scatter_sqrt(ScatterSpec::identity(4)).isIdentity(0.0));
  EXPECT_TRUE(scatter_sqrt(ScatterSpec::toeplitz(0.0, 3)).isIdentity(0.0));
}

TEST(ScatterSqrt, ReproducesToeplitz) {
  const ScatterSpec spec = ScatterSpec::toeplitz(0.5, 3);
  const Eigen::MatrixXd l = scatter_sqrt(spec);
  EXPECT_LE((l * l.transpose() - spec.materialize()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ScatterSqrt, RandomPositiveDefinite) {
  for (Index p : {2, 7, 30}) {
    const Eigen::MatrixXd a = random_symmetric(p, 11 + p);
    const Eigen::MatrixXd sigma = a * a.transpose() + Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd l = scatter_sqrt(ScatterSpec::explicit_matrix(sigma));
    EXPECT_LE((l * l.transpose() - sigma).norm() / sigma.norm(), 1e-10);
  }
}

TEST(ScatterSqrt, NamesFailingPivot) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
  sigma(2, 2) = -1.0;
  try {
    scatter_sqrt(ScatterSpec::explicit_matrix(sigma));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("pivot 3"), std::string::npos) << e.what();
  }
}

TEST(ScatterSpec, Validation) {
  EXPECT_THROW(ScatterSpec::toeplitz(1.0, 3), Error);
  EXPECT_THROW(ScatterSpec::toeplitz(0.5, 0), Error);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.3;
  EXPECT_THROW(ScatterSpec::explicit_matrix(asym), Error);
}

TEST(ScatterSpec, TraceSquaredMatchesMaterialized) {
  for (Index p : {1, 5, 64}) {
    const ScatterSpec spec = ScatterSpec::toeplitz(0.5, p);
    const Eigen::MatrixXd s = spec.materialize();
    EXPECT_NEAR(spec.trace_squared(), (s * s).trace(), 1e-10 * p);
  }
}

TEST(ScatterFactor, RecursionMatchesCholesky) {
  const ScatterSpec spec = ScatterSpec::toeplitz(0.5, 9);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Matrix z(5, 9);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 9; ++j) z(i, j) = normal(rng);
  Matrix via_factor = z;
  ScatterFactor(spec).apply_rows(via_factor);
  const Matrix via_cholesky = z * scatter_sqrt(spec).transpose();
  EXPECT_LE((via_factor - via_cholesky).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SphereMoments, IdentityIsExact) {
  const auto c = sphere_moment_check(Eigen::MatrixXd::Identity(6, 6), 1000, 1);
  EXPECT_DOUBLE_EQ(c.exact2, 1.0);
  EXPECT_NEAR(c.mc2, 1.0, 1e-14);
  EXPECT_NEAR(c.se2, 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(c.exact4, 1.0);
  EXPECT_NEAR(c.mc4, 1.0, 1e-14);
}

TEST(SphereMoments, CoordinateProjection) {
  // u_1^2 ~ Beta(1/2, (p-1)/2): E u_1^4 = 3/(p(p+2)), E u_1^8 = 105/(p(p+2)(p+4)(p+6)).
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(10, 10);
  m(0, 0) = 1.0;
  const auto c = sphere_moment_check(m, 100000, 2);
  EXPECT_NEAR(c.exact2, 3.0 / 120.0, 1e-15);
  EXPECT_NEAR(c.exact4, 105.0 / (10.0 * 12 * 14 * 16), 1e-15);
  EXPECT_LT(std::abs(c.mc2 - c.exact2), 5.0 * c.se2);
  EXPECT_LT(std::abs(c.mc4 - c.exact4), 5.0 * c.se4);
}

TEST(SphereMoments, RandomSymmetric) {
  for (Index p : {5, 20, 100}) {
    const auto c = sphere_moment_check(random_symmetric(p, 100 + p), 20000, 5 + p);
    EXPECT_LT(std::abs(c.mc2 - c.exact2), 5.0 * c.se2) << "p=" << p;
    EXPECT_LT(std::abs(c.mc4 - c.exact4), 5.0 * c.se4) << "p=" << p;
  }
}

TEST(SphereMoments, Preconditions) {
  EXPECT_THROW(sphere_moment_check(Eigen::MatrixXd::Identity(3, 3), 999, 1), Error);
  EXPECT_THROW(sphere_moment_check(Eigen::MatrixXd::Identity(3, 4), 1000, 1), Error);
}

}  // namespace
}  // namespace hdloc
