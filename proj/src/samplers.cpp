#include "hdloc/samplers.hpp"

#include <cmath>
#include <sstream>

namespace hdloc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_df(int df) {
  if (df <= 2) throw Error("degrees of freedom must exceed 2 (finite variance required)");
}

void check_mixture(double gamma, double tau) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("mixture weight gamma must lie in [0, 1)");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("mixture scale tau must be positive");
}

}  // namespace

void validate(const Distribution& dist) {
  std::visit(overloaded{
                 [](const law::Normal&) {},
                 [](const law::MultivariateT& d) { check_df(d.df); },
                 [](const law::MixedNormal& d) { check_mixture(d.gamma, d.tau); },
                 [](const law::FactorT& d) { check_df(d.df); },
                 [](const law::FactorMixed& d) { check_mixture(d.gamma, d.tau); },
             },
             dist);
}

std::string describe(const Distribution& dist) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const law::Normal&) { out << "normal"; },
                 [&](const law::MultivariateT& d) { out << "mvt(" << d.df << ")"; },
                 [&](const law::MixedNormal& d) { out << "mixed_normal(" << d.gamma << "," << d.tau << ")"; },
                 [&](const law::FactorT& d) { out << "factor_t(" << d.df << ")"; },
                 [&](const law::FactorMixed& d) { out << "factor_mixed(" << d.gamma << "," << d.tau << ")"; },
             },
             dist);
  return out.str();
}

bool is_elliptical(const Distribution& dist) {
  return std::holds_alternative<law::Normal>(dist) || std::holds_alternative<law::MultivariateT>(dist) ||
         std::holds_alternative<law::MixedNormal>(dist);
}

double covariance_factor(const Distribution& dist) {
  validate(dist);
  auto t_variance = [](int df) { return static_cast<double>(df) / (df - 2.0); };
  auto mixture_variance = [](double gamma, double tau) { return (1.0 - gamma) + gamma * tau * tau; };
  return std::visit(overloaded{
                        [](const law::Normal&) { return 1.0; },
                        [&](const law::MultivariateT& d) { return t_variance(d.df); },
                        [&](const law::MixedNormal& d) { return mixture_variance(d.gamma, d.tau); },
                        [&](const law::FactorT& d) { return t_variance(d.df); },
                        [&](const law::FactorMixed& d) { return mixture_variance(d.gamma, d.tau); },
                    },
                    dist);
}

Distribution standard_distribution(ScenarioId id) {
  switch (id) {
    case ScenarioId::I:
      return law::Normal{};
    case ScenarioId::II:
      return law::MultivariateT{4};
    case ScenarioId::III:
      return law::MixedNormal{0.2, 3.0};
    case ScenarioId::IV:
      return law::FactorT{4};
    case ScenarioId::V:
      return law::FactorMixed{0.2, 3.0};
  }
  throw Error("unknown scenario id");
}

ScenarioSpec standard_scenario(ScenarioId id, Index p) {
  return ScenarioSpec{standard_distribution(id), ScatterSpec::toeplitz(0.5, p), to_string(id)};
}

std::string to_string(ScenarioId id) {
  static const char* names[] = {"I", "II", "III", "IV", "V"};
  return names[static_cast<int>(id) - 1];
}

ScenarioId parse_scenario_id(const std::string& text) {
  for (int i = 1; i <= 5; ++i) {
    if (to_string(static_cast<ScenarioId>(i)) == text) return static_cast<ScenarioId>(i);
  }
  throw Error("unknown scenario '" + text + "' (expected I, II, III, IV or V)");
}

std::string to_string(Allocation a) {
  switch (a) {
    case Allocation::Null:
      return "null";
    case Allocation::Dense:
      return "dense";
    case Allocation::Sparse:
      return "sparse";
  }
  return "?";
}

Allocation parse_allocation(const std::string& text) {
  if (text == "null") return Allocation::Null;
  if (text == "dense") return Allocation::Dense;
  if (text == "sparse") return Allocation::Sparse;
  throw Error("unknown allocation '" + text + "' (expected null, dense or sparse)");
}

Index zero_block_size(Allocation a, Index p) {
  switch (a) {
    case Allocation::Null:
      return p;
    case Allocation::Dense:
      return (p + 1) / 2;  // ceil(p / 2)
    case Allocation::Sparse:
      return (95 * p + 99) / 100;  // ceil(0.95 p)
  }
  return p;
}

Vector make_theta(const MeanSpec& mean, const ScenarioSpec& scenario) {
  const Index p = scenario.scatter.p();
  if (mean.p != p) throw Error("mean dimension does not match the scatter dimension");
  if (!(mean.signal >= 0.0) || !std::isfinite(mean.signal)) throw Error("signal must be non-negative");
  Vector theta = Vector::Zero(p);
  if (mean.allocation == Allocation::Null || mean.signal == 0.0) return theta;

  const Index zeros = zero_block_size(mean.allocation, p);
  const Index active = p - zeros;
  if (active < 1) throw Error("allocation leaves no nonzero component at this dimension");
  const double kappa = covariance_factor(scenario.distribution);
  const double trace_lambda2 = kappa * kappa * scenario.scatter.trace_squared();
  const double norm2 = mean.signal * std::sqrt(trace_lambda2);
  theta.tail(active).setConstant(std::sqrt(norm2 / static_cast<double>(active)));
  return theta;
}

void draw_standardized(const Distribution& dist, Matrix& eps, DrawStreams& streams) {
  std::normal_distribution<double> normal;
  double* data = eps.data();
  const Index size = eps.size();
  for (Index k = 0; k < size; ++k) data[k] = normal(streams.core);

  std::uniform_real_distribution<double> uniform;
  std::visit(overloaded{
                 [](const law::Normal&) {},
                 [&](const law::MultivariateT& d) {
                   std::chi_squared_distribution<double> chi2(d.df);
                   for (Index i = 0; i < eps.rows(); ++i) eps.row(i) *= std::sqrt(d.df / chi2(streams.mixing));
                 },
                 [&](const law::MixedNormal& d) {
                   for (Index i = 0; i < eps.rows(); ++i) {
                     if (uniform(streams.mixing) < d.gamma) eps.row(i) *= d.tau;
                   }
                 },
                 [&](const law::FactorT& d) {
                   std::chi_squared_distribution<double> chi2(d.df);
                   for (Index k = 0; k < size; ++k) data[k] *= std::sqrt(d.df / chi2(streams.mixing));
                 },
                 [&](const law::FactorMixed& d) {
                   for (Index k = 0; k < size; ++k) {
                     if (uniform(streams.mixing) < d.gamma) data[k] *= d.tau;
                   }
                 },
             },
             dist);
}

Sampler::Sampler(ScenarioSpec scenario, const MeanSpec& mean)
    : scenario_(std::move(scenario)), factor_(scenario_.scatter), theta_(make_theta(mean, scenario_)) {
  validate(scenario_.distribution);
}

SampleMatrix Sampler::draw(Index n, std::uint64_t seed) const {
  if (n < 1) throw Error("sample size must be positive");
  Matrix x(n, factor_.p());
  DrawStreams streams(seed);
  draw_standardized(scenario_.distribution, x, streams);
  factor_.apply_rows(x);
  if (!theta_.isZero(0.0)) x.rowwise() += theta_.transpose();
  return SampleMatrix(std::move(x));
}

SampleMatrix sample(const ScenarioSpec& scenario, const MeanSpec& mean, Index n, std::uint64_t seed) {
  return Sampler(scenario, mean).draw(n, seed);
}

}  // namespace hdloc
