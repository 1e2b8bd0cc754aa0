#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "hdloc/core_math.hpp"
#include "hdloc/rng.hpp"

namespace hdloc {

namespace law {

/// N(0, I) kernel.
struct Normal {};
/// Elliptical multivariate t: one chi-square divisor per row.
struct MultivariateT {
  int df;
};
/// Elliptical scale mixture: scale tau with probability gamma, else 1.
struct MixedNormal {
  double gamma;
  double tau;
};
/// Independent univariate t(df) coordinates (not elliptical).
struct FactorT {
  int df;
};
/// Independent coordinates from (1-gamma) N(0,1) + gamma N(0, tau^2).
struct FactorMixed {
  double gamma;
  double tau;
};

}  // namespace law

/// Law of the standardized variate eps, so that X = theta + L eps.
using Distribution =
    std::variant<law::Normal, law::MultivariateT, law::MixedNormal, law::FactorT, law::FactorMixed>;

void validate(const Distribution& dist);
std::string describe(const Distribution& dist);
bool is_elliptical(const Distribution& dist);

/// Covariance factor kappa with Lambda = kappa * Sigma.
double covariance_factor(const Distribution& dist);

struct ScenarioSpec {
  Distribution distribution;
  ScatterSpec scatter;
  std::string label;
};

enum class ScenarioId { I = 1, II, III, IV, V };

/// The five simulation scenarios with Sigma = (0.5^|i-j|):
/// I normal, II t_4, III MN(0.2, 3), IV factor t_4, V factor 0.8 N(0,1) + 0.2 N(0,9).
ScenarioSpec standard_scenario(ScenarioId id, Index p);
Distribution standard_distribution(ScenarioId id);
std::string to_string(ScenarioId id);
ScenarioId parse_scenario_id(const std::string& text);

enum class Allocation { Null, Dense, Sparse };

std::string to_string(Allocation a);
Allocation parse_allocation(const std::string& text);

/// Alternative mean: `signal` is the target of theta^T theta / sqrt(tr(Lambda^2)).
struct MeanSpec {
  Allocation allocation = Allocation::Null;
  double signal = 0.0;
  Index p = 0;
};

/// Number of leading zero components of theta for an allocation.
Index zero_block_size(Allocation a, Index p);

/// Realizes theta: zeros on the leading block, equal positive values after.
Vector make_theta(const MeanSpec& mean, const ScenarioSpec& scenario);

/// Fills `eps` (rows = observations) with standardized variates.
void draw_standardized(const Distribution& dist, Matrix& eps, DrawStreams& streams);

/// Cached sampler for one (scenario, mean) pair; draws are a pure function of
/// (n, seed) and the object is safe to share across threads.
class Sampler {
 public:
  Sampler(ScenarioSpec scenario, const MeanSpec& mean);

  SampleMatrix draw(Index n, std::uint64_t seed) const;
  const Vector& theta() const { return theta_; }
  const ScenarioSpec& scenario() const { return scenario_; }

 private:
  ScenarioSpec scenario_;
  ScatterFactor factor_;
  Vector theta_;
};

SampleMatrix sample(const ScenarioSpec& scenario, const MeanSpec& mean, Index n, std::uint64_t seed);

}  // namespace hdloc
