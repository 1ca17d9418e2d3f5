#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mipt/clifford2.hpp"
#include "mipt/rng.hpp"
#include "mipt/tableau.hpp"

namespace mipt {

struct CircuitConfig {
  std::size_t L = 16;
  double alpha = 2.0;
  double p = 0.0;
  int t_max = 4096;
  std::uint64_t seed = 1;
  std::uint64_t realization = 0;

  /// Throws ConfigError. p = 1 is only accepted with `allow_unit_p` (test harnesses).
  void validate(bool allow_unit_p = false) const;
};

/// Periodic-chain distance between distinct sites i and j.
std::size_t ring_distance(std::size_t i, std::size_t j, std::size_t L);

/// Draws gate distances r in [1, L/2] with P(r) = r^-alpha / N.
class DistanceSampler {
 public:
  DistanceSampler(std::size_t L, double alpha);

  std::size_t L() const { return L_; }
  double alpha() const { return alpha_; }
  double normalization() const { return norm_; }
  double probability(std::size_t r) const;
  const std::vector<double>& cumulative() const { return cdf_; }

  template <class Rng>
  std::size_t sample_distance(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return draw(u);
  }

  /// Site i uniform, distance from the power law, direction +-1 uniform.
  template <class Rng>
  std::pair<std::size_t, std::size_t> sample_pair(Rng& rng) const {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, L_ - 1)(rng);
    const std::size_t r = sample_distance(rng);
    const bool forward = std::bernoulli_distribution(0.5)(rng);
    const std::size_t j = forward ? (i + r) % L_ : (i + L_ - r) % L_;
    return {i, j};
  }

 private:
  std::size_t draw(double u) const;

  std::size_t L_;
  double alpha_;
  double norm_ = 0.0;
  std::vector<double> cdf_;  // cdf_[r-1] = P(distance <= r)
};

/// Every random choice made during one time step.
struct StepRecord {
  struct Gate {
    std::size_t i;
    std::size_t j;
    std::size_t gate_index;
  };
  struct Measurement {
    std::size_t qubit;
    double coin;  // uniform [0,1); a random outcome is (coin >= 0.5)
  };
  std::vector<Gate> gates;
  std::vector<Measurement> measurements;
};

struct StepStats {
  std::size_t gates = 0;
  std::size_t measurements = 0;
  std::size_t random_outcomes = 0;
};

/// One time step: L gates on independently sampled pairs, each drawn
/// uniformly from `group`, then a Bernoulli(p) Z measurement on every qubit in
/// ascending order.
StepStats step(Tableau& state, const CircuitConfig& cfg, const DistanceSampler& sampler, const CliffordGroup2& group,
               Rng& rng);

/// Same draws as step(), recorded instead of applied.
StepRecord sample_step(const CircuitConfig& cfg, const DistanceSampler& sampler, const CliffordGroup2& group,
                       Rng& rng);

/// Applies a recorded step; returns the measurement outcomes in order.
std::vector<MeasureResult> replay_step(Tableau& state, const StepRecord& rec, const CliffordGroup2& group);

}  // namespace mipt
