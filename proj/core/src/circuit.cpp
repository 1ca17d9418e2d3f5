#include "mipt/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mipt/errors.hpp"

namespace mipt {

void CircuitConfig::validate(bool allow_unit_p) const {
  if (L < 2 || L % 2 != 0) throw ConfigError("L must be even and >= 2, got " + std::to_string(L));
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and >= 0");
  const bool p_ok = allow_unit_p ? (p >= 0.0 && p <= 1.0) : (p >= 0.0 && p < 1.0);
  if (!p_ok) throw ConfigError("measurement rate p out of range: " + std::to_string(p));
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
}

std::size_t ring_distance(std::size_t i, std::size_t j, std::size_t L) {
  if (i >= L || j >= L) throw std::out_of_range("ring_distance: site out of range");
  if (i == j) throw std::invalid_argument("ring_distance: sites must differ");
  const std::size_t d = i > j ? i - j : j - i;
  return d <= L / 2 ? d : L - d;
}

DistanceSampler::DistanceSampler(std::size_t L, double alpha) : L_(L), alpha_(alpha) {
  if (L < 2 || L % 2 != 0) throw ConfigError("DistanceSampler: L must be even and >= 2");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("DistanceSampler: alpha must be finite and >= 0");
  const std::size_t rmax = L / 2;
  std::vector<double> w(rmax);
  for (std::size_t r = 1; r <= rmax; ++r) w[r - 1] = std::pow(static_cast<double>(r), -alpha);
  // Summed smallest-first for accuracy.
  for (std::size_t k = rmax; k-- > 0;) norm_ += w[k];
  cdf_.resize(rmax);
  double acc = 0.0;
  for (std::size_t k = 0; k < rmax; ++k) {
    acc += w[k] / norm_;
    cdf_[k] = acc;
  }
  cdf_.back() = 1.0;
}

double DistanceSampler::probability(std::size_t r) const {
  if (r < 1 || r > L_ / 2) return 0.0;
  return std::pow(static_cast<double>(r), -alpha_) / norm_;
}

std::size_t DistanceSampler::draw(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto k = static_cast<std::size_t>(it - cdf_.begin());
  return std::min(k, cdf_.size() - 1) + 1;
}

StepStats step(Tableau& state, const CircuitConfig& cfg, const DistanceSampler& sampler, const CliffordGroup2& group,
               Rng& rng) {
  StepStats stats;
  const std::size_t L = cfg.L;
  for (std::size_t g = 0; g < L; ++g) {
    const auto [i, j] = sampler.sample_pair(rng);
    const std::size_t idx = group.sample_index(rng);
    state.apply(group.compiled(idx), i, j);
  }
  stats.gates = L;
  std::bernoulli_distribution measure(cfg.p);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t q = 0; q < L; ++q) {
    if (!measure(rng)) continue;
    ++stats.measurements;
    if (state.collapse_z(q, coin(rng) >= 0.5)) ++stats.random_outcomes;
  }
  return stats;
}

StepRecord sample_step(const CircuitConfig& cfg, const DistanceSampler& sampler, const CliffordGroup2& group,
                       Rng& rng) {
  StepRecord rec;
  const std::size_t L = cfg.L;
  rec.gates.reserve(L);
  for (std::size_t g = 0; g < L; ++g) {
    const auto [i, j] = sampler.sample_pair(rng);
    rec.gates.push_back({i, j, group.sample_index(rng)});
  }
  std::bernoulli_distribution measure(cfg.p);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t q = 0; q < L; ++q)
    if (measure(rng)) rec.measurements.push_back({q, coin(rng)});
  return rec;
}

std::vector<MeasureResult> replay_step(Tableau& state, const StepRecord& rec, const CliffordGroup2& group) {
  for (const auto& g : rec.gates) state.apply(group.compiled(g.gate_index), g.i, g.j);
  std::vector<MeasureResult> outcomes;
  outcomes.reserve(rec.measurements.size());
  for (const auto& m : rec.measurements) outcomes.push_back(state.measure_z_with(m.qubit, m.coin >= 0.5));
  return outcomes;
}

}  // namespace mipt
