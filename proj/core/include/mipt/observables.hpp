#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mipt/circuit.hpp"
#include "mipt/tableau.hpp"

namespace mipt {

enum class Scheme { a, b };

char scheme_char(Scheme s);
Scheme parse_scheme(const std::string& s);  // "a" or "b"; ConfigError otherwise

/// Contiguous run of sites on the ring.
struct SiteRange {
  std::size_t begin = 0;
  std::size_t size = 0;
};

/// A|B|C laid out contiguously from site 0, D the remaining arc.
///   scheme a: |A| = |B| = |C| = L/4
///   scheme b: |A| = |C| = 5L/16, |B| = L/4
struct Partition {
  Scheme scheme = Scheme::a;
  std::size_t L = 0;
  SiteRange A, B, C, D;

  std::vector<std::size_t> sites(std::initializer_list<SiteRange> parts) const;
};

/// ConfigError unless L % 4 == 0 (scheme a) or L % 16 == 0 (scheme b).
Partition make_partition(std::size_t L, Scheme scheme);

/// Entropies entering the conditional mutual information, in bits.
struct QcmiTerms {
  int s_ab = 0;
  int s_bc = 0;
  int s_b = 0;
  int s_abc = 0;

  int value() const { return s_ab + s_bc - s_b - s_abc; }
};

/// Subset lists of a partition, built once and reused for every sample.
class PartitionSubsets {
 public:
  explicit PartitionSubsets(const Partition& part);

  const Partition& partition() const { return part_; }
  const std::vector<std::size_t>& a() const { return a_; }
  const std::vector<std::size_t>& b() const { return b_; }
  const std::vector<std::size_t>& c() const { return c_; }
  const std::vector<std::size_t>& d() const { return d_; }
  const std::vector<std::size_t>& ab() const { return ab_; }
  const std::vector<std::size_t>& bc() const { return bc_; }
  const std::vector<std::size_t>& ac() const { return ac_; }
  const std::vector<std::size_t>& abc() const { return abc_; }

 private:
  Partition part_;
  std::vector<std::size_t> a_, b_, c_, d_, ab_, bc_, ac_, abc_;
};

QcmiTerms qcmi_terms(const Tableau& t, const PartitionSubsets& subsets);

/// I(A:C|B) = S_AB + S_BC - S_B - S_ABC.
int qcmi(const Tableau& t, const Partition& part);
int qcmi(const Tableau& t, const PartitionSubsets& subsets);

/// I3(A:B:C) = S_A + S_B + S_C - S_AB - S_BC - S_AC - S_ABC, evaluated as written.
int tmi(const Tableau& t, const Partition& part);
int tmi(const Tableau& t, const PartitionSubsets& subsets);

struct AutocorrelationEstimate {
  int delta_t = 1;
  double tau = 0.0;
  std::size_t lags_used = 0;
  bool warning = false;  // constant or noise-dominated series
};

/// Decay constant of the empirical autocorrelation function, from a
/// least-squares fit of log ACF(k) = -k / tau through the origin over the
/// leading lags with ACF > 0.05 (at most length / 4 lags). delta_t = ceil(tau) >= 1.
/// Requires at least 32 samples (std::invalid_argument otherwise).
AutocorrelationEstimate estimate_autocorrelation_time(std::span<const double> series);

inline int default_t_min(std::size_t L) { return static_cast<int>(std::min<std::size_t>(2 * L, 2048)); }

/// Times t_min + k * delta_t, k = 0..n_samples()-1, with n_samples() maximal under t_max.
struct SamplingPlan {
  int t_min = 0;
  int delta_t = 1;
  int t_max = 0;

  int n_samples() const { return t_max < t_min ? 0 : (t_max - t_min) / delta_t + 1; }
  int time(int k) const { return t_min + k * delta_t; }
};

/// Per-realization values of one observable at the plan's sample times.
struct ObservableSeries {
  std::uint64_t zeta = 0;
  SamplingPlan plan;
  std::vector<double> values;
};

/// One (alpha, p, L, scheme) parameter point and the protocol constants used for it.
struct CellSpec {
  double alpha = 4.0;
  double p = 0.2;
  std::size_t L = 16;
  Scheme scheme = Scheme::a;
  int t_max = 4096;
  std::optional<int> t_min;  // default_t_min(L) when empty
  std::size_t R = 1000;
  std::size_t R_pilot = 64;
  std::optional<int> delta_t;  // skip the pilot when set
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
  bool allow_unit_p = false;

  int effective_t_min() const { return t_min.value_or(default_t_min(L)); }
  CircuitConfig circuit(std::uint64_t zeta) const;
  void validate() const;
};

struct SteadyStateEstimate {
  double alpha = 0.0;
  double p = 0.0;
  std::size_t L = 0;
  Scheme scheme = Scheme::a;
  double mean = 0.0;
  double std_error = 0.0;  // NaN when R < 2
  std::size_t R = 0;
  int n_t = 0;
  int delta_t = 1;
  int t_min = 0;
  std::uint64_t seed = 0;
  // Diagnostics, not part of the CSV row.
  double tau = 0.0;
  bool autocorr_warning = false;
  bool stderr_missing = false;
  double sample_min = 0.0;  // over every pilot and production sample
  double sample_max = 0.0;
};

/// Runs one realization from |0>^L, calling on_sample(k, state) at each plan time.
void run_realization(const CircuitConfig& cfg, const DistanceSampler& sampler, const CliffordGroup2& group,
                     std::uint64_t stream_seed, const SamplingPlan& plan,
                     const std::function<void(int, const Tableau&)>& on_sample);

/// Pilot: R_pilot realizations sampled every step from t_min; returns the
/// autocorrelation estimate of the realization-averaged QCMI series.
AutocorrelationEstimate pilot_delta_t(const CellSpec& cell, double* sample_min = nullptr,
                                      double* sample_max = nullptr);

/// Pilot (unless cell.delta_t is set), then R production realizations.
SteadyStateEstimate steady_state_qcmi(const CellSpec& cell);

/// Observable evaluated per sample: fills `out` (size n_observables).
struct ObservableSet {
  std::size_t n_observables = 1;
  std::function<void(const Tableau&, std::span<double>)> evaluate;
};

struct EnsembleSummary {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> min;
  std::vector<double> max;
  std::size_t R = 0;
};

/// Production run of an arbitrary observable set with a fixed sampling plan.
EnsembleSummary run_ensemble(const CellSpec& cell, const SamplingPlan& plan, const ObservableSet& obs);

struct EntropyEstimate {
  std::string subsystem;  // "AB", "BC" or "D"
  std::size_t size = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct EntropyProfile {
  SteadyStateEstimate qcmi;  // mean/stderr of I from the same run
  std::vector<EntropyEstimate> entropies;
};

/// Steady-state S_AB, S_BC and S_D of cell.scheme's partition, sampled with the
/// QCMI's pilot delta_t.
EntropyProfile entropy_profile(const CellSpec& cell);

}  // namespace mipt
