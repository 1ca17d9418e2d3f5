#include "mipt/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mipt/errors.hpp"
#include "mipt/parallel.hpp"

namespace mipt {

char scheme_char(Scheme s) { return s == Scheme::a ? 'a' : 'b'; }

Scheme parse_scheme(const std::string& s) {
  if (s == "a") return Scheme::a;
  if (s == "b") return Scheme::b;
  throw ConfigError("unknown partition scheme '" + s + "'");
}

std::vector<std::size_t> Partition::sites(std::initializer_list<SiteRange> parts) const {
  std::vector<std::size_t> out;
  for (const auto& r : parts)
    for (std::size_t k = 0; k < r.size; ++k) out.push_back((r.begin + k) % L);
  std::sort(out.begin(), out.end());
  return out;
}

Partition make_partition(std::size_t L, Scheme scheme) {
  Partition part;
  part.scheme = scheme;
  part.L = L;
  std::size_t na = 0, nb = 0, nc = 0;
  if (scheme == Scheme::a) {
    if (L < 4 || L % 4 != 0) throw ConfigError("scheme a needs L divisible by 4, got " + std::to_string(L));
    na = nb = nc = L / 4;
  } else {
    if (L < 16 || L % 16 != 0) throw ConfigError("scheme b needs L divisible by 16, got " + std::to_string(L));
    na = nc = 5 * L / 16;
    nb = L / 4;
  }
  part.A = {0, na};
  part.B = {na, nb};
  part.C = {na + nb, nc};
  part.D = {na + nb + nc, L - na - nb - nc};
  return part;
}

PartitionSubsets::PartitionSubsets(const Partition& part)
    : part_(part),
      a_(part.sites({part.A})),
      b_(part.sites({part.B})),
      c_(part.sites({part.C})),
      d_(part.sites({part.D})),
      ab_(part.sites({part.A, part.B})),
      bc_(part.sites({part.B, part.C})),
      ac_(part.sites({part.A, part.C})),
      abc_(part.sites({part.A, part.B, part.C})) {}

QcmiTerms qcmi_terms(const Tableau& t, const PartitionSubsets& s) {
  if (t.n_qubits() != s.partition().L) throw std::invalid_argument("qcmi: partition size does not match tableau");
  return {t.entropy(s.ab()), t.entropy(s.bc()), t.entropy(s.b()), t.entropy(s.abc())};
}

int qcmi(const Tableau& t, const PartitionSubsets& subsets) { return qcmi_terms(t, subsets).value(); }

int qcmi(const Tableau& t, const Partition& part) { return qcmi(t, PartitionSubsets(part)); }

int tmi(const Tableau& t, const PartitionSubsets& s) {
  if (t.n_qubits() != s.partition().L) throw std::invalid_argument("tmi: partition size does not match tableau");
  return t.entropy(s.a()) + t.entropy(s.b()) + t.entropy(s.c()) - t.entropy(s.ab()) - t.entropy(s.bc()) -
         t.entropy(s.ac()) - t.entropy(s.abc());
}

int tmi(const Tableau& t, const Partition& part) { return tmi(t, PartitionSubsets(part)); }

AutocorrelationEstimate estimate_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 32) throw std::invalid_argument("estimate_autocorrelation_time: need at least 32 samples");
  AutocorrelationEstimate est;

  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (!(c0 > 1e-300) || !std::isfinite(c0)) {
    est.warning = true;
    return est;
  }

  const std::size_t max_lag = n / 4;
  double sum_kk = 0.0;
  double sum_klog = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += (series[i] - mean) * (series[i + k] - mean);
    const double rho = ck / (static_cast<double>(n) * c0);
    if (!(rho > 0.05)) break;
    const double kk = static_cast<double>(k);
    sum_kk += kk * kk;
    sum_klog += kk * std::log(rho);
    ++est.lags_used;
  }
  if (est.lags_used == 0) return est;  // uncorrelated at lag 1

  est.tau = -sum_kk / sum_klog;
  if (!std::isfinite(est.tau) || est.tau <= 0.0) {
    est.tau = 0.0;
    est.warning = true;
    return est;
  }
  est.delta_t = std::max(1, static_cast<int>(std::ceil(est.tau)));
  return est;
}

CircuitConfig CellSpec::circuit(std::uint64_t zeta) const {
  CircuitConfig cfg;
  cfg.L = L;
  cfg.alpha = alpha;
  cfg.p = p;
  cfg.t_max = t_max;
  cfg.seed = master_seed;
  cfg.realization = zeta;
  return cfg;
}

void CellSpec::validate() const {
  circuit(0).validate(allow_unit_p);
  make_partition(L, scheme);
  const int tmin = effective_t_min();
  if (tmin < 0) throw ConfigError("t_min must be >= 0");
  if (t_max < tmin) throw ConfigError("t_max must be >= t_min");
  if (delta_t && *delta_t < 1) throw ConfigError("delta_t must be >= 1");
  if (R < 1) throw ConfigError("R must be >= 1");
}

void run_realization(const CircuitConfig& cfg, const DistanceSampler& sampler, const CliffordGroup2& group,
                     std::uint64_t stream_seed, const SamplingPlan& plan,
                     const std::function<void(int, const Tableau&)>& on_sample) {
  Rng rng(stream_seed);
  Tableau state = Tableau::zero_state(cfg.L);
  const int n = plan.n_samples();
  int k = 0;
  if (n > 0 && plan.time(0) == 0) on_sample(k++, state);
  for (int t = 1; t <= plan.t_max && k < n; ++t) {
    step(state, cfg, sampler, group, rng);
    if (t == plan.time(k)) on_sample(k++, state);
  }
}

namespace {

std::uint64_t stream_seed(const CellSpec& cell, StreamKind kind, std::uint64_t zeta) {
  return realization_seed(cell.master_seed, cell.alpha, cell.p, cell.L,
                          static_cast<std::uint64_t>(scheme_char(cell.scheme)), kind, zeta);
}

}  // namespace

AutocorrelationEstimate pilot_delta_t(const CellSpec& cell, double* sample_min, double* sample_max) {
  cell.validate();
  const auto& group = CliffordGroup2::instance();
  const DistanceSampler sampler(cell.L, cell.alpha);
  const PartitionSubsets subsets(make_partition(cell.L, cell.scheme));
  const SamplingPlan plan{cell.effective_t_min(), 1, cell.t_max};
  const auto n = static_cast<std::size_t>(plan.n_samples());
  const std::size_t R = std::max<std::size_t>(1, cell.R_pilot);

  std::vector<std::vector<double>> series(R, std::vector<double>(n));
  parallel_for(R, cell.threads, [&](std::size_t zeta) {
    run_realization(cell.circuit(zeta), sampler, group, stream_seed(cell, StreamKind::pilot, zeta), plan,
                    [&](int k, const Tableau& st) { series[zeta][static_cast<std::size_t>(k)] = qcmi(st, subsets); });
  });

  std::vector<double> averaged(n, 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (std::size_t k = 0; k < n; ++k) {
      averaged[k] += s[k] / static_cast<double>(R);
      lo = std::min(lo, s[k]);
      hi = std::max(hi, s[k]);
    }
  if (sample_min) *sample_min = lo;
  if (sample_max) *sample_max = hi;
  if (n < 32) {
    AutocorrelationEstimate est;
    est.warning = true;
    return est;
  }
  return estimate_autocorrelation_time(averaged);
}

EnsembleSummary run_ensemble(const CellSpec& cell, const SamplingPlan& plan, const ObservableSet& obs) {
  cell.validate();
  if (plan.n_samples() < 1) throw ConfigError("sampling plan has no sample times");
  const auto& group = CliffordGroup2::instance();
  const DistanceSampler sampler(cell.L, cell.alpha);
  const std::size_t m = obs.n_observables;
  const std::size_t R = cell.R;

  struct PerRealization {
    std::vector<double> sum, min, max;
  };
  std::vector<PerRealization> per(R);
  parallel_for(R, cell.threads, [&](std::size_t zeta) {
    PerRealization& pr = per[zeta];
    pr.sum.assign(m, 0.0);
    pr.min.assign(m, std::numeric_limits<double>::infinity());
    pr.max.assign(m, -std::numeric_limits<double>::infinity());
    std::vector<double> values(m);
    run_realization(cell.circuit(zeta), sampler, group, stream_seed(cell, StreamKind::production, zeta), plan,
                    [&](int, const Tableau& st) {
                      obs.evaluate(st, values);
                      for (std::size_t o = 0; o < m; ++o) {
                        pr.sum[o] += values[o];
                        pr.min[o] = std::min(pr.min[o], values[o]);
                        pr.max[o] = std::max(pr.max[o], values[o]);
                      }
                    });
  });

  // Reduction in zeta order.
  EnsembleSummary out;
  out.R = R;
  out.mean.assign(m, 0.0);
  out.std_error.assign(m, std::numeric_limits<double>::quiet_NaN());
  out.min.assign(m, std::numeric_limits<double>::infinity());
  out.max.assign(m, -std::numeric_limits<double>::infinity());
  const double nt = plan.n_samples();
  for (std::size_t o = 0; o < m; ++o) {
    double s = 0.0;
    for (const auto& pr : per) s += pr.sum[o] / nt;
    const double mean = s / static_cast<double>(R);
    double ss = 0.0;
    for (const auto& pr : per) {
      const double d = pr.sum[o] / nt - mean;
      ss += d * d;
      out.min[o] = std::min(out.min[o], pr.min[o]);
      out.max[o] = std::max(out.max[o], pr.max[o]);
    }
    out.mean[o] = mean;
    if (R >= 2) out.std_error[o] = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
  }
  return out;
}

namespace {

SteadyStateEstimate base_estimate(const CellSpec& cell) {
  SteadyStateEstimate est;
  est.alpha = cell.alpha;
  est.p = cell.p;
  est.L = cell.L;
  est.scheme = cell.scheme;
  est.R = cell.R;
  est.t_min = cell.effective_t_min();
  est.seed = cell.master_seed;
  return est;
}

// Pilot (or the fixed delta_t) shared by the QCMI and entropy-profile runs.
SteadyStateEstimate resolve_plan(const CellSpec& cell, SamplingPlan& plan) {
  SteadyStateEstimate est = base_estimate(cell);
  est.sample_min = std::numeric_limits<double>::infinity();
  est.sample_max = -std::numeric_limits<double>::infinity();
  if (cell.delta_t) {
    est.delta_t = *cell.delta_t;
  } else {
    const auto ac = pilot_delta_t(cell, &est.sample_min, &est.sample_max);
    est.delta_t = ac.delta_t;
    est.tau = ac.tau;
    est.autocorr_warning = ac.warning;
  }
  plan = SamplingPlan{est.t_min, est.delta_t, cell.t_max};
  est.n_t = plan.n_samples();
  return est;
}

}  // namespace

SteadyStateEstimate steady_state_qcmi(const CellSpec& cell) {
  cell.validate();
  SamplingPlan plan;
  SteadyStateEstimate est = resolve_plan(cell, plan);
  const PartitionSubsets subsets(make_partition(cell.L, cell.scheme));
  const ObservableSet obs{1, [&](const Tableau& st, std::span<double> out) { out[0] = qcmi(st, subsets); }};
  const auto sum = run_ensemble(cell, plan, obs);
  est.mean = sum.mean[0];
  est.std_error = sum.std_error[0];
  est.stderr_missing = cell.R < 2;
  est.sample_min = std::min(est.sample_min, sum.min[0]);
  est.sample_max = std::max(est.sample_max, sum.max[0]);
  return est;
}

EntropyProfile entropy_profile(const CellSpec& cell) {
  cell.validate();
  SamplingPlan plan;
  EntropyProfile prof;
  prof.qcmi = resolve_plan(cell, plan);
  const PartitionSubsets subsets(make_partition(cell.L, cell.scheme));
  const ObservableSet obs{4, [&](const Tableau& st, std::span<double> out) {
                            const auto terms = qcmi_terms(st, subsets);
                            out[0] = terms.s_ab;
                            out[1] = terms.s_bc;
                            out[2] = terms.s_abc;  // equals S_D for a pure state
                            out[3] = terms.value();
                          }};
  const auto sum = run_ensemble(cell, plan, obs);
  prof.qcmi.mean = sum.mean[3];
  prof.qcmi.std_error = sum.std_error[3];
  prof.qcmi.stderr_missing = cell.R < 2;
  prof.qcmi.sample_min = std::min(prof.qcmi.sample_min, sum.min[3]);
  prof.qcmi.sample_max = std::max(prof.qcmi.sample_max, sum.max[3]);
  const auto& part = subsets.partition();
  prof.entropies = {{"AB", part.A.size + part.B.size, sum.mean[0], sum.std_error[0]},
                    {"BC", part.B.size + part.C.size, sum.mean[1], sum.std_error[1]},
                    {"D", part.D.size, sum.mean[2], sum.std_error[2]}};
  return prof;
}

}  // namespace mipt
