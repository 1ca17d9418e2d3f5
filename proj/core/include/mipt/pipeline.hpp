#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mipt/config.hpp"
#include "mipt/observables.hpp"

namespace mipt {

/// "%.9g", the float format of every CSV this library writes.
std::string format_g9(double v);

/// Column header of the steady-state QCMI table.
inline constexpr const char* kResultsCsvHeader = "alpha,p,L,scheme,I_mean,I_stderr,R,N_t,delta_t,t_min,seed";

void write_results_csv(std::ostream& out, const std::vector<SteadyStateEstimate>& rows);
std::vector<SteadyStateEstimate> read_results_csv(std::istream& in);
std::vector<SteadyStateEstimate> read_results_csv(const std::filesystem::path& path);

/// Identifies the physical parameter point of a cell.
std::string cell_key(const CellSpec& cell);
/// Protocol constants a cached result must match to be reused.
std::string cell_fingerprint(const CellSpec& cell);

/// Writes `text` to `path` through a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Completion records of every cell computed in an output directory. The
/// file is rewritten atomically after each cell, so an interrupted sweep
/// resumes where it stopped.
class RunManifest {
 public:
  explicit RunManifest(std::filesystem::path file);
  ~RunManifest();
  RunManifest(RunManifest&&) noexcept;
  RunManifest& operator=(RunManifest&&) noexcept;

  const std::filesystem::path& file() const { return file_; }

  bool find_qcmi(const CellSpec& cell, SteadyStateEstimate& out) const;
  void store_qcmi(const CellSpec& cell, const SteadyStateEstimate& est);
  bool find_profile(const CellSpec& cell, EntropyProfile& out) const;
  void store_profile(const CellSpec& cell, const EntropyProfile& prof);

  void set_config(const std::map<std::string, std::string>& snapshot);
  void set_output(const std::string& name, const std::string& relative_path);
  std::size_t n_cells() const;

  void save() const;

 private:
  struct Impl;
  std::filesystem::path file_;
  std::unique_ptr<Impl> impl_;
};

using ProgressFn = std::function<void(const std::string& line)>;

struct SimulationSummary {
  std::vector<SteadyStateEstimate> rows;  // cells of the config, CSV order
  std::size_t computed = 0;
  std::size_t reused = 0;
  std::filesystem::path csv;
  std::filesystem::path manifest;
};

/// Pilot + production run for every cell of `cfg` not already in the
/// manifest, then regenerates <output_dir>/results.csv from the manifest.
SimulationSummary run_simulation(const SimulationConfig& cfg, const ProgressFn& progress = {});

struct EntropyProfileRow {
  double alpha = 0.0;
  double p = 0.0;
  std::size_t L = 0;
  Scheme scheme = Scheme::a;
  std::string subsystem;
  std::size_t size = 0;
  double chord_length = 0.0;
  double S_mean = 0.0;
  double S_stderr = 0.0;
  std::size_t R = 0;
  int n_t = 0;
  int delta_t = 1;
  int t_min = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kEntropyCsvHeader =
    "alpha,p,L,scheme,subsystem,size,chord_length,S_mean,S_stderr,R,N_t,delta_t,t_min,seed";

void write_entropy_csv(std::ostream& out, const std::vector<EntropyProfileRow>& rows);
std::vector<EntropyProfileRow> read_entropy_csv(std::istream& in);

struct EntropyProfileSummary {
  std::vector<EntropyProfileRow> rows;
  std::vector<EntropyProfile> profiles;  // one per cell
  std::size_t computed = 0;
  std::size_t reused = 0;
  std::filesystem::path csv;
  std::filesystem::path manifest;
};

/// Steady-state S_AB, S_BC, S_D (and the QCMI) for every cell of `cfg`,
/// written to <output_dir>/entropy_profile.csv with chord lengths.
EntropyProfileSummary run_entropy_profile(const SimulationConfig& cfg, const ProgressFn& progress = {});

}  // namespace mipt
