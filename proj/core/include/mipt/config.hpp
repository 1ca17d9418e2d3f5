#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mipt/observables.hpp"

namespace mipt {

/// Line-oriented `key = value` file. `#` starts a comment; blank lines are ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  /// ConfigError naming every key not in `known`.
  void reject_unknown(const std::set<std::string>& known) const;

  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& key) const;
  std::string where(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

/// "0.1, 0.2" or an inclusive range "start:stop:step". Range values are
/// rounded to 12 decimals so that 0.18:0.23:0.005 yields the same doubles as
/// typing the list out.
std::vector<double> parse_number_list(const std::string& text);

/// Protocol and grid for `simulate` and `entropy-profile`.
struct SimulationConfig {
  std::vector<double> alphas{4.0};
  std::vector<double> ps;
  std::vector<std::size_t> Ls;
  std::vector<Scheme> schemes{Scheme::a};
  std::size_t R = 1000;
  std::size_t R_pilot = 64;
  int t_max = 4096;
  std::optional<int> t_min;
  std::optional<int> delta_t;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool allow_unit_p = false;
  std::filesystem::path output_dir = "results";

  static SimulationConfig from(const KeyValueConfig& kv);
  static const std::set<std::string>& keys();

  void validate() const;
  /// Cells in (alpha, scheme, L, p) order.
  std::vector<CellSpec> cells() const;
  /// Canonical key=value rendering, used as the manifest's config snapshot.
  std::map<std::string, std::string> snapshot() const;
};

inline constexpr std::size_t kPaperScaleR = 10560;

/// Options for `analyze` and `crossings`.
struct AnalysisConfig {
  std::vector<std::size_t> L_mins;  // empty: every size leaving >= 3 sizes
  std::optional<std::size_t> L_max;
  std::size_t bootstrap = 200;
  std::size_t crossing_bootstrap = 200;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  bool independent_omega2 = false;
  bool a2_zero = false;
  std::filesystem::path output_dir = "analysis";

  static AnalysisConfig from(const KeyValueConfig& kv);
  static const std::set<std::string>& keys();
};

std::size_t resolve_threads(std::size_t requested);

}  // namespace mipt
