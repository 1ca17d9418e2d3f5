#include "mipt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "mipt/errors.hpp"
#include "mipt/parallel.hpp"

namespace mipt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError(context + ": '" + s + "' is not a number");
  return v;
}

std::int64_t to_int(const std::string& s, const std::string& context) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) throw ConfigError(context + ": '" + s + "' is not an integer");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& xs, auto&& fmt) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ',';
    out += fmt(xs[k]);
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (cfg.entries_.count(key))
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    cfg.entries_[key] = {value, lineno};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const KeyValueConfig::Entry& KeyValueConfig::entry(const std::string& key) const { return entries_.at(key); }

std::string KeyValueConfig::where(const std::string& key) const {
  const auto& e = entry(key);
  return source_ + (e.line > 0 ? ":" + std::to_string(e.line) : std::string()) + ": " + key;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? entry(key).value : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(entry(key).value, where(key)) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? to_int(entry(key).value, where(key)) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = entry(key).value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(where(key) + ": '" + v + "' is not a boolean");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  if (!has(key)) return {};
  try {
    return parse_number_list(entry(key).value);
  } catch (const ConfigError& e) {
    throw ConfigError(where(key) + ": " + e.what());
  }
}

std::vector<std::string> KeyValueConfig::get_strings(const std::string& key) const {
  if (!has(key)) return {};
  auto items = split(entry(key).value, ',');
  if (std::any_of(items.begin(), items.end(), [](const std::string& s) { return s.empty(); }))
    throw ConfigError(where(key) + ": empty list item");
  return items;
}

void KeyValueConfig::reject_unknown(const std::set<std::string>& known) const {
  std::string bad;
  for (const auto& [key, e] : entries_)
    if (!known.count(key)) bad += (bad.empty() ? "" : ", ") + key + " (line " + std::to_string(e.line) + ")";
  if (!bad.empty()) throw ConfigError(source_ + ": unknown keys: " + bad);
}

std::vector<double> parse_number_list(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty list");
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:step");
    const double start = to_double(parts[0], "range start");
    const double stop = to_double(parts[1], "range stop");
    const double step = to_double(parts[2], "range step");
    if (!(step > 0.0) || stop < start) throw ConfigError("range needs step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12;
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_double(item, "list item"));
  return out;
}

std::size_t resolve_threads(std::size_t requested) { return requested == 0 ? default_thread_count() : requested; }

const std::set<std::string>& SimulationConfig::keys() {
  static const std::set<std::string> k{"alpha", "p",    "L",       "scheme",  "R",            "R_pilot", "t_max",
                                       "t_min", "delta_t", "seed", "threads", "allow_unit_p", "output_dir"};
  return k;
}

SimulationConfig SimulationConfig::from(const KeyValueConfig& kv) {
  kv.reject_unknown(keys());
  SimulationConfig c;
  if (kv.has("alpha")) c.alphas = kv.get_doubles("alpha");
  c.ps = kv.get_doubles("p");
  for (double L : kv.get_doubles("L")) {
    if (L < 2 || L != std::floor(L)) throw ConfigError(kv.source() + ": L must be a positive integer list");
    c.Ls.push_back(static_cast<std::size_t>(L));
  }
  if (kv.has("scheme")) {
    c.schemes.clear();
    for (const auto& s : kv.get_strings("scheme")) c.schemes.push_back(parse_scheme(s));
  }
  auto positive = [&](const std::string& key, std::int64_t fallback) {
    const auto v = kv.get_int(key, fallback);
    if (v < 1) throw ConfigError(kv.source() + ": " + key + " must be >= 1");
    return v;
  };
  c.R = static_cast<std::size_t>(positive("R", static_cast<std::int64_t>(c.R)));
  c.R_pilot = static_cast<std::size_t>(positive("R_pilot", static_cast<std::int64_t>(c.R_pilot)));
  c.t_max = static_cast<int>(positive("t_max", c.t_max));
  if (kv.has("t_min")) c.t_min = static_cast<int>(kv.get_int("t_min", 0));
  if (kv.has("delta_t")) c.delta_t = static_cast<int>(positive("delta_t", 1));
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.seed)));
  const auto threads = kv.get_int("threads", 0);
  if (threads < 0) throw ConfigError(kv.source() + ": threads must be >= 0");
  c.threads = static_cast<std::size_t>(threads);
  c.allow_unit_p = kv.get_bool("allow_unit_p", false);
  c.output_dir = kv.get_string("output_dir", c.output_dir.string());
  c.validate();
  return c;
}

void SimulationConfig::validate() const {
  if (alphas.empty() || ps.empty() || Ls.empty() || schemes.empty())
    throw ConfigError("config needs non-empty alpha, p, L and scheme lists");
  for (const auto& cell : cells()) cell.validate();
}

std::vector<CellSpec> SimulationConfig::cells() const {
  auto sorted_unique = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto a = sorted_unique(alphas);
  const auto p = sorted_unique(ps);
  const auto l = sorted_unique(Ls);
  const auto s = sorted_unique(schemes);
  std::vector<CellSpec> out;
  for (double alpha : a)
    for (Scheme scheme : s)
      for (std::size_t L : l)
        for (double pv : p) {
          CellSpec cell;
          cell.alpha = alpha;
          cell.p = pv;
          cell.L = L;
          cell.scheme = scheme;
          cell.t_max = t_max;
          cell.t_min = t_min;
          cell.R = R;
          cell.R_pilot = R_pilot;
          cell.delta_t = delta_t;
          cell.master_seed = seed;
          cell.threads = resolve_threads(threads);
          cell.allow_unit_p = allow_unit_p;
          out.push_back(cell);
        }
  return out;
}

std::map<std::string, std::string> SimulationConfig::snapshot() const {
  std::map<std::string, std::string> m;
  m["alpha"] = join(alphas, format_double);
  m["p"] = join(ps, format_double);
  m["L"] = join(Ls, [](std::size_t v) { return std::to_string(v); });
  m["scheme"] = join(schemes, [](Scheme v) { return std::string(1, scheme_char(v)); });
  m["R"] = std::to_string(R);
  m["R_pilot"] = std::to_string(R_pilot);
  m["t_max"] = std::to_string(t_max);
  if (t_min) m["t_min"] = std::to_string(*t_min);
  if (delta_t) m["delta_t"] = std::to_string(*delta_t);
  m["seed"] = std::to_string(seed);
  m["allow_unit_p"] = allow_unit_p ? "true" : "false";
  return m;
}

const std::set<std::string>& AnalysisConfig::keys() {
  static const std::set<std::string> k{"L_min", "L_max",   "bootstrap",          "crossing_bootstrap",
                                       "restarts", "seed", "threads", "independent_omega2", "a2_zero",
                                       "output_dir"};
  return k;
}

AnalysisConfig AnalysisConfig::from(const KeyValueConfig& kv) {
  kv.reject_unknown(keys());
  AnalysisConfig c;
  for (double L : kv.get_doubles("L_min")) c.L_mins.push_back(static_cast<std::size_t>(L));
  if (kv.has("L_max")) c.L_max = static_cast<std::size_t>(kv.get_int("L_max", 0));
  c.bootstrap = static_cast<std::size_t>(kv.get_int("bootstrap", static_cast<std::int64_t>(c.bootstrap)));
  c.crossing_bootstrap =
      static_cast<std::size_t>(kv.get_int("crossing_bootstrap", static_cast<std::int64_t>(c.crossing_bootstrap)));
  c.restarts = static_cast<std::size_t>(kv.get_int("restarts", static_cast<std::int64_t>(c.restarts)));
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", 1));
  c.threads = static_cast<std::size_t>(kv.get_int("threads", 0));
  c.independent_omega2 = kv.get_bool("independent_omega2", false);
  c.a2_zero = kv.get_bool("a2_zero", false);
  c.output_dir = kv.get_string("output_dir", c.output_dir.string());
  if (c.restarts < 1) throw ConfigError(kv.source() + ": restarts must be >= 1");
  return c;
}

}  // namespace mipt
