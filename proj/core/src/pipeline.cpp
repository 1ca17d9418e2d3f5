#include "mipt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mipt/errors.hpp"
#include "mipt/scaling.hpp"

namespace mipt {

using nlohmann::json;

namespace {

constexpr int kManifestFormat = 1;
constexpr const char* kCodeVersion = "0.1.0";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double csv_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

json estimate_to_json(const SteadyStateEstimate& e) {
  return {{"alpha", e.alpha},
          {"p", e.p},
          {"L", e.L},
          {"scheme", std::string(1, scheme_char(e.scheme))},
          {"I_mean", e.mean},
          {"I_stderr", std::isfinite(e.std_error) ? json(e.std_error) : json(nullptr)},
          {"R", e.R},
          {"N_t", e.n_t},
          {"delta_t", e.delta_t},
          {"t_min", e.t_min},
          {"seed", e.seed},
          {"tau", e.tau},
          {"autocorr_warning", e.autocorr_warning},
          {"stderr_missing", e.stderr_missing},
          {"sample_min", e.sample_min},
          {"sample_max", e.sample_max}};
}

SteadyStateEstimate estimate_from_json(const json& j) {
  SteadyStateEstimate e;
  e.alpha = j.at("alpha").get<double>();
  e.p = j.at("p").get<double>();
  e.L = j.at("L").get<std::size_t>();
  e.scheme = parse_scheme(j.at("scheme").get<std::string>());
  e.mean = j.at("I_mean").get<double>();
  e.std_error = j.at("I_stderr").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("I_stderr").get<double>();
  e.R = j.at("R").get<std::size_t>();
  e.n_t = j.at("N_t").get<int>();
  e.delta_t = j.at("delta_t").get<int>();
  e.t_min = j.at("t_min").get<int>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.tau = j.at("tau").get<double>();
  e.autocorr_warning = j.at("autocorr_warning").get<bool>();
  e.stderr_missing = j.at("stderr_missing").get<bool>();
  e.sample_min = j.at("sample_min").get<double>();
  e.sample_max = j.at("sample_max").get<double>();
  return e;
}

json profile_to_json(const EntropyProfile& p) {
  json ents = json::array();
  for (const auto& e : p.entropies)
    ents.push_back({{"subsystem", e.subsystem},
                    {"size", e.size},
                    {"mean", e.mean},
                    {"stderr", std::isfinite(e.std_error) ? json(e.std_error) : json(nullptr)}});
  return {{"qcmi", estimate_to_json(p.qcmi)}, {"entropies", ents}};
}

EntropyProfile profile_from_json(const json& j) {
  EntropyProfile p;
  p.qcmi = estimate_from_json(j.at("qcmi"));
  for (const auto& e : j.at("entropies"))
    p.entropies.push_back({e.at("subsystem").get<std::string>(), e.at("size").get<std::size_t>(),
                           e.at("mean").get<double>(),
                           e.at("stderr").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                    : e.at("stderr").get<double>()});
  return p;
}

std::string describe(const CellSpec& c) {
  std::ostringstream os;
  os << "alpha=" << format_g9(c.alpha) << " p=" << format_g9(c.p) << " L=" << c.L << " scheme=" << scheme_char(c.scheme);
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string format_g9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_results_csv(std::ostream& out, const std::vector<SteadyStateEstimate>& rows) {
  out << kResultsCsvHeader << '\n';
  for (const auto& r : rows)
    out << format_g9(r.alpha) << ',' << format_g9(r.p) << ',' << r.L << ',' << scheme_char(r.scheme) << ','
        << format_g9(r.mean) << ',' << format_g9(r.std_error) << ',' << r.R << ',' << r.n_t << ',' << r.delta_t << ','
        << r.t_min << ',' << r.seed << '\n';
}

std::vector<SteadyStateEstimate> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw AnalysisError("results CSV is empty");
  if (line != kResultsCsvHeader) throw AnalysisError("unexpected results CSV header: " + line);
  std::vector<SteadyStateEstimate> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) throw AnalysisError("results CSV line " + std::to_string(lineno) + ": expected 11 fields");
    try {
      SteadyStateEstimate e;
      e.alpha = csv_double(f[0]);
      e.p = csv_double(f[1]);
      e.L = std::stoul(f[2]);
      e.scheme = parse_scheme(f[3]);
      e.mean = csv_double(f[4]);
      e.std_error = csv_double(f[5]);
      e.R = std::stoul(f[6]);
      e.n_t = std::stoi(f[7]);
      e.delta_t = std::stoi(f[8]);
      e.t_min = std::stoi(f[9]);
      e.seed = std::stoull(f[10]);
      e.stderr_missing = std::isnan(e.std_error);
      rows.push_back(e);
    } catch (const std::exception& ex) {
      throw AnalysisError("results CSV line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return rows;
}

std::vector<SteadyStateEstimate> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AnalysisError("cannot open results file " + path.string());
  return read_results_csv(in);
}

std::string cell_key(const CellSpec& c) {
  std::ostringstream os;
  os << "alpha=" << format_g9(c.alpha) << "|p=" << format_g9(c.p) << "|L=" << c.L << "|scheme=" << scheme_char(c.scheme);
  return os.str();
}

std::string cell_fingerprint(const CellSpec& c) {
  std::ostringstream os;
  os << "R=" << c.R << "|R_pilot=" << c.R_pilot << "|t_max=" << c.t_max << "|t_min=" << c.effective_t_min()
     << "|delta_t=" << (c.delta_t ? std::to_string(*c.delta_t) : "pilot") << "|seed=" << c.master_seed;
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct RunManifest::Impl {
  json doc;
};

RunManifest::RunManifest(std::filesystem::path file) : file_(std::move(file)), impl_(std::make_unique<Impl>()) {
  if (std::filesystem::exists(file_)) {
    std::ifstream in(file_);
    try {
      impl_->doc = json::parse(in);
    } catch (const json::exception& e) {
      throw std::runtime_error("corrupt manifest " + file_.string() + ": " + e.what());
    }
    if (impl_->doc.value("format", 0) != kManifestFormat)
      throw std::runtime_error("unsupported manifest format in " + file_.string());
  } else {
    impl_->doc = {{"format", kManifestFormat}, {"cells", json::object()}, {"outputs", json::object()}};
  }
  impl_->doc["code_version"] = kCodeVersion;
}

RunManifest::~RunManifest() = default;
RunManifest::RunManifest(RunManifest&&) noexcept = default;
RunManifest& RunManifest::operator=(RunManifest&&) noexcept = default;

bool RunManifest::find_qcmi(const CellSpec& cell, SteadyStateEstimate& out) const {
  const auto& cells = impl_->doc["cells"];
  const auto it = cells.find("qcmi|" + cell_key(cell));
  if (it == cells.end() || it->value("fingerprint", "") != cell_fingerprint(cell) || it->value("status", "") != "done")
    return false;
  out = estimate_from_json(it->at("result"));
  return true;
}

void RunManifest::store_qcmi(const CellSpec& cell, const SteadyStateEstimate& est) {
  impl_->doc["cells"]["qcmi|" + cell_key(cell)] = {
      {"fingerprint", cell_fingerprint(cell)}, {"status", "done"}, {"result", estimate_to_json(est)}};
}

bool RunManifest::find_profile(const CellSpec& cell, EntropyProfile& out) const {
  const auto& cells = impl_->doc["cells"];
  const auto it = cells.find("entropy|" + cell_key(cell));
  if (it == cells.end() || it->value("fingerprint", "") != cell_fingerprint(cell) || it->value("status", "") != "done")
    return false;
  out = profile_from_json(it->at("result"));
  return true;
}

void RunManifest::store_profile(const CellSpec& cell, const EntropyProfile& prof) {
  impl_->doc["cells"]["entropy|" + cell_key(cell)] = {
      {"fingerprint", cell_fingerprint(cell)}, {"status", "done"}, {"result", profile_to_json(prof)}};
}

void RunManifest::set_config(const std::map<std::string, std::string>& snapshot) {
  impl_->doc["config"] = snapshot;
  impl_->doc["master_seed"] = snapshot.count("seed") ? snapshot.at("seed") : "";
}

void RunManifest::set_output(const std::string& name, const std::string& relative_path) {
  impl_->doc["outputs"][name] = relative_path;
}

std::size_t RunManifest::n_cells() const { return impl_->doc["cells"].size(); }

void RunManifest::save() const {
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  write_file_atomic(file_, impl_->doc.dump(2) + "\n");
}

SimulationSummary run_simulation(const SimulationConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  SimulationSummary summary;
  summary.manifest = cfg.output_dir / "manifest.json";
  summary.csv = cfg.output_dir / "results.csv";
  RunManifest manifest(summary.manifest);
  manifest.set_config(cfg.snapshot());
  manifest.set_output("results_csv", "results.csv");
  manifest.save();

  const auto cells = cfg.cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& cell = cells[k];
    SteadyStateEstimate est;
    const std::string tag = "[" + std::to_string(k + 1) + "/" + std::to_string(cells.size()) + "] " + describe(cell);
    if (manifest.find_qcmi(cell, est)) {
      ++summary.reused;
      if (progress) progress(tag + ": cached");
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      est = steady_state_qcmi(cell);
      manifest.store_qcmi(cell, est);
      manifest.save();
      ++summary.computed;
      if (progress) {
        std::ostringstream os;
        os << tag << ": I=" << format_g9(est.mean) << " +- " << format_g9(est.std_error) << " delta_t=" << est.delta_t
           << (est.autocorr_warning ? " (autocorrelation warning)" : "") << " [" << format_g9(seconds_since(t0))
           << " s]";
        progress(os.str());
      }
    }
    summary.rows.push_back(est);
  }

  std::ostringstream csv;
  write_results_csv(csv, summary.rows);
  write_file_atomic(summary.csv, csv.str());
  return summary;
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyProfileRow>& rows) {
  out << kEntropyCsvHeader << '\n';
  for (const auto& r : rows)
    out << format_g9(r.alpha) << ',' << format_g9(r.p) << ',' << r.L << ',' << scheme_char(r.scheme) << ','
        << r.subsystem << ',' << r.size << ',' << format_g9(r.chord_length) << ',' << format_g9(r.S_mean) << ','
        << format_g9(r.S_stderr) << ',' << r.R << ',' << r.n_t << ',' << r.delta_t << ',' << r.t_min << ',' << r.seed
        << '\n';
}

std::vector<EntropyProfileRow> read_entropy_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEntropyCsvHeader) throw AnalysisError("unexpected entropy CSV header");
  std::vector<EntropyProfileRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 14) throw AnalysisError("entropy CSV: expected 14 fields in '" + line + "'");
    EntropyProfileRow r;
    r.alpha = csv_double(f[0]);
    r.p = csv_double(f[1]);
    r.L = std::stoul(f[2]);
    r.scheme = parse_scheme(f[3]);
    r.subsystem = f[4];
    r.size = std::stoul(f[5]);
    r.chord_length = csv_double(f[6]);
    r.S_mean = csv_double(f[7]);
    r.S_stderr = csv_double(f[8]);
    r.R = std::stoul(f[9]);
    r.n_t = std::stoi(f[10]);
    r.delta_t = std::stoi(f[11]);
    r.t_min = std::stoi(f[12]);
    r.seed = std::stoull(f[13]);
    rows.push_back(r);
  }
  return rows;
}

EntropyProfileSummary run_entropy_profile(const SimulationConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  EntropyProfileSummary summary;
  summary.manifest = cfg.output_dir / "manifest.json";
  summary.csv = cfg.output_dir / "entropy_profile.csv";
  RunManifest manifest(summary.manifest);
  manifest.set_config(cfg.snapshot());
  manifest.set_output("entropy_profile_csv", "entropy_profile.csv");
  manifest.save();

  const auto cells = cfg.cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& cell = cells[k];
    EntropyProfile prof;
    const std::string tag = "[" + std::to_string(k + 1) + "/" + std::to_string(cells.size()) + "] " + describe(cell);
    if (manifest.find_profile(cell, prof)) {
      ++summary.reused;
      if (progress) progress(tag + ": cached");
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      prof = entropy_profile(cell);
      manifest.store_profile(cell, prof);
      manifest.save();
      ++summary.computed;
      if (progress) {
        std::ostringstream os;
        os << tag << ":";
        for (const auto& e : prof.entropies) os << " S_" << e.subsystem << "=" << format_g9(e.mean);
        os << " delta_t=" << prof.qcmi.delta_t << " [" << format_g9(seconds_since(t0)) << " s]";
        progress(os.str());
      }
    }
    for (const auto& e : prof.entropies) {
      EntropyProfileRow r;
      r.alpha = cell.alpha;
      r.p = cell.p;
      r.L = cell.L;
      r.scheme = cell.scheme;
      r.subsystem = e.subsystem;
      r.size = e.size;
      r.chord_length = scaling::chord_length(cell.L, e.size);
      r.S_mean = e.mean;
      r.S_stderr = e.std_error;
      r.R = prof.qcmi.R;
      r.n_t = prof.qcmi.n_t;
      r.delta_t = prof.qcmi.delta_t;
      r.t_min = prof.qcmi.t_min;
      r.seed = prof.qcmi.seed;
      summary.rows.push_back(r);
    }
    summary.profiles.push_back(std::move(prof));
  }

  std::ostringstream csv;
  write_entropy_csv(csv, summary.rows);
  write_file_atomic(summary.csv, csv.str());
  return summary;
}

}  // namespace mipt
