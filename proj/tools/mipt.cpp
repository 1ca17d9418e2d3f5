#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "mipt/analysis.hpp"
#include "mipt/clifford2.hpp"
#include "mipt/config.hpp"
#include "mipt/errors.hpp"
#include "mipt/pipeline.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  bool paper_scale = false;
  int threads = -1;
  std::string output_dir;
  bool quiet = false;
};

mipt::SimulationConfig load_simulation(const RunOptions& o) {
  auto kv = mipt::KeyValueConfig::load(o.config_path);
  auto cfg = mipt::SimulationConfig::from(kv);
  if (o.paper_scale) cfg.R = mipt::kPaperScaleR;
  if (o.threads >= 0) cfg.threads = static_cast<std::size_t>(o.threads);
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  return cfg;
}

mipt::ProgressFn progress_printer(bool quiet) {
  if (quiet) return {};
  return [](const std::string& line) { std::cerr << line << std::endl; };
}

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("config", o.config_path, "key=value configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--paper-scale", o.paper_scale, "use R = 10560 realizations per cell");
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd->add_option("--output-dir", o.output_dir, "override output_dir from the config");
  cmd->add_flag("-q,--quiet", o.quiet, "no per-cell progress on stderr");
}

int cmd_simulate(const RunOptions& o) {
  const auto cfg = load_simulation(o);
  const auto summary = mipt::run_simulation(cfg, progress_printer(o.quiet));
  std::cout << "wrote " << summary.csv.string() << " (" << summary.rows.size() << " cells, " << summary.computed
            << " computed, " << summary.reused << " cached)\n";
  return 0;
}

int cmd_entropy_profile(const RunOptions& o) {
  const auto cfg = load_simulation(o);
  const auto summary = mipt::run_entropy_profile(cfg, progress_printer(o.quiet));
  std::cout << "wrote " << summary.csv.string() << " (" << summary.profiles.size() << " cells, " << summary.computed
            << " computed, " << summary.reused << " cached)\n";
  return 0;
}

struct AnalyzeOptions {
  std::string results_path;
  std::string config_path;
  std::string output_dir;
  int threads = -1;
  bool quiet = false;
};

mipt::AnalysisConfig load_analysis(const AnalyzeOptions& o) {
  mipt::AnalysisConfig cfg;
  if (!o.config_path.empty()) cfg = mipt::AnalysisConfig::from(mipt::KeyValueConfig::load(o.config_path));
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (o.threads >= 0) cfg.threads = static_cast<std::size_t>(o.threads);
  return cfg;
}

void add_analyze_options(CLI::App* cmd, AnalyzeOptions& o) {
  cmd->add_option("results", o.results_path, "results.csv written by simulate")->required()->check(CLI::ExistingFile);
  cmd->add_option("-c,--config", o.config_path, "analysis key=value configuration")->check(CLI::ExistingFile);
  cmd->add_option("--output-dir", o.output_dir, "override output_dir");
  cmd->add_option("--threads", o.threads, "bootstrap threads (0: all cores)");
  cmd->add_flag("-q,--quiet", o.quiet, "no progress on stderr");
}

int cmd_analyze(const AnalyzeOptions& o) {
  const auto cfg = load_analysis(o);
  const auto rows = mipt::read_results_csv(o.results_path);
  const auto report = mipt::analyze_results(rows, cfg, progress_printer(o.quiet));
  for (const auto& path : mipt::write_analysis(report, cfg)) std::cout << "wrote " << path.string() << "\n";
  for (const auto& g : report.groups) {
    std::cout << "alpha=" << mipt::format_g9(g.alpha) << " scheme=" << mipt::scheme_char(g.scheme);
    if (g.p_c()) std::cout << " p_c=" << mipt::format_g9(*g.p_c()) << " +- " << mipt::format_g9(*g.p_c_err());
    if (g.nu()) std::cout << " nu=" << mipt::format_g9(*g.nu()) << " +- " << mipt::format_g9(*g.nu_err());
    std::cout << " (" << g.gaps.size() << " gaps)\n";
  }
  return 0;
}

int cmd_crossings(const AnalyzeOptions& o) {
  const auto cfg = load_analysis(o);
  const auto report = mipt::crossing_table(mipt::read_results_csv(o.results_path), cfg);
  mipt::write_crossings_csv(std::cout, report);
  for (const auto& g : report.groups)
    for (const auto& gap : g.gaps) std::cerr << "alpha=" << mipt::format_g9(g.alpha) << " scheme=" << mipt::scheme_char(g.scheme) << ": " << gap << "\n";
  return 0;
}

int cmd_census() {
  const auto gates = mipt::CliffordGroup2::enumerate();
  std::size_t symplectic = 0;
  for (const auto& g : gates) symplectic += g.preserves_symplectic_form() ? 1 : 0;
  std::cout << "two-qubit Clifford actions: " << gates.size() << "\n"
            << "symplectic-form preserving: " << symplectic << "\n";
  return gates.size() == 11520 && symplectic == gates.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monitored variable-range Clifford circuits: simulation and scaling analysis"};
  app.require_subcommand(1);

  RunOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "steady-state QCMI for every (alpha, p, L, scheme) cell");
  add_run_options(simulate, sim_opts);

  RunOptions ent_opts;
  auto* entropy = app.add_subcommand("entropy-profile", "steady-state S_AB, S_BC, S_D with chord lengths");
  add_run_options(entropy, ent_opts);

  AnalyzeOptions ana_opts;
  auto* analyze = app.add_subcommand("analyze", "collapse, L_min sweep, crossings and correction fits");
  add_analyze_options(analyze, ana_opts);

  AnalyzeOptions cross_opts;
  auto* crossings = app.add_subcommand("crossings", "crossing points of I(p, L) and I(p, 2L) as CSV on stdout");
  add_analyze_options(crossings, cross_opts);

  auto* census = app.add_subcommand("census", "enumerate the two-qubit Clifford group");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim_opts);
    if (*entropy) return cmd_entropy_profile(ent_opts);
    if (*analyze) return cmd_analyze(ana_opts);
    if (*crossings) return cmd_crossings(cross_opts);
    if (*census) return cmd_census();
  } catch (const mipt::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const mipt::AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
