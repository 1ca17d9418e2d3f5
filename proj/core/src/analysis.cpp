#include "mipt/analysis.hpp"

#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "mipt/errors.hpp"

namespace mipt {

using nlohmann::json;

std::optional<double> GroupReport::p_c() const {
  if (extrapolation) return extrapolation->p_c;
  if (collapse) return collapse->p_c;
  return std::nullopt;
}

std::optional<double> GroupReport::p_c_err() const {
  if (extrapolation) return extrapolation->p_c_err;
  if (collapse) return collapse->p_c_err;
  return std::nullopt;
}

std::optional<double> GroupReport::nu() const {
  if (extrapolation) return extrapolation->nu;
  if (collapse) return collapse->nu;
  return std::nullopt;
}

std::optional<double> GroupReport::nu_err() const {
  if (extrapolation) return extrapolation->nu_err;
  if (collapse) return collapse->nu_err;
  return std::nullopt;
}

namespace {

std::string group_name(const scaling::ScalingDataset& ds) {
  return "alpha=" + format_g9(ds.alpha()) + " scheme=" + scheme_char(ds.scheme());
}

std::vector<std::size_t> lmin_candidates(const scaling::ScalingDataset& ds, const AnalysisConfig& cfg,
                                         std::size_t L_max) {
  const auto sizes = ds.sizes();
  std::vector<std::size_t> out;
  if (!cfg.L_mins.empty()) return cfg.L_mins;
  for (std::size_t L : sizes) {
    const auto n = std::count_if(sizes.begin(), sizes.end(), [&](std::size_t s) { return s >= L && s <= L_max; });
    if (n >= 3) out.push_back(L);
  }
  return out;
}

void crossings_into(GroupReport& g, const scaling::ScalingDataset& ds, const AnalysisConfig& cfg) {
  scaling::CrossingOptions copts;
  copts.bootstrap = cfg.crossing_bootstrap;
  copts.seed = cfg.seed;
  if (g.collapse) copts.p_reference = g.collapse->p_c;
  g.crossings = scaling::find_crossings(ds, copts, &g.gaps);
}

}  // namespace

AnalysisReport analyze_results(const std::vector<SteadyStateEstimate>& rows, const AnalysisConfig& cfg,
                               const ProgressFn& progress) {
  if (rows.empty()) throw AnalysisError("no result rows to analyze");
  AnalysisReport report;
  for (const auto& ds : scaling::group_results(rows)) {
    GroupReport g;
    g.alpha = ds.alpha();
    g.scheme = ds.scheme();
    const auto sizes = ds.sizes();
    const std::size_t L_max = cfg.L_max.value_or(sizes.back());

    for (std::size_t L_min : lmin_candidates(ds, cfg, L_max)) {
      try {
        scaling::CollapseOptions copts;
        copts.restarts = cfg.restarts;
        auto fit = scaling::collapse_fit(ds, L_min, L_max, copts);
        if (cfg.bootstrap >= 100) {
          scaling::BootstrapOptions bopts;
          bopts.resamples = cfg.bootstrap;
          bopts.seed = cfg.seed + L_min;
          bopts.threads = resolve_threads(cfg.threads);
          const auto boot = scaling::bootstrap_collapse(ds, L_min, L_max, fit, bopts);
          fit.p_c_err = boot.p_c_sigma;
          fit.nu_err = boot.nu_sigma;
          fit.bootstrap_flagged = boot.flagged;
          if (boot.flagged)
            g.gaps.push_back("collapse L_min=" + std::to_string(L_min) + ": " + std::to_string(boot.failed) + " of " +
                             std::to_string(cfg.bootstrap) + " bootstrap refits failed");
        } else {
          g.gaps.push_back("collapse L_min=" + std::to_string(L_min) + ": bootstrap skipped (bootstrap < 100)");
        }
        if (!fit.converged) g.gaps.push_back("collapse L_min=" + std::to_string(L_min) + ": optimizer not converged");
        if (progress)
          progress(group_name(ds) + " L_min=" + std::to_string(L_min) + ": p_c=" + format_g9(fit.p_c) + " +- " +
                   format_g9(fit.p_c_err) + " nu=" + format_g9(fit.nu) + " +- " + format_g9(fit.nu_err));
        g.lmin_table.push_back(fit);
      } catch (const AnalysisError& e) {
        g.gaps.push_back("collapse L_min=" + std::to_string(L_min) + ": " + e.what());
      }
    }
    if (!g.lmin_table.empty()) {
      g.collapse = g.lmin_table.front();
      g.collapsed = scaling::collapsed_coordinates(ds.restricted(g.collapse->L_min, g.collapse->L_max),
                                                   g.collapse->p_c, g.collapse->nu);
    }
    try {
      g.extrapolation = scaling::lmin_extrapolate(g.lmin_table);
    } catch (const AnalysisError& e) {
      g.gaps.push_back(e.what());
    }

    crossings_into(g, ds, cfg);
    if (g.p_c() && g.nu()) {
      try {
        scaling::CrossingPOptions popts;
        popts.a2_zero = cfg.a2_zero;
        popts.independent_omega2 = cfg.independent_omega2;
        g.crossing_p_fit = scaling::fit_crossing_p(g.crossings, *g.p_c(), *g.nu(), popts);
        if (g.crossing_p_fit->flagged) g.gaps.push_back("crossing p fit: omega1 poorly identified");
      } catch (const AnalysisError& e) {
        g.gaps.push_back(e.what());
      }
    }
    if (g.crossing_p_fit) {
      try {
        g.crossing_I_fit = scaling::fit_crossing_I(g.crossings, g.crossing_p_fit->omega1, g.scheme);
      } catch (const AnalysisError& e) {
        g.gaps.push_back(e.what());
      }
    } else {
      g.gaps.push_back("crossing I fit: needs omega1 from the crossing p fit");
    }
    report.groups.push_back(std::move(g));
  }
  return report;
}

AnalysisReport crossing_table(const std::vector<SteadyStateEstimate>& rows, const AnalysisConfig& cfg) {
  if (rows.empty()) throw AnalysisError("no result rows to analyze");
  AnalysisReport report;
  for (const auto& ds : scaling::group_results(rows)) {
    GroupReport g;
    g.alpha = ds.alpha();
    g.scheme = ds.scheme();
    crossings_into(g, ds, cfg);
    report.groups.push_back(std::move(g));
  }
  return report;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json collapse_json(const scaling::CollapseFit& f) {
  return {{"L_min", f.L_min},
          {"L_max", f.L_max},
          {"p_c", f.p_c},
          {"p_c_err", f.p_c_err},
          {"nu", f.nu},
          {"nu_err", f.nu_err},
          {"amplitude", f.amplitude},
          {"length", f.length},
          {"noise_floor", f.noise_floor},
          {"log_marginal_likelihood", f.log_marginal_likelihood},
          {"n_points", f.n_points},
          {"converged", f.converged},
          {"bootstrap_flagged", f.bootstrap_flagged}};
}

json correction_json(const scaling::CorrectionFit& f) {
  return {{"omega1", f.omega1},         {"omega2", f.omega2},       {"a1", f.a1},
          {"a2", f.a2},                 {"c_over_3", f.c_over_3},   {"c_over_3_err", f.c_over_3_err},
          {"b1", f.b1},                 {"b2", f.b2},               {"chi2", f.chi2},
          {"residual_norm", f.residual_norm}, {"flagged", f.flagged}, {"omega1_interval", {f.omega1_lo, f.omega1_hi}}};
}

}  // namespace

std::string report_json(const AnalysisReport& report) {
  json groups = json::array();
  for (const auto& g : report.groups) {
    json lmin = json::array();
    for (const auto& f : g.lmin_table) lmin.push_back(collapse_json(f));
    json cross = json::array();
    for (const auto& c : g.crossings)
      cross.push_back({{"L", c.L},
                       {"p_cross", c.p_cross},
                       {"p_cross_err", c.p_cross_err},
                       {"I_cross", c.I_cross},
                       {"I_cross_err", c.I_cross_err},
                       {"multiple_roots", c.multiple_roots}});
    json extrap = nullptr;
    if (g.extrapolation)
      extrap = {{"p_c", g.extrapolation->p_c},
                {"p_c_err", g.extrapolation->p_c_err},
                {"nu", g.extrapolation->nu},
                {"nu_err", g.extrapolation->nu_err},
                {"L_mins", g.extrapolation->L_mins_used}};
    std::optional<double> omega1, c3, c3_err;
    if (g.crossing_p_fit) omega1 = g.crossing_p_fit->omega1;
    if (g.crossing_I_fit) {
      c3 = g.crossing_I_fit->c_over_3;
      c3_err = g.crossing_I_fit->c_over_3_err;
    }
    json omega_err = nullptr;
    if (g.crossing_p_fit) omega_err = {g.crossing_p_fit->omega1_lo, g.crossing_p_fit->omega1_hi};
    groups.push_back({{"alpha", g.alpha},
                      {"scheme", std::string(1, scheme_char(g.scheme))},
                      {"p_c", opt(g.p_c())},
                      {"nu", opt(g.nu())},
                      {"omega1", opt(omega1)},
                      {"c_over_3", opt(c3)},
                      {"errors", {{"p_c", opt(g.p_c_err())}, {"nu", opt(g.nu_err())}, {"omega1_interval", omega_err},
                                  {"c_over_3", opt(c3_err)}}},
                      {"collapse", g.collapse ? collapse_json(*g.collapse) : json(nullptr)},
                      {"L_min_table", lmin},
                      {"extrapolation", extrap},
                      {"crossing_table", cross},
                      {"crossing_p_fit", g.crossing_p_fit ? correction_json(*g.crossing_p_fit) : json(nullptr)},
                      {"crossing_I_fit", g.crossing_I_fit ? correction_json(*g.crossing_I_fit) : json(nullptr)},
                      {"gaps", g.gaps}});
  }
  return json({{"groups", groups}}).dump(2) + "\n";
}

void write_crossings_csv(std::ostream& out, const AnalysisReport& report) {
  out << "alpha,scheme,L,p_cross,p_cross_err,I_cross,I_cross_err,multiple_roots\n";
  for (const auto& g : report.groups)
    for (const auto& c : g.crossings)
      out << format_g9(g.alpha) << ',' << scheme_char(g.scheme) << ',' << c.L << ',' << format_g9(c.p_cross) << ','
          << format_g9(c.p_cross_err) << ',' << format_g9(c.I_cross) << ',' << format_g9(c.I_cross_err) << ','
          << (c.multiple_roots ? 1 : 0) << '\n';
}

void write_collapse_csv(std::ostream& out, const GroupReport& g) {
  out << "x,y,y_err,L\n";
  for (const auto& pt : g.collapsed)
    out << format_g9(pt.x) << ',' << format_g9(pt.y) << ',' << format_g9(pt.y_err) << ',' << pt.L << '\n';
}

std::vector<std::filesystem::path> write_analysis(const AnalysisReport& report, const AnalysisConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  std::vector<std::filesystem::path> written;
  const auto json_path = cfg.output_dir / "report.json";
  write_file_atomic(json_path, report_json(report));
  written.push_back(json_path);
  std::ostringstream cross;
  write_crossings_csv(cross, report);
  const auto cross_path = cfg.output_dir / "crossings.csv";
  write_file_atomic(cross_path, cross.str());
  written.push_back(cross_path);
  for (const auto& g : report.groups) {
    if (g.collapsed.empty()) continue;
    std::ostringstream csv;
    write_collapse_csv(csv, g);
    const auto path = cfg.output_dir / ("collapse_alpha" + format_g9(g.alpha) + "_" + scheme_char(g.scheme) + ".csv");
    write_file_atomic(path, csv.str());
    written.push_back(path);
  }
  return written;
}

}  // namespace mipt
