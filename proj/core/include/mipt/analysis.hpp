#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mipt/config.hpp"
#include "mipt/observables.hpp"
#include "mipt/pipeline.hpp"
#include "mipt/scaling.hpp"

namespace mipt {

/// Everything `analyze` derives for one (alpha, scheme) group. Steps the data
/// cannot support are skipped and described in `gaps`.
struct GroupReport {
  double alpha = 0.0;
  Scheme scheme = Scheme::a;
  std::optional<scaling::CollapseFit> collapse;  // widest window
  std::vector<scaling::CollapseFit> lmin_table;
  std::optional<scaling::Extrapolation> extrapolation;
  std::vector<scaling::CrossingPoint> crossings;
  std::optional<scaling::CorrectionFit> crossing_p_fit;
  std::optional<scaling::CorrectionFit> crossing_I_fit;
  std::vector<scaling::CollapsedPoint> collapsed;
  std::vector<std::string> gaps;

  /// Extrapolated values when available, else the widest-window collapse.
  std::optional<double> p_c() const;
  std::optional<double> p_c_err() const;
  std::optional<double> nu() const;
  std::optional<double> nu_err() const;
};

struct AnalysisReport {
  std::vector<GroupReport> groups;
};

/// Collapse over every L_min window, bootstrap errors, L_min extrapolation,
/// crossing points and correction fits. AnalysisError on empty input.
AnalysisReport analyze_results(const std::vector<SteadyStateEstimate>& rows, const AnalysisConfig& cfg,
                               const ProgressFn& progress = {});

/// Crossing points only, for `crossings`.
AnalysisReport crossing_table(const std::vector<SteadyStateEstimate>& rows, const AnalysisConfig& cfg);

std::string report_json(const AnalysisReport& report);
void write_crossings_csv(std::ostream& out, const AnalysisReport& report);
void write_collapse_csv(std::ostream& out, const GroupReport& group);

/// Writes report.json, crossings.csv and one collapse_<alpha>_<scheme>.csv per
/// group into cfg.output_dir; returns the written paths.
std::vector<std::filesystem::path> write_analysis(const AnalysisReport& report, const AnalysisConfig& cfg);

}  // namespace mipt
