#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "olab/stats/report.hpp"
#include "olab/stats/sensitivity.hpp"

namespace olab::figures {

struct ChartOptions {
    int width = 320;
    int height = 240;
    std::string title;
    double fadedOpacity = 0.35;  ///< charts whose omnibus test failed
};

/// Bars (mean with sd whiskers) for every row of the table plus one
/// <path class="arc" data-from=".." data-to=".."> per significance arc.
/// The chart is wrapped in <g class="chart" data-scope data-parameter data-measure>.
std::string barChartGroup(const stats::ParameterTable& table, const ChartOptions& options, double x = 0, double y = 0);
std::string barChartSvg(const stats::ParameterTable& table, const ChartOptions& options = {});

/// Grid with one row per scope and one column per parameter; missing
/// tables leave an empty cell.
std::string panelGridSvg(const stats::PerformanceReport& report, stats::Measure measure,
                         const std::vector<std::string>& scopes, const std::vector<stats::Parameter>& parameters,
                         const ChartOptions& cell = {});

/// Overall plus per-type rows by #colors, #shapes and outlier color.
std::string difficultyPanelSvg(const stats::PerformanceReport& report, stats::Measure measure = stats::Measure::ER);

/// OOT counts per value of `parameter`, stacked by type.
std::string ootStackedSvg(const stats::PerformanceReport& report, stats::Parameter parameter, const ChartOptions& options = {});

/// Mean rho against subset fraction, one polyline per curve.
std::string sensitivitySvg(const std::vector<stats::SensitivityCurve>& curves, const ChartOptions& options = {});

/// Writes the standard figure set for whatever inputs are given; returns the
/// files written.
std::vector<std::filesystem::path> writeFigureSet(const std::filesystem::path& dir, const stats::PerformanceReport* difficulty,
                                                  const stats::PerformanceReport* performance,
                                                  const std::vector<stats::SensitivityCurve>& sensitivity = {});

}  // namespace olab::figures
