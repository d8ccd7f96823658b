#pragma once

#include <string>
#include <vector>

namespace xrouter::metricspipe {

struct RunSummary;

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // optional whisker bounds, same length as y
  std::vector<double> hi;
  double mean_line = -1.0;  // drawn as a dashed marker when >= 0
};

/// Self-contained SVG line chart; the plotted data is embedded as CSV in a
/// <desc> element.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<ChartSeries>& series);

/// SVG heatmap with one labelled cell per (row, column).
std::string heatmap_chart(const std::string& title, const std::vector<std::string>& rows,
                          const std::vector<std::string>& cols,
                          const std::vector<std::vector<double>>& values,
                          const std::vector<std::vector<std::string>>& labels);

/// TTFT, TPOT, user throughput and p99 against concurrency (one series per
/// scenario), and windowed throughput over time per scenario.
void write_charts(const std::vector<RunSummary>& runs, const std::string& out_dir);

}  // namespace xrouter::metricspipe
