#pragma once
#include <string>
#include <vector>

namespace irml {

struct SvgSeries {
  std::string name;
  std::vector<double> x, y;
};

struct SvgChartSpec {
  std::string title, x_label, y_label;
  bool log_y = false;
  int width = 720, height = 480;
};

// Self-contained line chart (inline styles, no external assets).  The plot
// transform is recorded in a leading comment so vertices can be mapped back to
// data coordinates exactly.  Scatter-only series are drawn when a series has
// a single point per x or marker_only is implied by name prefix "scatter:".
void emit_svg_chart(const std::string& path,
                    const std::vector<SvgSeries>& series,
                    const SvgChartSpec& spec);

// Parse back the data-space vertices of every polyline/marker group emitted by
// emit_svg_chart (uses the recorded transform comment).
std::vector<SvgSeries> parse_svg_chart(const std::string& path);

}  // namespace irml
