#pragma once

#include <string>
#include <vector>

namespace drfb {

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};

struct SvgPanel {
    std::string title;
    std::vector<SvgSeries> series;
};

// Minimal single-file chart: fixed 800x500 viewBox, panels stacked
// vertically, linear axes, polyline traces (long series are thinned).
void write_svg(const std::vector<SvgPanel>& panels, const std::string& path);

} // namespace drfb
