#include "drfb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "drfb/errors.hpp"

namespace drfb {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 60.0, kRight = 14.0, kTitle = 18.0, kBottom = 16.0;
constexpr std::size_t kMaxPoints = 2000;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

void write_svg(const std::vector<SvgPanel>& panels, const std::string& path) {
    if (panels.empty()) throw validation_error("svg: no panels");
    std::ofstream out(path);
    if (!out) throw config_error("svg: cannot write " + path);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth
        << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";

    const double panel_h = kHeight / static_cast<double>(panels.size());
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double top = panel_h * static_cast<double>(pi) + kTitle;
        const double bottom = panel_h * static_cast<double>(pi + 1) - kBottom;
        const double x0 = kLeft, x1 = kWidth - kRight;

        double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
        double lo_y = lo_x, hi_y = -lo_x;
        for (const auto& s : panel.series)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                lo_x = std::min(lo_x, s.x[i]);
                hi_x = std::max(hi_x, s.x[i]);
                lo_y = std::min(lo_y, s.y[i]);
                hi_y = std::max(hi_y, s.y[i]);
            }
        if (!(lo_x < hi_x)) hi_x = lo_x + 1.0;
        if (!(lo_y < hi_y)) {
            lo_y -= 0.5;
            hi_y += 0.5;
        }
        const double pad = 0.04 * (hi_y - lo_y);
        lo_y -= pad;
        hi_y += pad;

        auto map_x = [&](double v) {
            return x0 + (v - lo_x) / (hi_x - lo_x) * (x1 - x0);
        };
        auto map_y = [&](double v) {
            return bottom - (v - lo_y) / (hi_y - lo_y) * (bottom - top);
        };

        out << "<text x=\"" << x0 << "\" y=\"" << top - 5
            << "\" font-weight=\"bold\">" << panel.title << "</text>\n";
        out << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\"" << x1 - x0
            << "\" height=\"" << bottom - top
            << "\" fill=\"none\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << x0 - 4 << "\" y=\"" << bottom
            << "\" text-anchor=\"end\">" << fmt(lo_y) << "</text>\n";
        out << "<text x=\"" << x0 - 4 << "\" y=\"" << top + 9
            << "\" text-anchor=\"end\">" << fmt(hi_y) << "</text>\n";
        out << "<text x=\"" << x0 << "\" y=\"" << bottom + 12 << "\">" << fmt(lo_x)
            << "</text>\n";
        out << "<text x=\"" << x1 << "\" y=\"" << bottom + 12
            << "\" text-anchor=\"end\">" << fmt(hi_x) << "</text>\n";

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const auto& s = panel.series[si];
            if (s.x.size() != s.y.size())
                throw validation_error("svg: series x/y length mismatch");
            if (s.x.empty()) continue;
            const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
            const std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPoints);
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); i += stride)
                out << fmt(map_x(s.x[i])) << "," << fmt(map_y(s.y[i])) << " ";
            const std::size_t last = s.x.size() - 1;
            out << fmt(map_x(s.x[last])) << "," << fmt(map_y(s.y[last]));
            out << "\"/>\n";
            out << "<text x=\"" << x1 - 6 << "\" y=\""
                << top + 12 + 12 * static_cast<double>(si)
                << "\" text-anchor=\"end\" fill=\"" << color << "\">" << s.label
                << "</text>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw config_error("svg: write failed for " + path);
}

} // namespace drfb
