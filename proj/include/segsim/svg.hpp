#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "segsim/analytics.hpp"
#include "segsim/harness.hpp"

// Minimal hand-rolled SVG charts for the three output files. Convenience
// renderings, not a plotting library: fixed canvas, linear axes, no styling
// hooks.

namespace segsim::io {

namespace svg_detail {

inline std::string fixed(double v, int precision = 2) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

inline std::string hex_byte(int v) {
    static const char* digits = "0123456789abcdef";
    v = std::clamp(v, 0, 255);
    return {digits[v / 16], digits[v % 16]};
}

inline std::string rgb(double r, double g, double b) {
    return "#" + hex_byte(static_cast<int>(std::lround(r * 255.0))) +
           hex_byte(static_cast<int>(std::lround(g * 255.0))) +
           hex_byte(static_cast<int>(std::lround(b * 255.0)));
}

// Golden-angle hue walk keeps adjacent community lines distinguishable.
inline std::string community_color(std::uint32_t index) {
    const double h = std::fmod(index * 137.508, 360.0) / 60.0;
    const double s = 0.65;
    const double v = 0.80;
    const double c = v * s;
    const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
    const double m = v - c;
    double r = 0.0, g = 0.0, b = 0.0;
    switch (static_cast<int>(h)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    return rgb(r + m, g + m, b + m);
}

// Five-stop viridis approximation for heatmaps, t in [0, 1].
inline std::string heat_color(double t) {
    struct Stop {
        double r, g, b;
    };
    static constexpr Stop stops[] = {
        {0.267, 0.005, 0.329},
        {0.231, 0.322, 0.545},
        {0.129, 0.567, 0.551},
        {0.369, 0.788, 0.380},
        {0.993, 0.906, 0.144},
    };
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int lo = std::min(3, static_cast<int>(pos));
    const double f = pos - lo;
    const Stop& a = stops[lo];
    const Stop& b = stops[lo + 1];
    return rgb(a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b));
}

struct Frame {
    double x0, y0, width, height;  // plot area in canvas coordinates
    double xmin, xmax, ymin, ymax; // data ranges

    double x(double v) const { return x0 + (v - xmin) / (xmax - xmin) * width; }
    double y(double v) const { return y0 + height - (v - ymin) / (ymax - ymin) * height; }
};

inline void axes(std::string& out, const Frame& f, const std::string& x_label,
                 const std::string& y_label, int ticks = 5) {
    out += "<rect x='" + fixed(f.x0) + "' y='" + fixed(f.y0) + "' width='" + fixed(f.width) +
           "' height='" + fixed(f.height) + "' fill='none' stroke='#444'/>\n";
    for (int i = 0; i <= ticks; ++i) {
        const double tx = f.xmin + (f.xmax - f.xmin) * i / ticks;
        const double ty = f.ymin + (f.ymax - f.ymin) * i / ticks;
        out += "<line x1='" + fixed(f.x(tx)) + "' y1='" + fixed(f.y0 + f.height) + "' x2='" +
               fixed(f.x(tx)) + "' y2='" + fixed(f.y0 + f.height + 4) + "' stroke='#444'/>\n";
        out += "<text x='" + fixed(f.x(tx)) + "' y='" + fixed(f.y0 + f.height + 16) +
               "' font-size='10' text-anchor='middle'>" + fixed(tx, 3) + "</text>\n";
        out += "<line x1='" + fixed(f.x0 - 4) + "' y1='" + fixed(f.y(ty)) + "' x2='" +
               fixed(f.x0) + "' y2='" + fixed(f.y(ty)) + "' stroke='#444'/>\n";
        out += "<text x='" + fixed(f.x0 - 6) + "' y='" + fixed(f.y(ty) + 3) +
               "' font-size='10' text-anchor='end'>" + fixed(ty, 3) + "</text>\n";
    }
    out += "<text x='" + fixed(f.x0 + f.width / 2) + "' y='" + fixed(f.y0 + f.height + 32) +
           "' font-size='12' text-anchor='middle'>" + x_label + "</text>\n";
    out += "<text x='" + fixed(f.x0 - 40) + "' y='" + fixed(f.y0 + f.height / 2) +
           "' font-size='12' text-anchor='middle' transform='rotate(-90 " + fixed(f.x0 - 40) +
           " " + fixed(f.y0 + f.height / 2) + ")'>" + y_label + "</text>\n";
}

inline std::string svg_open(double width, double height) {
    return "<svg xmlns='http://www.w3.org/2000/svg' width='" + fixed(width, 0) + "' height='" +
           fixed(height, 0) + "' viewBox='0 0 " + fixed(width, 0) + " " + fixed(height, 0) +
           "'>\n<rect width='100%' height='100%' fill='white'/>\n";
}

}  // namespace svg_detail

// One polyline per community (mean opinion over time), broken at steps where
// the community is empty.
inline std::string render_timeseries_svg(const TimeSeries& series, std::uint32_t n_communities) {
    using namespace svg_detail;
    const double width = 880, height = 460;
    Frame f{60, 20, width - 80, height - 70, 0,
            series.steps.empty() ? 1.0 : static_cast<double>(series.steps.back()), 0.0, 1.0};
    if (f.xmax <= f.xmin) {
        f.xmax = f.xmin + 1.0;
    }
    std::string out = svg_open(width, height);
    axes(out, f, "step", "community mean opinion");
    for (std::uint32_t c = 0; c < n_communities; ++c) {
        const std::string color = community_color(c);
        std::string points;
        auto flush = [&]() {
            if (!points.empty()) {
                out += "<polyline fill='none' stroke='" + color + "' stroke-width='1' points='" +
                       points + "'/>\n";
                points.clear();
            }
        };
        for (std::size_t row = 0; row < series.steps.size(); ++row) {
            const auto& mean = series.community_means[row][c];
            if (!mean.has_value()) {
                flush();
                continue;
            }
            points += fixed(f.x(static_cast<double>(series.steps[row]))) + "," +
                      fixed(f.y(*mean)) + " ";
        }
        flush();
    }
    out += "</svg>\n";
    return out;
}

// Mean phi vs theta with the confidence band.
inline std::string render_sweep_svg(std::span<const SweepResult> results) {
    using namespace svg_detail;
    const double width = 640, height = 440;
    double xmin = results.empty() ? 0.0 : results.front().theta;
    double xmax = results.empty() ? 1.0 : results.back().theta;
    if (xmax <= xmin) {
        xmax = xmin + 1.0;
    }
    Frame f{60, 20, width - 80, height - 70, xmin, xmax, 0.0, 0.5};
    std::string out = svg_open(width, height);
    axes(out, f, "theta", "final phi");
    if (!results.empty()) {
        std::string band;
        for (const auto& r : results) {
            band += fixed(f.x(r.theta)) + "," + fixed(f.y(std::clamp(r.ci_high, 0.0, 0.5))) + " ";
        }
        for (auto it = results.rbegin(); it != results.rend(); ++it) {
            band += fixed(f.x(it->theta)) + "," + fixed(f.y(std::clamp(it->ci_low, 0.0, 0.5))) + " ";
        }
        out += "<polygon fill='#9ecae1' fill-opacity='0.6' stroke='none' points='" + band + "'/>\n";
        std::string line;
        for (const auto& r : results) {
            line += fixed(f.x(r.theta)) + "," + fixed(f.y(r.phi_mean)) + " ";
        }
        out += "<polyline fill='none' stroke='#08519c' stroke-width='1.5' points='" + line + "'/>\n";
        for (const auto& r : results) {
            out += "<circle cx='" + fixed(f.x(r.theta)) + "' cy='" + fixed(f.y(r.phi_mean)) +
                   "' r='2' fill='#08519c'/>\n";
        }
    }
    out += "<rect x='" + fixed(f.x0 + f.width - 150) + "' y='" + fixed(f.y0 + 8) +
           "' width='12' height='12' fill='#9ecae1' fill-opacity='0.6'/>\n";
    out += "<text x='" + fixed(f.x0 + f.width - 134) + "' y='" + fixed(f.y0 + 18) +
           "' font-size='11'>0.95 CI</text>\n";
    out += "<line x1='" + fixed(f.x0 + f.width - 150) + "' y1='" + fixed(f.y0 + 32) + "' x2='" +
           fixed(f.x0 + f.width - 138) + "' y2='" + fixed(f.y0 + 32) +
           "' stroke='#08519c' stroke-width='1.5'/>\n";
    out += "<text x='" + fixed(f.x0 + f.width - 134) + "' y='" + fixed(f.y0 + 36) +
           "' font-size='11'>mean phi</text>\n";
    out += "</svg>\n";
    return out;
}

// Paired heatmaps of the migration probability: linear scale on the left,
// log10 on the right.
inline std::string render_landscape_svg(const LandscapeGrid& grid) {
    using namespace svg_detail;
    const double panel_w = 380, panel_h = 380;
    const double width = 2 * panel_w + 150, height = panel_h + 90;
    const std::size_t nk = grid.k_values.size();
    const std::size_t nt = grid.theta_values.size();

    double log_min = 0.0;
    for (const auto& row : grid.log10_probabilities) {
        for (const double v : row) {
            if (std::isfinite(v)) {
                log_min = std::min(log_min, v);
            }
        }
    }
    if (log_min >= 0.0) {
        log_min = -1.0;
    }

    std::string out = svg_open(width, height);
    const char* titles[2] = {"Pr(migrate)", "log10 Pr(migrate)"};
    for (int panel = 0; panel < 2; ++panel) {
        Frame f{60 + panel * (panel_w + 70), 30, panel_w, panel_h,
                grid.theta_values.front(), grid.theta_values.back(),
                static_cast<double>(grid.k_values.front()),
                static_cast<double>(grid.k_values.back())};
        if (f.xmax <= f.xmin) {
            f.xmax = f.xmin + 1.0;
        }
        if (f.ymax <= f.ymin) {
            f.ymax = f.ymin + 1.0;
        }
        const double cell_w = f.width / static_cast<double>(nt);
        const double cell_h = f.height / static_cast<double>(nk);
        for (std::size_t i = 0; i < nk; ++i) {
            for (std::size_t j = 0; j < nt; ++j) {
                double t;
                if (panel == 0) {
                    t = grid.probabilities[i][j];
                } else {
                    const double lv = grid.log10_probabilities[i][j];
                    t = std::isfinite(lv) ? (lv - log_min) / (0.0 - log_min) : 0.0;
                }
                // k ascends upward: row i sits i cells above the bottom edge
                const double x = f.x0 + static_cast<double>(j) * cell_w;
                const double y = f.y0 + f.height - static_cast<double>(i + 1) * cell_h;
                out += "<rect x='" + fixed(x) + "' y='" + fixed(y) + "' width='" +
                       fixed(cell_w + 0.5) + "' height='" + fixed(cell_h + 0.5) + "' fill='" +
                       heat_color(t) + "'/>\n";
            }
        }
        axes(out, f, "theta", "k", 4);
        out += "<text x='" + fixed(f.x0 + f.width / 2) + "' y='" + fixed(f.y0 - 10) +
               "' font-size='13' text-anchor='middle'>" + titles[panel] + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace segsim::io
