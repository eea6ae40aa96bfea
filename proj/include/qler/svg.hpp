// Copyright 2026 The qler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qler/error.hpp"

namespace qler {

/// Scatter series (drawn as markers).
struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Continuous curve (drawn as a polyline).
struct SvgCurve {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct SvgOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // plot log10(y); non-positive y values are dropped
    int width = 860;
    int height = 560;
};

namespace detail {

inline std::string svg_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string svg_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_text(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace detail

/// Renders a deterministic standalone SVG plot: axes with ticks, polyline
/// curves, circle markers, and a legend. Inputs with no finite points after
/// the log filter are rejected.
inline std::string render_svg(const std::vector<SvgCurve>& curves,
                              const std::vector<SvgSeries>& series, const SvgOptions& options) {
    static const char* kPalette[] = {"#1f6fb2", "#c23b22", "#2e8540", "#8e5fa8",
                                     "#b8860b", "#006d77", "#99424f"};
    const double margin_left = 72, margin_right = 24, margin_top = 48, margin_bottom = 56;
    const double plot_w = options.width - margin_left - margin_right;
    const double plot_h = options.height - margin_top - margin_bottom;

    auto transform_y = [&options](double y) {
        return options.log_y ? std::log10(y) : y;
    };
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
    bool first = true;
    auto scan = [&](const std::vector<std::pair<double, double>>& pts) {
        for (const auto& [x, y] : pts) {
            if (options.log_y && !(y > 0)) {
                continue;
            }
            double ty = transform_y(y);
            if (!std::isfinite(x) || !std::isfinite(ty)) {
                continue;
            }
            if (first) {
                min_x = max_x = x;
                min_y = max_y = ty;
                first = false;
            } else {
                min_x = std::min(min_x, x);
                max_x = std::max(max_x, x);
                min_y = std::min(min_y, ty);
                max_y = std::max(max_y, ty);
            }
        }
    };
    for (const auto& c : curves) {
        scan(c.points);
    }
    for (const auto& s : series) {
        scan(s.points);
    }
    require(!first, ErrorKind::DomainError, "nothing to plot");
    if (max_x == min_x) {
        max_x = min_x + 1;
    }
    if (max_y == min_y) {
        max_y = min_y + 1;
    }
    double pad_y = 0.05 * (max_y - min_y);
    min_y -= pad_y;
    max_y += pad_y;

    auto px = [&](double x) { return margin_left + (x - min_x) / (max_x - min_x) * plot_w; };
    auto py = [&](double y) {
        return margin_top + (max_y - transform_y(y)) / (max_y - min_y) * plot_h;
    };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
           "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " +
           std::to_string(options.width) + " " + std::to_string(options.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + detail::svg_num(options.width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           detail::svg_escape(options.title) + "</text>\n";

    // axes
    out += "<g stroke=\"#333333\" stroke-width=\"1\">\n";
    out += "<line x1=\"" + detail::svg_num(margin_left) + "\" y1=\"" +
           detail::svg_num(margin_top + plot_h) + "\" x2=\"" + detail::svg_num(margin_left + plot_w) +
           "\" y2=\"" + detail::svg_num(margin_top + plot_h) + "\"/>\n";
    out += "<line x1=\"" + detail::svg_num(margin_left) + "\" y1=\"" + detail::svg_num(margin_top) +
           "\" x2=\"" + detail::svg_num(margin_left) + "\" y2=\"" +
           detail::svg_num(margin_top + plot_h) + "\"/>\n";
    out += "</g>\n";

    // ticks
    out += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        double fx = min_x + (max_x - min_x) * i / ticks;
        double x = px(fx);
        out += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(margin_top + plot_h) +
               "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" +
               detail::svg_num(margin_top + plot_h + 5) + "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + detail::svg_num(x) + "\" y=\"" +
               detail::svg_num(margin_top + plot_h + 18) + "\" text-anchor=\"middle\">" +
               detail::tick_text(fx) + "</text>\n";

        double fy = min_y + (max_y - min_y) * i / ticks;
        double y = margin_top + (max_y - fy) / (max_y - min_y) * plot_h;
        double value = options.log_y ? std::pow(10.0, fy) : fy;
        out += "<line x1=\"" + detail::svg_num(margin_left - 5) + "\" y1=\"" + detail::svg_num(y) +
               "\" x2=\"" + detail::svg_num(margin_left) + "\" y2=\"" + detail::svg_num(y) +
               "\" stroke=\"#333333\"/>\n";
        out += "<text x=\"" + detail::svg_num(margin_left - 8) + "\" y=\"" +
               detail::svg_num(y + 4) + "\" text-anchor=\"end\">" + detail::tick_text(value) +
               "</text>\n";
    }
    out += "<text x=\"" + detail::svg_num(margin_left + plot_w / 2) + "\" y=\"" +
           detail::svg_num(options.height - 12.0) + "\" text-anchor=\"middle\">" +
           detail::svg_escape(options.x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + detail::svg_num(margin_top + plot_h / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::svg_num(margin_top + plot_h / 2) + ")\">" + detail::svg_escape(options.y_label) +
           "</text>\n";
    out += "</g>\n";

    int color_index = 0;
    double legend_y = margin_top + 6;
    auto legend_entry = [&](const std::string& label, const char* color, bool marker) {
        double lx = margin_left + plot_w - 160;
        out += marker ? "<circle cx=\"" + detail::svg_num(lx) + "\" cy=\"" +
                            detail::svg_num(legend_y - 3) + "\" r=\"3\" fill=\"" + color + "\"/>\n"
                      : "<line x1=\"" + detail::svg_num(lx - 6) + "\" y1=\"" +
                            detail::svg_num(legend_y - 3) + "\" x2=\"" + detail::svg_num(lx + 6) +
                            "\" y2=\"" + detail::svg_num(legend_y - 3) + "\" stroke=\"" + color +
                            "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail::svg_num(lx + 10) + "\" y=\"" + detail::svg_num(legend_y) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::svg_escape(label) +
               "</text>\n";
        legend_y += 16;
    };

    for (const SvgCurve& curve : curves) {
        const char* color = kPalette[color_index++ % 7];
        std::string path;
        for (const auto& [x, y] : curve.points) {
            if (options.log_y && !(y > 0)) {
                continue;
            }
            path += path.empty() ? "" : " ";
            path += detail::svg_num(px(x)) + "," + detail::svg_num(py(y));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + path + "\"/>\n";
        legend_entry(curve.label, color, false);
    }
    for (const SvgSeries& s : series) {
        const char* color = kPalette[color_index++ % 7];
        for (const auto& [x, y] : s.points) {
            if (options.log_y && !(y > 0)) {
                continue;
            }
            out += "<circle cx=\"" + detail::svg_num(px(x)) + "\" cy=\"" + detail::svg_num(py(y)) +
                   "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        legend_entry(s.label, color, true);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace qler
