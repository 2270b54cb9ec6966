#include "salnet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace salnet {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            const double pad = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return mag * (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0);
}

}  // namespace

std::string render_svg(const Chart& chart) {
    const double left = 70, right = 150, top = 40, bottom = 55;
    const double pw = chart.width - left - right;
    const double ph = chart.height - top - bottom;

    auto ty = [&](double y) { return chart.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!chart.log_y || y > 0); };

    Range xr, yr;
    for (const auto& s : chart.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            xr.add(s.x[i]);
            yr.add(ty(s.y[i]));
            if (s.style == SeriesStyle::bars && !chart.log_y) yr.add(0.0);
        }
    }
    xr.finish();
    yr.finish();

    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + ph - (ty(y) - yr.lo) / (yr.hi - yr.lo) * ph; };
    auto py_raw = [&](double t) { return top + ph - (t - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(chart.width) + "\" height=\"" +
           num(chart.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(chart.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(chart.title) + "</text>\n";
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = nice_step(xr.hi - xr.lo, 6);
    for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + xs * 1e-9; v += xs) {
        const double x = px(v);
        out += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
               num(top + ph + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(x) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
               tick_label(std::abs(v) < xs * 1e-9 ? 0.0 : v) + "</text>\n";
    }
    const double ys = chart.log_y ? std::max(1.0, std::round(nice_step(yr.hi - yr.lo, 5)))
                                  : nice_step(yr.hi - yr.lo, 5);
    for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + ys * 1e-9; v += ys) {
        const double y = py_raw(v);
        const double shown = std::abs(v) < ys * 1e-9 ? 0.0 : v;
        out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
               (chart.log_y ? "1e" + tick_label(shown) : tick_label(shown)) + "</text>\n";
    }
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(chart.height - 12) + "\" text-anchor=\"middle\">" +
           escape(chart.x_label) + "</text>\n";
    out += "<text transform=\"translate(16," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           escape(chart.y_label) + "</text>\n";

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const std::string color = kPalette[k % std::size(kPalette)];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.style == SeriesStyle::line) {
            std::string points;
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                if (!points.empty()) points += ' ';
                points += num(px(s.x[i])) + "," + num(py(s.y[i]));
            }
            out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points +
                   "\"/>\n";
        } else if (s.style == SeriesStyle::points) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"2\" fill=\"" +
                       color + "\"/>\n";
            }
        } else {
            double bar = pw / std::max<std::size_t>(n, 1) * 0.8;
            const double base = chart.log_y ? top + ph : py_raw(std::clamp(0.0, yr.lo, yr.hi));
            for (std::size_t i = 0; i < n; ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                const double x = px(s.x[i]);
                const double y = py(s.y[i]);
                out += "<rect x=\"" + num(x - bar / 2) + "\" y=\"" + num(std::min(y, base)) + "\" width=\"" +
                       num(bar) + "\" height=\"" + num(std::abs(base - y)) + "\" fill=\"" + color +
                       "\" fill-opacity=\"0.6\"/>\n";
            }
        }
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        out += "<rect x=\"" + num(left + pw + 12) + "\" y=\"" + num(ly - 8) + "\" width=\"12\" height=\"10\" fill=\"" +
               color + "\"/>\n";
        out += "<text x=\"" + num(left + pw + 30) + "\" y=\"" + num(ly + 1) + "\">" + escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace salnet
