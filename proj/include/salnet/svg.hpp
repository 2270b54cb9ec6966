#pragma once

#include <string>
#include <vector>

namespace salnet {

enum class SeriesStyle { line, points, bars };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    SeriesStyle style = SeriesStyle::line;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool log_y = false;  // non-positive values are dropped
    double width = 640;
    double height = 420;
};

// Pure: the same chart always renders to the same bytes. Non-finite points
// are skipped.
std::string render_svg(const Chart& chart);

}  // namespace salnet
