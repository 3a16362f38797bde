#pragma once

#include <string>
#include <vector>

namespace precflex::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log2_x = true;
    std::vector<Series> series;
};

/// Standalone SVG document for a line chart with markers and a legend.
std::string render(const LineChart& chart);

/// Diverging blue-white-red heat map of a field with `rows` x-columns and
/// `cols` y-values (row-major, x outermost); y grows upwards.
std::string heatmap(const std::vector<double>& field, int rows, int cols, const std::string& title);

/// Writes text to a file; throws ResourceError on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace precflex::svg
