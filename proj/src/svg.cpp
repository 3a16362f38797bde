#include "precflex/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "precflex/errors.hpp"

namespace precflex::svg {
namespace {

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

std::string coord(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

}  // namespace

std::string render(const LineChart& chart) {
    const double width = 720, height = 440;
    const double left = 70, right = 170, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    auto tx = [&](double x) { return chart.log2_x ? std::log2(x) : x; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = 0.0, y1 = -x0;
    for (const auto& s : chart.series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.y[k]) || (chart.log2_x && !(s.x[k] > 0))) continue;
            x0 = std::min(x0, tx(s.x[k]));
            x1 = std::max(x1, tx(s.x[k]));
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y1 = 1;
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    y1 *= 1.05;
    auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << coord(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 5; ++k) {
        const double y = y0 + (y1 - y0) * k / 5;
        o << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << coord(py(y)) << "\" y2=\""
          << coord(py(y)) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << coord(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
          << "</text>\n";
    }
    const int first = static_cast<int>(std::ceil(x0)), last = static_cast<int>(std::floor(x1));
    const int stride = std::max(1, (last - first) / 10 + 1);
    for (int k = first; k <= last; k += stride) {
        const double x = chart.log2_x ? std::ldexp(1.0, k) : k;
        const double xp = px(x);
        o << "<line x1=\"" << coord(xp) << "\" x2=\"" << coord(xp) << "\" y1=\"" << top + ph << "\" y2=\""
          << top + ph + 4 << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << coord(xp) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
          << (chart.log2_x ? "2^" + std::to_string(k) : num(x)) << "</text>\n";
    }
    o << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << coord(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

    for (std::size_t si = 0; si < chart.series.size(); ++si) {
        const auto& s = chart.series[si];
        const char* colour = palette[si % std::size(palette)];
        std::string points;
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.y[k]) || (chart.log2_x && !(s.x[k] > 0))) continue;
            points += coord(px(s.x[k])) + "," + coord(py(s.y[k])) + " ";
            o << "<circle cx=\"" << coord(px(s.x[k])) << "\" cy=\"" << coord(py(s.y[k])) << "\" r=\"3\" fill=\""
              << colour << "\"/>\n";
        }
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << points
          << "\"/>\n";
        const double ly = top + 10 + 18 * static_cast<double>(si);
        o << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly << "\" y2=\""
          << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string heatmap(const std::vector<double>& field, int rows, int cols, const std::string& title) {
    if (rows < 1 || cols < 1 || field.size() != static_cast<std::size_t>(rows) * cols) {
        throw DimensionError("heatmap: field size does not match shape");
    }
    double amax = 0.0;
    for (double x : field) {
        if (std::isfinite(x)) amax = std::max(amax, std::fabs(x));
    }
    if (amax == 0.0) amax = 1.0;

    const double cell = std::max(2.0, std::min(8.0, 640.0 / std::max(rows, cols)));
    const double width = rows * cell + 40, height = cols * cell + 60;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\" shape-rendering=\"crispEdges\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"20\" y=\"20\" font-size=\"14\">" << escape(title) << " (|max| = " << num(amax)
      << ")</text>\n";
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double x = field[static_cast<std::size_t>(i) * cols + j];
            const double t = std::isfinite(x) ? std::clamp(x / amax, -1.0, 1.0) : 0.0;
            // white at zero, red for positive, blue for negative
            const int fade = static_cast<int>(std::lround(255 * (1 - std::fabs(t))));
            const int r = t >= 0 ? 255 : fade, b = t <= 0 ? 255 : fade, g = fade;
            char colour[8];
            std::snprintf(colour, sizeof colour, "#%02x%02x%02x", r, g, b);
            o << "<rect x=\"" << coord(20 + i * cell) << "\" y=\"" << coord(30 + (cols - 1 - j) * cell)
              << "\" width=\"" << coord(cell) << "\" height=\"" << coord(cell) << "\" fill=\"" << colour
              << "\"/>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os || !(os << text)) {
        throw ResourceError("cannot write " + path);
    }
}

}  // namespace precflex::svg
