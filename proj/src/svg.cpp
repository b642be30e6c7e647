#include "mdshap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mdshap::svg {
namespace {

// Categorical palette for variables in stacked bars.
constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

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

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string header(double width, double height, const std::string& title) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<title>" << escape(title) << "</title>\n"
       << "<text x=\"" << num(width / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    return os.str();
}

// Blue (negative) to white to red (positive), t in [-1, 1].
std::string diverging(double t) {
    t = std::clamp(t, -1.0, 1.0);
    const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
    char buf[8];
    if (t >= 0) std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", 255, fade, fade);
    else std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", fade, fade, 255);
    return buf;
}

}  // namespace

std::string stacked_bars(const std::vector<std::string>& variables, const std::vector<std::string>& bar_labels,
                         const std::vector<Vector>& bars, const std::string& title) {
    const double bar_w = 24.0, gap = 10.0, left = 60.0, top = 40.0, plot_h = 260.0, legend_w = 120.0;
    double hi = 0.0, lo = 0.0;
    for (const Vector& b : bars) {
        hi = std::max(hi, b.cwiseMax(0.0).sum());
        lo = std::min(lo, b.cwiseMin(0.0).sum());
    }
    if (hi - lo <= 0.0) hi = 1.0;
    const double scale = plot_h / (hi - lo);
    const double zero_y = top + hi * scale;
    const double width = left + static_cast<double>(bars.size()) * (bar_w + gap) + gap + legend_w;
    const double height = top + plot_h + 60.0;

    std::ostringstream os;
    os << header(width, height, title);
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(zero_y) << "\" x2=\"" << num(width - legend_w)
       << "\" y2=\"" << num(zero_y) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + 4) << "\" text-anchor=\"end\">" << num(hi)
       << "</text>\n<text x=\"" << num(left - 6) << "\" y=\"" << num(top + plot_h) << "\" text-anchor=\"end\">"
       << num(lo) << "</text>\n";
    for (std::size_t b = 0; b < bars.size(); ++b) {
        const double x = left + gap + static_cast<double>(b) * (bar_w + gap);
        double up = zero_y, down = zero_y;
        os << "<g class=\"bar\" data-index=\"" << b << "\">\n";
        for (Eigen::Index j = 0; j < bars[b].size(); ++j) {
            const double v = bars[b](j);
            if (v == 0.0) continue;
            const double h = std::abs(v) * scale;
            double y;
            if (v > 0) {
                up -= h;
                y = up;
            } else {
                y = down;
                down += h;
            }
            const std::string name = static_cast<std::size_t>(j) < variables.size() ? variables[static_cast<std::size_t>(j)] : "";
            os << "  <rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(bar_w) << "\" height=\""
               << num(h) << "\" fill=\"" << kPalette[static_cast<std::size_t>(j) % 10] << "\"><title>"
               << escape(name) << ": " << num(v) << "</title></rect>\n";
        }
        const std::string label = b < bar_labels.size() ? bar_labels[b] : std::to_string(b);
        os << "  <text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(top + plot_h + 16)
           << "\" text-anchor=\"middle\">" << escape(label) << "</text>\n</g>\n";
    }
    for (std::size_t j = 0; j < variables.size(); ++j) {
        const double y = top + 14.0 * static_cast<double>(j);
        const double x = width - legend_w + 10;
        os << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\""
           << kPalette[j % 10] << "\"/><text x=\"" << num(x + 14) << "\" y=\"" << num(y + 9) << "\">"
           << escape(variables[j]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap(const std::vector<std::string>& variables, const Matrix& values, const std::string& title) {
    const double cell = 36.0, left = 90.0, top = 40.0;
    const auto p = values.rows();
    const double width = left + static_cast<double>(p) * cell + 20.0;
    const double height = top + static_cast<double>(p) * cell + 70.0;
    const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;

    std::ostringstream os;
    os << header(width, height, title);
    os << "<desc>color scale normalized to max |value| = " << num(scale) << "</desc>\n";
    for (Eigen::Index j = 0; j < p; ++j) {
        const std::string name = static_cast<std::size_t>(j) < variables.size() ? variables[static_cast<std::size_t>(j)] : "";
        os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + (static_cast<double>(j) + 0.6) * cell)
           << "\" text-anchor=\"end\">" << escape(name) << "</text>\n";
        os << "<text x=\"" << num(left + (static_cast<double>(j) + 0.5) * cell) << "\" y=\""
           << num(top + static_cast<double>(p) * cell + 14) << "\" text-anchor=\"middle\">" << escape(name)
           << "</text>\n";
        for (Eigen::Index k = 0; k < values.cols(); ++k) {
            const double v = values(j, k);
            const double t = scale > 0.0 ? v / scale : 0.0;
            os << "<rect class=\"cell\" x=\"" << num(left + static_cast<double>(k) * cell) << "\" y=\""
               << num(top + static_cast<double>(j) * cell) << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
               << "\" fill=\"" << diverging(t) << "\" stroke=\"#fff\"><title>" << num(v) << "</title></rect>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string tile_map(const std::vector<std::string>& variables, const std::vector<std::string>& row_labels,
                     const Matrix& direction, const Matrix& intensity, const std::vector<std::vector<bool>>& flagged,
                     const std::string& title) {
    const double cell = 18.0, left = 70.0, top = 40.0;
    const auto n = direction.rows();
    const auto p = direction.cols();
    const double width = left + static_cast<double>(p) * cell + 20.0;
    const double height = top + static_cast<double>(n) * cell + 80.0;
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (flagged[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                scale = std::max(scale, std::abs(intensity(i, j)));

    std::ostringstream os;
    os << header(width, height, title);
    os << "<desc>opacity normalized per figure to max |phi| = " << num(scale) << "</desc>\n";
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string label = static_cast<std::size_t>(i) < row_labels.size() ? row_labels[static_cast<std::size_t>(i)] : "";
        os << "<text x=\"" << num(left - 4) << "\" y=\"" << num(top + (static_cast<double>(i) + 0.7) * cell)
           << "\" text-anchor=\"end\">" << escape(label) << "</text>\n";
        for (Eigen::Index j = 0; j < p; ++j) {
            const bool f = flagged[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            std::string fill = "#f2f2f2";
            double opacity = 1.0;
            if (f) {
                fill = direction(i, j) > 0 ? "#d62728" : "#1f77b4";
                opacity = scale > 0.0 ? std::max(0.15, std::abs(intensity(i, j)) / scale) : 1.0;
            }
            os << "<rect class=\"tile\" x=\"" << num(left + static_cast<double>(j) * cell) << "\" y=\""
               << num(top + static_cast<double>(i) * cell) << "\" width=\"" << num(cell) << "\" height=\""
               << num(cell) << "\" fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
               << "\" stroke=\"#fff\"/>\n";
        }
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const std::string name = static_cast<std::size_t>(j) < variables.size() ? variables[static_cast<std::size_t>(j)] : "";
        const double x = left + (static_cast<double>(j) + 0.5) * cell;
        const double y = top + static_cast<double>(n) * cell + 8;
        os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" transform=\"rotate(90 " << num(x) << ' ' << num(y)
           << ")\">" << escape(name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string metric_bars(const std::vector<std::string>& groups, const std::vector<std::array<double, 3>>& values,
                        const std::string& title) {
    const double bar_w = 14.0, group_gap = 24.0, left = 50.0, top = 40.0, plot_h = 200.0;
    const double group_w = 3 * bar_w + group_gap;
    const double width = left + static_cast<double>(groups.size()) * group_w + 120.0;
    const double height = top + plot_h + 60.0;
    constexpr const char* names[] = {"Precision", "Recall", "F-Score"};
    constexpr const char* colors[] = {"#4e79a7", "#f28e2b", "#59a14f"};

    std::ostringstream os;
    os << header(width, height, title);
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(width - 120)
       << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"#333\"/>\n";
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double x0 = left + static_cast<double>(g) * group_w + group_gap / 2;
        os << "<g class=\"group\">\n";
        for (int m = 0; m < 3; ++m) {
            const double v = std::isfinite(values[g][m]) ? std::clamp(values[g][m], 0.0, 1.0) : 0.0;
            const double h = v * plot_h;
            os << "  <rect x=\"" << num(x0 + m * bar_w) << "\" y=\"" << num(top + plot_h - h) << "\" width=\""
               << num(bar_w) << "\" height=\"" << num(h) << "\" fill=\"" << colors[m] << "\"><title>" << names[m]
               << ": " << num(values[g][m]) << "</title></rect>\n";
        }
        os << "  <text x=\"" << num(x0 + 1.5 * bar_w) << "\" y=\"" << num(top + plot_h + 16)
           << "\" text-anchor=\"middle\">" << escape(groups[g]) << "</text>\n</g>\n";
    }
    for (int m = 0; m < 3; ++m) {
        const double y = top + 14.0 * m;
        os << "<rect x=\"" << num(width - 110) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\""
           << colors[m] << "\"/><text x=\"" << num(width - 96) << "\" y=\"" << num(y + 9) << "\">" << names[m]
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mdshap::svg
