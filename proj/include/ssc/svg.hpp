#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace ssc {

// Minimal static SVG writer: every document is a single self-contained
// <svg> element with inline styles and no external references.

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

class SvgCanvas {
public:
    SvgCanvas(double width, double height) : width_(width), height_(height) {}

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 0.0) {
        body_ += "<rect x=\"" + fmt_num(x) + "\" y=\"" + fmt_num(y) + "\" width=\"" +
                 fmt_num(w) + "\" height=\"" + fmt_num(h) + "\" fill=\"" + fill + "\"";
        if (stroke != "none")
            body_ += " stroke=\"" + stroke + "\" stroke-width=\"" + fmt_num(stroke_width) + "\"";
        body_ += "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0, const std::string& dash = "") {
        body_ += "<line x1=\"" + fmt_num(x1) + "\" y1=\"" + fmt_num(y1) + "\" x2=\"" +
                 fmt_num(x2) + "\" y2=\"" + fmt_num(y2) + "\" stroke=\"" + stroke +
                 "\" stroke-width=\"" + fmt_num(stroke_width) + "\"";
        if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
        body_ += "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double stroke_width = 1.5, const std::string& dash = "") {
        if (pts.empty()) return;
        body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 fmt_num(stroke_width) + "\"";
        if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
        body_ += " points=\"";
        for (const auto& [x, y] : pts) body_ += fmt_num(x) + "," + fmt_num(y) + " ";
        body_ += "\"/>\n";
    }

    void text(double x, double y, const std::string& s, double size = 12.0,
              const std::string& anchor = "start", const std::string& fill = "#000000") {
        body_ += "<text x=\"" + fmt_num(x) + "\" y=\"" + fmt_num(y) + "\" font-size=\"" +
                 fmt_num(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
                 "\" fill=\"" + fill + "\">" + xml_escape(s) + "</text>\n";
    }

    std::string str() const {
        return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
               fmt_num(width_) + "\" height=\"" + fmt_num(height_) + "\" viewBox=\"0 0 " +
               fmt_num(width_) + " " + fmt_num(height_) + "\">\n" + body_ + "</svg>\n";
    }

private:
    double width_, height_;
    std::string body_;
};

struct CurveSeries {
    std::string name;
    std::vector<double> x, y;
    std::string color = "#000000";
    std::string dash;  // empty = solid
};

/// Line chart with axes, linear ticks and a legend.
inline std::string render_curve_chart(const std::string& title, const std::string& xlabel,
                                      const std::string& ylabel,
                                      const std::vector<CurveSeries>& series,
                                      double width = 720, double height = 480) {
    SvgCanvas svg(width, height);
    const double ml = 64, mr = 24, mt = 40, mb = 52;
    const double px = width - ml - mr, py = height - mt - mb;
    svg.rect(0, 0, width, height, "#ffffff");
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                any = true;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;
    const auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * px; };
    const auto sy = [&](double v) { return mt + py - (v - ymin) / (ymax - ymin) * py; };
    // Axes and ticks.
    svg.line(ml, mt, ml, mt + py, "#000000");
    svg.line(ml, mt + py, ml + px, mt + py, "#000000");
    const int nticks = 6;
    for (int i = 0; i <= nticks; ++i) {
        const double tx = xmin + (xmax - xmin) * i / nticks;
        const double ty = ymin + (ymax - ymin) * i / nticks;
        svg.line(sx(tx), mt + py, sx(tx), mt + py + 4, "#000000");
        svg.text(sx(tx), mt + py + 18, fmt_num(tx), 11, "middle");
        svg.line(ml - 4, sy(ty), ml, sy(ty), "#000000");
        svg.text(ml - 8, sy(ty) + 4, fmt_num(ty), 11, "end");
        svg.line(ml, sy(ty), ml + px, sy(ty), "#e0e0e0", 0.5);
    }
    svg.text(ml + px / 2, height - 14, xlabel, 13, "middle");
    svg.text(16, mt + py / 2, ylabel, 13, "middle");
    svg.text(ml + px / 2, 22, title, 15, "middle");
    for (const auto& s : series) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) pts.emplace_back(sx(s.x[i]), sy(s.y[i]));
        svg.polyline(pts, s.color, 1.8, s.dash);
    }
    // Legend.
    double ly = mt + 10;
    for (const auto& s : series) {
        svg.line(ml + px - 130, ly, ml + px - 100, ly, s.color, 1.8, s.dash);
        svg.text(ml + px - 94, ly + 4, s.name, 12);
        ly += 18;
    }
    return svg.str();
}

/// Grayscale heatmap of a nonnegative matrix; row/column order follows the
/// matrix indexing (row 0 on top). Darker cells carry more mass.
inline std::string render_heatmap(const std::string& title, const Eigen::MatrixXd& m,
                                  double cell = 0.0) {
    const auto n_rows = m.rows(), n_cols = m.cols();
    if (cell <= 0) cell = std::max(4.0, std::min(32.0, 480.0 / std::max(n_rows, n_cols)));
    const double ml = 40, mt = 44, mb = 16, mr = 16;
    const double width = ml + mr + cell * n_cols;
    const double height = mt + mb + cell * n_rows;
    SvgCanvas svg(width, height);
    svg.rect(0, 0, width, height, "#ffffff");
    svg.text(width / 2, 24, title, 14, "middle");
    const double vmax = m.size() > 0 ? m.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            const double v = vmax > 0 ? m(i, j) / vmax : 0.0;
            const int level = 255 - static_cast<int>(std::lround(235.0 * std::clamp(v, 0.0, 1.0)));
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", level, level, level);
            svg.rect(ml + cell * static_cast<double>(j), mt + cell * static_cast<double>(i),
                     cell, cell, color);
        }
    }
    svg.rect(ml, mt, cell * static_cast<double>(n_cols), cell * static_cast<double>(n_rows),
             "none", "#000000", 1.0);
    return svg.str();
}

}  // namespace ssc
