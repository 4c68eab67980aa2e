#include "durkit/pipeline/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace durkit::pipeline {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escapeXml(const std::string& s) {
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

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width) {
    elements_.push_back("<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
                        num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke +
                        "\" stroke-width=\"" + num(width) + "\"/>");
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& points,
                         const std::string& stroke, double width) {
    std::string pts;
    for (const auto& [x, y] : points) pts += num(x) + "," + num(y) + " ";
    elements_.push_back("<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
                        stroke + "\" stroke-width=\"" + num(width) + "\"/>");
}

void SvgCanvas::polygon(const std::vector<std::pair<double, double>>& points,
                        const std::string& fill, double opacity) {
    std::string pts;
    for (const auto& [x, y] : points) pts += num(x) + "," + num(y) + " ";
    elements_.push_back("<polygon points=\"" + pts + "\" fill=\"" + fill +
                        "\" fill-opacity=\"" + num(opacity) + "\" stroke=\"none\"/>");
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill) {
    elements_.push_back("<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
                        num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>");
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& anchor, const std::string& fill) {
    elements_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(y) +
                        "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
                        "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" +
                        escapeXml(content) + "</text>");
}

std::string SvgCanvas::finish() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_)
       << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " "
       << num(height_) << "\">\n"
       << "<rect width=\"" << num(width_) << "\" height=\"" << num(height_)
       << "\" fill=\"#ffffff\"/>\n";
    for (const auto& e : elements_) os << e << '\n';
    os << "</svg>\n";
    return os.str();
}

AxisTicks niceTicks(double lo, double hi, int target) {
    AxisTicks ticks;
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    const double rawStep = (hi - lo) / std::max(target, 2);
    const double mag = std::pow(10.0, std::floor(std::log10(rawStep)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (mag * m >= rawStep) {
            step = mag * m;
            break;
        }
    }
    const double start = std::ceil(lo / step) * step;
    for (double v = start; v <= hi + 1e-9 * step; v += step) {
        const double snapped = std::abs(v) < 1e-12 ? 0.0 : v;
        ticks.values.push_back(snapped);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", snapped);
        ticks.labels.push_back(buf);
    }
    return ticks;
}

std::string divergingColor(double v) {
    v = std::min(1.0, std::max(-1.0, v));
    int r, g, b;
    if (v >= 0) {
        r = 255;
        g = static_cast<int>(std::lround(255.0 * (1.0 - v)));
        b = g;
    } else {
        b = 255;
        g = static_cast<int>(std::lround(255.0 * (1.0 + v)));
        r = g;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace durkit::pipeline
