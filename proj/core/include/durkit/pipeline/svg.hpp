#pragma once

#include <string>
#include <vector>

namespace durkit::pipeline {

/// Minimal self-contained SVG assembly: inline styling, no external
/// references, no timestamps, so identical inputs give identical bytes.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const std::string& stroke, double width = 1.5);
    void polygon(const std::vector<std::pair<double, double>>& points,
                 const std::string& fill, double opacity = 1.0);
    void rect(double x, double y, double w, double h, const std::string& fill);
    void text(double x, double y, const std::string& content, double size = 12.0,
              const std::string& anchor = "start", const std::string& fill = "#222222");

    std::string finish() const;

private:
    double width_, height_;
    std::vector<std::string> elements_;
};

struct AxisTicks {
    std::vector<double> values;
    std::vector<std::string> labels;
};

/// Round tick positions covering [lo, hi].
AxisTicks niceTicks(double lo, double hi, int target = 5);

/// Diverging blue-white-red color for v in [-1, 1].
std::string divergingColor(double v);

}  // namespace durkit::pipeline
