#include "durkit/stats/design.hpp"

#include <algorithm>
#include <set>

#include "durkit/common.hpp"

namespace durkit::stats {

std::vector<double> uniformKnots(double xMin, double xMax, int basisDim) {
    // degree-3 basis over basisDim-3 equal segments, extended by 3 on each side
    const int segments = basisDim - 3;
    const double h = (xMax - xMin) / static_cast<double>(segments);
    std::vector<double> knots;
    for (int i = -3; i <= segments + 3; ++i)
        knots.push_back(xMin + h * static_cast<double>(i));
    return knots;
}

Eigen::VectorXd bsplineRow(double x, const std::vector<double>& knots, int basisDim) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(basisDim);
    const int degree = 3;
    // locate the knot interval, clamping to the data range
    const double lo = knots[static_cast<std::size_t>(degree)];
    const double hi = knots[knots.size() - static_cast<std::size_t>(degree) - 1];
    double xc = std::min(std::max(x, lo), hi);
    int interval = degree;
    while (interval + 1 < static_cast<int>(knots.size()) - degree - 1 &&
           xc >= knots[static_cast<std::size_t>(interval) + 1])
        ++interval;

    // Cox-de Boor triangle for the degree+1 nonzero functions
    double b[4] = {1.0, 0.0, 0.0, 0.0};
    for (int d = 1; d <= degree; ++d) {
        double saved = 0.0;
        for (int r = 0; r < d; ++r) {
            const double left = knots[static_cast<std::size_t>(interval - d + 1 + r)];
            const double right = knots[static_cast<std::size_t>(interval + 1 + r)];
            const double term = b[r] / (right - left);
            b[r] = saved + (right - xc) * term;
            saved = (xc - left) * term;
        }
        b[d] = saved;
    }
    for (int r = 0; r <= degree; ++r) {
        const int idx = interval - degree + r;
        if (idx >= 0 && idx < basisDim) row[idx] = b[r];
    }
    return row;
}

namespace {

Eigen::MatrixXd secondDifferencePenalty(int dim) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim - 2, dim);
    for (int i = 0; i < dim - 2; ++i) {
        d(i, i) = 1.0;
        d(i, i + 1) = -2.0;
        d(i, i + 2) = 1.0;
    }
    return d.transpose() * d;
}

SmoothBasis buildSmooth(const std::string& name, const std::vector<double>& values,
                        int basisDim) {
    std::set<double> distinct(values.begin(), values.end());
    if (static_cast<int>(distinct.size()) < basisDim)
        fail("E_DEGENERATE", "smooth term s(" + name + ") has " +
                                 std::to_string(distinct.size()) +
                                 " distinct values; use a smaller basis (k <= " +
                                 std::to_string(distinct.size()) + ")");

    SmoothBasis s;
    s.name = name;
    s.basisDim = basisDim;
    s.observed = values;
    s.xMin = *std::min_element(values.begin(), values.end());
    s.xMax = *std::max_element(values.begin(), values.end());
    s.knots = uniformKnots(s.xMin, s.xMax, basisDim);

    const std::size_t n = values.size();
    Eigen::MatrixXd raw(n, basisDim);
    for (std::size_t i = 0; i < n; ++i)
        raw.row(static_cast<Eigen::Index>(i)) = bsplineRow(values[i], s.knots, basisDim);

    // absorb the sum-to-zero constraint: an orthonormal basis of the null
    // space of the column-sum vector reparameterizes to basisDim-1 columns
    Eigen::VectorXd columnSums = raw.colwise().sum().transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(columnSums);
    Eigen::MatrixXd q = qr.householderQ();
    s.transform = q.rightCols(basisDim - 1);
    s.design = raw * s.transform;
    s.penalty = s.transform.transpose() * secondDifferencePenalty(basisDim) * s.transform;
    // symmetrize against rounding
    s.penalty = 0.5 * (s.penalty + s.penalty.transpose());
    return s;
}

}  // namespace

DesignMatrices buildDesign(const ModelFormula& formula, const feat::FeatureTable& table,
                           int defaultBasisDim) {
    DesignMatrices design;
    design.nRows = table.nRows;
    design.responseName = formula.response;
    if (table.nRows == 0) fail("E_EMPTY", "empty table");

    const auto& response = table.numeric(formula.response);
    design.y = Eigen::Map<const Eigen::VectorXd>(response.data(),
                                                  static_cast<Eigen::Index>(table.nRows));

    // fixed block: intercept, numeric columns, treatment contrasts
    std::vector<std::vector<double>> fixedCols;
    design.fixedNames.push_back("(Intercept)");
    fixedCols.emplace_back(table.nRows, 1.0);
    for (const auto& name : formula.fixed) {
        if (table.numericIndex(name) >= 0) {
            design.fixedNames.push_back(name);
            fixedCols.push_back(table.numeric(name));
            continue;
        }
        if (table.categoricalIndex(name) >= 0) {
            const auto& col = table.categorical(name);
            std::set<std::string> levelSet(col.begin(), col.end());
            std::vector<std::string> levels(levelSet.begin(), levelSet.end());
            // first level is the reference
            for (std::size_t l = 1; l < levels.size(); ++l) {
                design.fixedNames.push_back(name + "=" + levels[l]);
                std::vector<double> indicator(table.nRows, 0.0);
                for (std::size_t r = 0; r < table.nRows; ++r)
                    if (col[r] == levels[l]) indicator[r] = 1.0;
                fixedCols.push_back(std::move(indicator));
            }
            continue;
        }
        fail("E_UNKNOWN_COLUMN", "formula term '" + name + "' is not in the table");
    }
    design.x.resize(static_cast<Eigen::Index>(table.nRows),
                    static_cast<Eigen::Index>(fixedCols.size()));
    for (std::size_t c = 0; c < fixedCols.size(); ++c)
        for (std::size_t r = 0; r < table.nRows; ++r)
            design.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                fixedCols[c][r];

    for (const auto& spec : formula.smooths) {
        const auto& values = table.numeric(spec.covariate);
        design.smooths.push_back(
            buildSmooth(spec.covariate, values, spec.basisDim.value_or(defaultBasisDim)));
    }

    for (const auto& factor : formula.randomIntercepts) {
        if (table.categoricalIndex(factor) < 0)
            fail("E_UNKNOWN_COLUMN",
                 "random-intercept factor '" + factor + "' is not a categorical column");
        const auto& col = table.categorical(factor);
        std::set<std::string> levelSet(col.begin(), col.end());
        RandomBlock block;
        block.factor = factor;
        block.levels.assign(levelSet.begin(), levelSet.end());
        block.z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(table.nRows),
                                        static_cast<Eigen::Index>(block.levels.size()));
        for (std::size_t r = 0; r < table.nRows; ++r) {
            const auto it =
                std::lower_bound(block.levels.begin(), block.levels.end(), col[r]);
            block.z(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(it - block.levels.begin())) = 1.0;
        }
        design.randomBlocks.push_back(std::move(block));
    }
    return design;
}

}  // namespace durkit::stats
