#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "durkit/features.hpp"
#include "durkit/stats/formula.hpp"

namespace durkit::stats {

/// Cubic B-spline block with a second-order difference penalty. The
/// sum-to-zero constraint over the observed covariate values is absorbed:
/// `transform` maps the (dim-1)-vector of free coefficients back to the
/// raw basis, so `design` has dim-1 columns and `penalty` is
/// (dim-1)x(dim-1).
struct SmoothBasis {
    std::string name;
    int basisDim = 0;              // raw basis size before the constraint
    std::vector<double> knots;     // uniform extended knot vector
    Eigen::MatrixXd transform;     // basisDim x (basisDim-1)
    Eigen::MatrixXd design;        // n x (basisDim-1)
    Eigen::MatrixXd penalty;       // (basisDim-1) x (basisDim-1), PSD
    double xMin = 0.0, xMax = 0.0;
    std::vector<double> observed;  // covariate values, for rugs and checks
};

struct RandomBlock {
    std::string factor;
    std::vector<std::string> levels;
    Eigen::MatrixXd z;  // n x levels, rows sum to 1
};

struct DesignMatrices {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;  // intercept first
    std::vector<std::string> fixedNames;
    std::vector<SmoothBasis> smooths;
    std::vector<RandomBlock> randomBlocks;
    std::size_t nRows = 0;
    std::string responseName;
};

/// Raw cubic B-spline basis row at x (length = basisDim).
Eigen::VectorXd bsplineRow(double x, const std::vector<double>& knots, int basisDim);

/// Uniform extended knots covering [xMin, xMax] for a cubic basis.
std::vector<double> uniformKnots(double xMin, double xMax, int basisDim);

/// Expands the formula against the table: treatment contrasts for
/// categorical fixed terms, indicator blocks for random intercepts,
/// constrained penalized spline blocks for smooths.
DesignMatrices buildDesign(const ModelFormula& formula, const feat::FeatureTable& table,
                           int defaultBasisDim = 10);

}  // namespace durkit::stats
