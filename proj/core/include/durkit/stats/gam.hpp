#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "durkit/stats/design.hpp"

namespace durkit::stats {

struct GamBlock {
    enum class Kind { Parametric, Smooth, RandomIntercept };
    Kind kind = Kind::Parametric;
    std::string name;
    int offset = 0;
    int size = 0;
    double lambda = 0.0;  // 0 for the parametric block
    double edf = 0.0;
};

/// Everything a smooth needs away from the training data: basis geometry,
/// the constraint transform, and a deterministic rug sample.
struct SmoothInfo {
    std::string name;
    int basisDim = 0;
    std::vector<double> knots;
    Eigen::MatrixXd transform;
    double xMin = 0.0, xMax = 0.0;
    std::vector<double> rug;
    int blockIndex = 0;
};

struct GamFit {
    Eigen::VectorXd theta;
    std::vector<GamBlock> blocks;
    std::vector<SmoothInfo> smooths;
    std::vector<std::string> fixedNames;
    Eigen::MatrixXd postCov;  // sigma2 * (C'C + S_lambda)^-1
    double sigma2 = 0.0;      // RSS / (n - edf)
    double totalEdf = 0.0;
    double gcv = 0.0;
    double rss = 0.0;
    double logLik = 0.0;      // Gaussian, at the ML variance RSS/n
    double aic = 0.0;         // 2*(edf+1) - 2*logLik
    std::size_t nRows = 0;
    std::string responseName;
};

struct GamOptions {
    /// Smoothing parameters per penalized block (smooths first, then
    /// random intercepts). Empty selects by GCV.
    std::vector<double> fixedLambdas;
    double log10LambdaMin = -6.0;
    double log10LambdaMax = 10.0;
    int maxCycles = 30;
};

/// Penalized least squares with GCV-selected smoothing: minimizes
/// ||y - C theta||^2 + sum_j lambda_j theta' S_j theta, where C stacks the
/// parametric, spline, and random-intercept columns and random intercepts
/// carry ridge penalties.
GamFit fitGam(const DesignMatrices& design, const GamOptions& options = {});

/// GCV score at the given lambdas, exposed for the local-minimum checks.
double gamGcvAt(const DesignMatrices& design, const std::vector<double>& lambdas);

struct PartialEffect {
    std::string covariate;
    std::vector<double> grid;
    std::vector<double> fitted;  // centered over the observed values
    std::vector<double> se;
    int slopeSign = 0;  // sign of the average slope across the grid
};

/// Centered smooth curve with pointwise standard errors from the posterior
/// covariance, on an equally spaced grid over the observed range.
PartialEffect partialEffects(const GamFit& fit, const std::string& covariate,
                             int gridSize);

/// Fitted mean values on the training design.
Eigen::VectorXd gamFittedValues(const GamFit& fit, const DesignMatrices& design);

}  // namespace durkit::stats
