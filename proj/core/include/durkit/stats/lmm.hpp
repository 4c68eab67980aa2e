#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "durkit/stats/design.hpp"

namespace durkit::stats {

struct VarianceComponent {
    std::string factor;
    double sigma2 = 0.0;
    bool boundary = false;  // variance pinned at the zero boundary
};

struct LmmFit {
    std::vector<std::string> fixedNames;
    Eigen::VectorXd beta;
    Eigen::VectorXd seBeta;
    std::vector<VarianceComponent> components;
    double sigma2Residual = 0.0;
    double remlCriterion = 0.0;  // -2 * restricted log-likelihood
    /// Profile ML log-likelihood at the REML variance ratios: beta and the
    /// residual variance are re-profiled under ML so AIC comparisons share
    /// one likelihood scale.
    double mlLogLik = 0.0;
    double df = 0.0;             // fixed + variance components + residual
    double aic = 0.0;
    std::size_t nRows = 0;
    bool converged = false;
};

struct LmmOptions {
    double tolerance = 1e-8;
    int maxEvaluations = 4000;
};

/// Gaussian random-intercept mixed model fit by REML. Variance ratios are
/// profiled on the log scale with Nelder-Mead; beta and the residual
/// variance have closed forms at each evaluation.
LmmFit fitLmmReml(const DesignMatrices& design, const LmmOptions& options = {});

struct WaldRow {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;
    double t = 0.0;
    double p = 0.0;  // two-sided, normal approximation
};

std::vector<WaldRow> waldTests(const LmmFit& fit);

/// Exact Gaussian marginal log-likelihood of y at the given parameters.
/// sigma2Group aligns with design.randomBlocks.
double mlLogLik(const DesignMatrices& design, const std::vector<double>& sigma2Group,
                double sigma2Residual, const Eigen::VectorXd& beta);

}  // namespace durkit::stats
