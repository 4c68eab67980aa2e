#pragma once

#include <string>
#include <vector>

namespace durkit::stats {

struct ModelSummary {
    std::string name;
    double df = 0.0;
    double logLik = 0.0;
    double aic = 0.0;
    std::size_t nRows = 0;
};

double aicOf(double df, double logLik);

struct ComparisonRow {
    std::string name;
    double df = 0.0;
    double aic = 0.0;
    double deltaAic = 0.0;   // against the best model
    bool similarSupport = false;  // deltaAic < 2
};

/// Ascending AIC ranking. Fits on different row sets are not comparable
/// and are rejected.
std::vector<ComparisonRow> compareModels(const std::vector<ModelSummary>& fits);

}  // namespace durkit::stats
