#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "durkit/ml/dataset.hpp"

namespace durkit::ml {

struct SplitIndices {
    std::vector<std::size_t> trainRows;
    std::vector<std::size_t> testRows;
    uint64_t seed = 0;
};

/// Stratified train/test partition: per-class test counts are assigned by
/// largest remainder, so each class's test fraction is within one row of
/// the global fraction. Deterministic for a fixed seed.
SplitIndices stratifiedSplit(const Dataset& data, double testFraction, uint64_t seed);

struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> std;            // population standard deviation
    std::vector<uint8_t> constantFlag;  // std == 0, column passes through
};

/// Train-set statistics. Transformed train columns have mean 0 and
/// population std 1; constant columns are flagged and left unchanged.
ScalerParams fitScaler(const Dataset& train);
Dataset applyScaler(const ScalerParams& params, const Dataset& data);

constexpr double kInfiniteF = std::numeric_limits<double>::infinity();

/// One-way ANOVA F statistic per feature:
///     F = (SSB / (g - 1)) / (SSW / (n - g))
/// Zero within-class variance with distinct class means gives the +inf
/// sentinel, which sorts first in selection.
std::vector<double> anovaFScores(const Dataset& data);

/// Indices of the k best-scoring features, returned in original feature
/// order; ties also resolve by original order.
std::vector<std::size_t> selectKBest(const std::vector<double>& scores, std::size_t k);

}  // namespace durkit::ml
