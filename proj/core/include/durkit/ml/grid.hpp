#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "durkit/ml/forest.hpp"
#include "durkit/ml/svm.hpp"

namespace durkit::ml {

enum class ModelFamily { RandomForest, SupportVector };

ModelFamily modelFamilyFromName(const std::string& name);

/// Ordered hyperparameter axes; the Cartesian product enumerates with the
/// first axis outermost, which fixes the tie-breaking order.
struct GridSpec {
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;

    static GridSpec forestDefault();
    static GridSpec svmDefault();
};

using GridConfig = std::map<std::string, std::string>;

std::vector<GridConfig> enumerateGrid(const GridSpec& grid);

ForestParams forestParamsFrom(const GridConfig& config);
SvmParams svmParamsFrom(const GridConfig& config, const Dataset& data);

struct GridSearchResult {
    std::vector<GridConfig> configs;
    std::vector<double> meanScores;
    std::vector<std::vector<double>> foldScores;
    std::size_t bestIndex = 0;
    std::size_t totalFits = 0;
};

/// Exhaustive stratified k-fold search scored by mean validation accuracy.
/// Ties keep the earliest config in enumeration order. A class smaller
/// than the fold count is rejected with a hint to lower the fold count.
GridSearchResult gridSearchCv(const Dataset& data, ModelFamily family,
                              const GridSpec& grid, int folds, uint64_t seed,
                              int threads = 1);

/// Stratified fold ids (0..folds-1) per row, deterministic per seed.
std::vector<int> stratifiedFolds(const Dataset& data, int folds, uint64_t seed);

}  // namespace durkit::ml
