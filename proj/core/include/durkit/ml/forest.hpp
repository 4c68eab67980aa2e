#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "durkit/ml/tree.hpp"

namespace durkit::ml {

struct ForestParams {
    int nEstimators = 100;
    TreeParams tree{.maxDepth = 0,
                    .minSamplesSplit = 2,
                    .minSamplesLeaf = 1,
                    .featureSubsetSize = -1};  // ceil(sqrt(p)) per node
    bool bootstrap = true;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::vector<uint64_t> treeSeeds;
    std::vector<std::vector<uint8_t>> inBag;  // per tree, per training row
    std::vector<std::string> featureNames;
    std::vector<std::string> classes;
    ForestParams params;
    uint64_t seed = 0;
};

/// Bags one tree per estimator; tree fits are schedule-independent because
/// every tree owns a generator forked from (seed, tree index).
ForestModel fitForest(const Dataset& data, const ForestParams& params, uint64_t seed,
                      int threads = 1);

/// Majority vote; ties go to the lexicographically smallest class label.
std::vector<int> predictForest(const ForestModel& model, const Dataset& data);

double accuracyOf(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Mean-decrease-in-impurity importances, normalized to sum 1. A forest
/// with no splits at all returns zeros and sets the flag.
std::vector<double> featureImportances(const ForestModel& model, bool* degenerateFlag = nullptr);

/// Out-of-bag error over the training set (rows that were in every bag are
/// skipped).
double oobError(const ForestModel& model, const Dataset& train);

}  // namespace durkit::ml
