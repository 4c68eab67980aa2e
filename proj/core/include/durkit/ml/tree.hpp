#pragma once

#include <cstdint>
#include <vector>

#include "durkit/common.hpp"
#include "durkit/ml/dataset.hpp"

namespace durkit::ml {

struct TreeParams {
    int maxDepth = 0;          // 0 = unlimited
    int minSamplesSplit = 2;
    int minSamplesLeaf = 1;
    /// Features drawn at each node; 0 means all, -1 means ceil(sqrt(p)).
    int featureSubsetSize = 0;
};

/// CART node. Leaves keep the class-count vector; internal nodes route
/// rows with value <= threshold to the left child.
struct TreeNode {
    int feature = -1;           // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::size_t> classCounts;
    double impurity = 0.0;      // Gini at this node
    std::size_t nSamples = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t nFeatures = 0;
    std::size_t nClasses = 0;

    int predictClass(const double* row) const;
    const TreeNode& leafFor(const double* row) const;
};

double giniImpurity(const std::vector<std::size_t>& counts);

/// Greedy CART growth minimizing weighted Gini impurity. When a feature
/// subset is configured, each node draws its candidates from rng. Splits
/// that do not increase impurity are still taken while the node is mixed,
/// so depth-limited trees match the usual library behavior.
DecisionTree fitTree(const Dataset& data, const std::vector<std::size_t>& rows,
                     const TreeParams& params, Rng& rng);

DecisionTree fitTree(const Dataset& data, const TreeParams& params, uint64_t seed);

std::vector<int> predictTree(const DecisionTree& tree, const Dataset& data);

/// Summed impurity decrease per feature over all splits, unnormalized.
void accumulateImpurityDecrease(const DecisionTree& tree, std::vector<double>& into);

}  // namespace durkit::ml
