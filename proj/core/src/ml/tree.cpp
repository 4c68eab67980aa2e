#include "durkit/ml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace durkit::ml {

double giniImpurity(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    if (total == 0) return 0.0;
    double sumSq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sumSq += p * p;
    }
    return 1.0 - sumSq;
}

int DecisionTree::predictClass(const double* row) const {
    const TreeNode& leaf = leafFor(row);
    int best = 0;
    for (std::size_t c = 1; c < leaf.classCounts.size(); ++c)
        if (leaf.classCounts[c] > leaf.classCounts[static_cast<std::size_t>(best)])
            best = static_cast<int>(c);
    return best;  // ties resolve to the smallest class id
}

const TreeNode& DecisionTree::leafFor(const double* row) const {
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
        idx = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(idx)];
}

namespace {

struct Builder {
    const Dataset& data;
    const TreeParams& params;
    Rng& rng;
    DecisionTree& tree;
    int subsetSize;

    std::vector<std::size_t> countsOf(const std::vector<std::size_t>& rows) const {
        std::vector<std::size_t> counts(data.classes.size(), 0);
        for (std::size_t r : rows) counts[static_cast<std::size_t>(data.labels[r])]++;
        return counts;
    }

    std::vector<std::size_t> drawFeatures() {
        std::vector<std::size_t> all(data.nCols);
        std::iota(all.begin(), all.end(), 0);
        if (subsetSize <= 0 || subsetSize >= static_cast<int>(data.nCols)) return all;
        // partial Fisher-Yates keeps the draw order deterministic
        for (int i = 0; i < subsetSize; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) + rng.uniformIndex(all.size() - i);
            std::swap(all[static_cast<std::size_t>(i)], all[j]);
        }
        all.resize(static_cast<std::size_t>(subsetSize));
        return all;
    }

    int build(std::vector<std::size_t>& rows, int depth) {
        const int nodeIdx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        {
            TreeNode& node = tree.nodes.back();
            node.classCounts = countsOf(rows);
            node.impurity = giniImpurity(node.classCounts);
            node.nSamples = rows.size();
        }
        const double parentImpurity = tree.nodes[nodeIdx].impurity;

        const bool pure = parentImpurity == 0.0;
        const bool depthStop = params.maxDepth > 0 && depth >= params.maxDepth;
        const bool sizeStop =
            rows.size() < static_cast<std::size_t>(params.minSamplesSplit);
        if (pure || depthStop || sizeStop || rows.size() < 2) return nodeIdx;

        // best split over the drawn feature subset
        int bestFeature = -1;
        double bestThreshold = 0.0;
        double bestWeighted = parentImpurity;
        bool found = false;
        const auto features = drawFeatures();

        std::vector<std::pair<double, int>> column(rows.size());
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < rows.size(); ++i)
                column[i] = {data.at(rows[i], f), data.labels[rows[i]]};
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;

            std::vector<std::size_t> leftCounts(data.classes.size(), 0);
            std::vector<std::size_t> rightCounts = countsOf(rows);
            const double total = static_cast<double>(rows.size());
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                leftCounts[static_cast<std::size_t>(column[i].second)]++;
                rightCounts[static_cast<std::size_t>(column[i].second)]--;
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t nL = i + 1;
                const std::size_t nR = column.size() - nL;
                if (nL < static_cast<std::size_t>(params.minSamplesLeaf) ||
                    nR < static_cast<std::size_t>(params.minSamplesLeaf))
                    continue;
                const double weighted =
                    (static_cast<double>(nL) * giniImpurity(leftCounts) +
                     static_cast<double>(nR) * giniImpurity(rightCounts)) /
                    total;
                if (!found || weighted < bestWeighted - 1e-15) {
                    found = true;
                    bestWeighted = weighted;
                    bestFeature = static_cast<int>(f);
                    bestThreshold = 0.5 * (column[i].first + column[i + 1].first);
                }
            }
        }
        if (!found || bestWeighted > parentImpurity + 1e-15) return nodeIdx;

        std::vector<std::size_t> leftRows, rightRows;
        for (std::size_t r : rows) {
            (data.at(r, static_cast<std::size_t>(bestFeature)) <= bestThreshold
                 ? leftRows
                 : rightRows)
                .push_back(r);
        }
        if (leftRows.empty() || rightRows.empty()) return nodeIdx;

        rows.clear();
        rows.shrink_to_fit();
        const int left = build(leftRows, depth + 1);
        const int right = build(rightRows, depth + 1);
        tree.nodes[static_cast<std::size_t>(nodeIdx)].feature = bestFeature;
        tree.nodes[static_cast<std::size_t>(nodeIdx)].threshold = bestThreshold;
        tree.nodes[static_cast<std::size_t>(nodeIdx)].left = left;
        tree.nodes[static_cast<std::size_t>(nodeIdx)].right = right;
        return nodeIdx;
    }
};

}  // namespace

DecisionTree fitTree(const Dataset& data, const std::vector<std::size_t>& rows,
                     const TreeParams& params, Rng& rng) {
    if (rows.empty()) fail("E_EMPTY", "cannot fit a tree on zero rows");
    DecisionTree tree;
    tree.nFeatures = data.nCols;
    tree.nClasses = data.classes.size();
    int subset = params.featureSubsetSize;
    if (subset < 0)
        subset = static_cast<int>(
            std::ceil(std::sqrt(static_cast<double>(data.nCols))));
    Builder builder{data, params, rng, tree, subset};
    std::vector<std::size_t> mutableRows = rows;
    builder.build(mutableRows, 0);
    return tree;
}

DecisionTree fitTree(const Dataset& data, const TreeParams& params, uint64_t seed) {
    std::vector<std::size_t> rows(data.nRows);
    std::iota(rows.begin(), rows.end(), 0);
    Rng rng = Rng::seeded(seed);
    return fitTree(data, rows, params, rng);
}

std::vector<int> predictTree(const DecisionTree& tree, const Dataset& data) {
    std::vector<int> out(data.nRows);
    for (std::size_t r = 0; r < data.nRows; ++r)
        out[r] = tree.predictClass(data.row(r));
    return out;
}

void accumulateImpurityDecrease(const DecisionTree& tree, std::vector<double>& into) {
    for (const auto& node : tree.nodes) {
        if (node.feature < 0) continue;
        const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
        const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
        const double decrease =
            static_cast<double>(node.nSamples) * node.impurity -
            static_cast<double>(l.nSamples) * l.impurity -
            static_cast<double>(r.nSamples) * r.impurity;
        into[static_cast<std::size_t>(node.feature)] += decrease;
    }
}

}  // namespace durkit::ml
