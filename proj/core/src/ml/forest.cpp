#include "durkit/ml/forest.hpp"

#include <algorithm>
#include <numeric>

namespace durkit::ml {

ForestModel fitForest(const Dataset& data, const ForestParams& params, uint64_t seed,
                      int threads) {
    if (data.nRows == 0) fail("E_EMPTY", "cannot fit a forest on zero rows");
    if (params.nEstimators < 1) fail("E_INVALID_ARG", "n_estimators must be positive");

    ForestModel model;
    model.params = params;
    model.seed = seed;
    model.featureNames = data.featureNames;
    model.classes = data.classes;
    model.trees.resize(static_cast<std::size_t>(params.nEstimators));
    model.treeSeeds.resize(static_cast<std::size_t>(params.nEstimators));
    model.inBag.resize(static_cast<std::size_t>(params.nEstimators));

    Rng master = Rng::seeded(seed);
    for (int t = 0; t < params.nEstimators; ++t)
        model.treeSeeds[static_cast<std::size_t>(t)] =
            mixSeed(seed, static_cast<uint64_t>(t) + 1);

    parallelFor(static_cast<std::size_t>(params.nEstimators), threads, [&](std::size_t t) {
        Rng rng(model.treeSeeds[t]);
        std::vector<std::size_t> rows;
        std::vector<uint8_t> bag(data.nRows, 0);
        if (params.bootstrap) {
            rows.reserve(data.nRows);
            for (std::size_t i = 0; i < data.nRows; ++i) {
                const std::size_t pick = rng.uniformIndex(data.nRows);
                rows.push_back(pick);
                bag[pick] = 1;
            }
        } else {
            rows.resize(data.nRows);
            std::iota(rows.begin(), rows.end(), 0);
            std::fill(bag.begin(), bag.end(), 1);
        }
        model.trees[t] = fitTree(data, rows, params.tree, rng);
        model.inBag[t] = std::move(bag);
    });
    return model;
}

std::vector<int> predictForest(const ForestModel& model, const Dataset& data) {
    std::vector<int> out(data.nRows, 0);
    const std::size_t nClasses = model.classes.size();
    for (std::size_t r = 0; r < data.nRows; ++r) {
        std::vector<int> votes(nClasses, 0);
        for (const auto& tree : model.trees) votes[static_cast<std::size_t>(
            tree.predictClass(data.row(r)))]++;
        int best = 0;
        for (std::size_t c = 1; c < nClasses; ++c)
            if (votes[c] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
        out[r] = best;
    }
    return out;
}

double accuracyOf(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.empty() || truth.size() != predicted.size())
        fail("E_INVALID_ARG", "accuracy needs equal-length non-empty label vectors");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == predicted[i]) ++hit;
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::vector<double> featureImportances(const ForestModel& model, bool* degenerateFlag) {
    std::vector<double> totals(model.featureNames.size(), 0.0);
    for (const auto& tree : model.trees) accumulateImpurityDecrease(tree, totals);
    double sum = 0.0;
    for (double v : totals) sum += v;
    if (degenerateFlag) *degenerateFlag = sum <= 0.0;
    if (sum <= 0.0) return totals;  // all-leaf forest, zeros with the flag
    for (double& v : totals) v /= sum;
    return totals;
}

double oobError(const ForestModel& model, const Dataset& train) {
    std::size_t counted = 0, wrong = 0;
    const std::size_t nClasses = model.classes.size();
    for (std::size_t r = 0; r < train.nRows; ++r) {
        std::vector<int> votes(nClasses, 0);
        bool any = false;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            if (model.inBag[t][r]) continue;
            votes[static_cast<std::size_t>(model.trees[t].predictClass(train.row(r)))]++;
            any = true;
        }
        if (!any) continue;
        int best = 0;
        for (std::size_t c = 1; c < nClasses; ++c)
            if (votes[c] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
        ++counted;
        if (best != train.labels[r]) ++wrong;
    }
    if (counted == 0) fail("E_DEGENERATE", "no out-of-bag rows to score");
    return static_cast<double>(wrong) / static_cast<double>(counted);
}

}  // namespace durkit::ml
