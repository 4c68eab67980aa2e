#include "durkit/ml/grid.hpp"

#include <algorithm>
#include <numeric>

#include "durkit/common.hpp"

namespace durkit::ml {

ModelFamily modelFamilyFromName(const std::string& name) {
    const std::string n = toLower(name);
    if (n == "rf" || n == "forest" || n == "random_forest") return ModelFamily::RandomForest;
    if (n == "svm" || n == "svc") return ModelFamily::SupportVector;
    fail("E_INVALID_ARG", "unknown model family '" + name + "' (expected rf or svm)");
}

GridSpec GridSpec::forestDefault() {
    GridSpec g;
    g.axes = {{"n_estimators", {"100", "200", "300"}},
              {"max_depth", {"none", "10", "20", "30"}},
              {"min_samples_split", {"2", "5", "10"}},
              {"min_samples_leaf", {"1", "2", "4"}}};
    return g;
}

GridSpec GridSpec::svmDefault() {
    GridSpec g;
    g.axes = {{"C", {"0.1", "1", "10", "100"}},
              {"kernel", {"linear", "rbf"}},
              {"gamma", {"scale", "auto", "0.1", "1"}},
              {"class_weight", {"none", "balanced"}}};
    return g;
}

std::vector<GridConfig> enumerateGrid(const GridSpec& grid) {
    if (grid.axes.empty()) fail("E_INVALID_ARG", "empty hyperparameter grid");
    std::vector<GridConfig> configs;
    std::vector<std::size_t> idx(grid.axes.size(), 0);
    while (true) {
        GridConfig c;
        for (std::size_t a = 0; a < grid.axes.size(); ++a)
            c[grid.axes[a].first] = grid.axes[a].second[idx[a]];
        configs.push_back(std::move(c));
        // odometer increment, last axis fastest
        std::size_t a = grid.axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < grid.axes[a].second.size()) break;
            idx[a] = 0;
            if (a == 0) return configs;
        }
    }
}

namespace {

double numberOf(const GridConfig& c, const std::string& key, double fallback) {
    auto it = c.find(key);
    if (it == c.end()) return fallback;
    double v = 0.0;
    if (!tryParseDouble(it->second, v))
        fail("E_INVALID_ARG", "grid value '" + it->second + "' for " + key +
                                  " is not numeric");
    return v;
}

}  // namespace

ForestParams forestParamsFrom(const GridConfig& config) {
    ForestParams p;
    p.nEstimators = static_cast<int>(numberOf(config, "n_estimators", 100));
    auto depth = config.find("max_depth");
    if (depth != config.end()) {
        if (toLower(depth->second) == "none")
            p.tree.maxDepth = 0;
        else
            p.tree.maxDepth = static_cast<int>(numberOf(config, "max_depth", 0));
    }
    p.tree.minSamplesSplit = static_cast<int>(numberOf(config, "min_samples_split", 2));
    p.tree.minSamplesLeaf = static_cast<int>(numberOf(config, "min_samples_leaf", 1));
    return p;
}

SvmParams svmParamsFrom(const GridConfig& config, const Dataset& data) {
    SvmParams p;
    p.c = numberOf(config, "C", 1.0);
    auto kernel = config.find("kernel");
    if (kernel != config.end()) {
        const std::string k = toLower(kernel->second);
        if (k == "linear") {
            p.kernel = SvmKernel::Linear;
        } else if (k == "rbf") {
            p.kernel = SvmKernel::Rbf;
        } else if (k == "poly") {
            fail("E_UNSUPPORTED", "polynomial kernel is not supported; use linear or rbf");
        } else {
            fail("E_INVALID_ARG", "unknown SVM kernel '" + kernel->second + "'");
        }
    }
    auto gamma = config.find("gamma");
    if (gamma != config.end()) {
        const std::string g = toLower(gamma->second);
        if (g == "scale")
            p.gamma = gammaScale(data);
        else if (g == "auto")
            p.gamma = gammaAuto(data);
        else
            p.gamma = numberOf(config, "gamma", 1.0);
    }
    auto weight = config.find("class_weight");
    if (weight != config.end()) {
        const std::string w = toLower(weight->second);
        if (w == "balanced")
            p.balancedClassWeight = true;
        else if (w == "none")
            p.balancedClassWeight = false;
        else
            fail("E_INVALID_ARG", "unknown class_weight '" + weight->second + "'");
    }
    return p;
}

std::vector<int> stratifiedFolds(const Dataset& data, int folds, uint64_t seed) {
    if (folds < 2) fail("E_INVALID_ARG", "need at least 2 folds");
    const auto counts = data.classCounts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < static_cast<std::size_t>(folds))
            fail("E_DEGENERATE", "class '" + data.classes[c] + "' has " +
                                     std::to_string(counts[c]) +
                                     " rows; use fewer folds than the smallest class");
    }
    std::vector<int> fold(data.nRows, 0);
    Rng master = Rng::seeded(seed);
    std::vector<std::vector<std::size_t>> byClass(data.classes.size());
    for (std::size_t r = 0; r < data.nRows; ++r)
        byClass[static_cast<std::size_t>(data.labels[r])].push_back(r);
    for (std::size_t c = 0; c < byClass.size(); ++c) {
        Rng rng = master.fork(c);
        auto rows = byClass[c];
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            fold[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return fold;
}

GridSearchResult gridSearchCv(const Dataset& data, ModelFamily family,
                              const GridSpec& grid, int folds, uint64_t seed,
                              int threads) {
    GridSearchResult result;
    result.configs = enumerateGrid(grid);

    // reject unsupported kernels before any training starts
    if (family == ModelFamily::SupportVector)
        for (const auto& c : result.configs) svmParamsFrom(c, data);

    const std::vector<int> foldOf = stratifiedFolds(data, folds, seed);
    std::vector<std::vector<std::size_t>> trainRows(static_cast<std::size_t>(folds));
    std::vector<std::vector<std::size_t>> testRows(static_cast<std::size_t>(folds));
    for (std::size_t r = 0; r < data.nRows; ++r) {
        for (int f = 0; f < folds; ++f)
            (foldOf[r] == f ? testRows : trainRows)[static_cast<std::size_t>(f)]
                .push_back(r);
    }

    const std::size_t nTasks = result.configs.size() * static_cast<std::size_t>(folds);
    result.foldScores.assign(result.configs.size(),
                             std::vector<double>(static_cast<std::size_t>(folds), 0.0));
    parallelFor(nTasks, threads, [&](std::size_t task) {
        const std::size_t configIdx = task / static_cast<std::size_t>(folds);
        const std::size_t fold = task % static_cast<std::size_t>(folds);
        const uint64_t fitSeed = mixSeed(seed, task + 1);
        Dataset train = data.selectRows(trainRows[fold]);
        Dataset test = data.selectRows(testRows[fold]);
        std::vector<int> predicted;
        if (family == ModelFamily::RandomForest) {
            const ForestParams params = forestParamsFrom(result.configs[configIdx]);
            const ForestModel model = fitForest(train, params, fitSeed, 1);
            predicted = predictForest(model, test);
        } else {
            const SvmParams params = svmParamsFrom(result.configs[configIdx], train);
            const SvmModel model = fitSvm(train, params, fitSeed, 1);
            predicted = predictSvm(model, test);
        }
        result.foldScores[configIdx][fold] = accuracyOf(test.labels, predicted);
    });
    result.totalFits = nTasks;

    result.meanScores.resize(result.configs.size());
    for (std::size_t c = 0; c < result.configs.size(); ++c)
        result.meanScores[c] = meanOf(result.foldScores[c]);
    result.bestIndex = 0;
    for (std::size_t c = 1; c < result.configs.size(); ++c)
        if (result.meanScores[c] > result.meanScores[result.bestIndex] + 1e-15)
            result.bestIndex = c;
    return result;
}

}  // namespace durkit::ml
