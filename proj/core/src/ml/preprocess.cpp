#include "durkit/ml/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "durkit/common.hpp"

namespace durkit::ml {

SplitIndices stratifiedSplit(const Dataset& data, double testFraction, uint64_t seed) {
    if (!(testFraction > 0.0 && testFraction < 1.0))
        fail("E_INVALID_ARG", "test fraction must lie strictly between 0 and 1");
    if (data.labels.size() != data.nRows)
        fail("E_INVALID_ARG", "stratified split needs a labeled dataset");

    std::vector<std::vector<std::size_t>> byClass(data.classes.size());
    for (std::size_t r = 0; r < data.nRows; ++r)
        byClass[static_cast<std::size_t>(data.labels[r])].push_back(r);
    for (std::size_t c = 0; c < byClass.size(); ++c) {
        if (byClass[c].size() < 2)
            fail("E_DEGENERATE",
                 "class '" + data.classes[c] + "' has fewer than 2 rows");
    }

    // largest-remainder apportionment of the total test count
    const std::size_t totalTest = static_cast<std::size_t>(
        std::llround(static_cast<double>(data.nRows) * testFraction));
    std::vector<std::size_t> take(byClass.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < byClass.size(); ++c) {
        const double exact = static_cast<double>(byClass[c].size()) * testFraction;
        take[c] = static_cast<std::size_t>(std::floor(exact + 1e-12));
        assigned += take[c];
        remainders.push_back({exact - static_cast<double>(take[c]), c});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < totalTest && i < remainders.size(); ++i) {
        const std::size_t c = remainders[i].second;
        if (take[c] + 1 <= byClass[c].size() - 1) {  // keep one train row per class
            ++take[c];
            ++assigned;
        }
    }

    SplitIndices split;
    split.seed = seed;
    Rng rng = Rng::seeded(seed);
    for (std::size_t c = 0; c < byClass.size(); ++c) {
        Rng classRng = rng.fork(c);
        auto rows = byClass[c];
        classRng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            (i < take[c] ? split.testRows : split.trainRows).push_back(rows[i]);
    }
    std::sort(split.trainRows.begin(), split.trainRows.end());
    std::sort(split.testRows.begin(), split.testRows.end());
    return split;
}

ScalerParams fitScaler(const Dataset& train) {
    if (train.nRows < 2) fail("E_INVALID_ARG", "scaler needs at least 2 rows");
    ScalerParams p;
    p.mean.resize(train.nCols);
    p.std.resize(train.nCols);
    p.constantFlag.assign(train.nCols, 0);
    for (std::size_t c = 0; c < train.nCols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < train.nRows; ++r) sum += train.at(r, c);
        const double mean = sum / static_cast<double>(train.nRows);
        double ss = 0.0;
        for (std::size_t r = 0; r < train.nRows; ++r) {
            const double d = train.at(r, c) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(train.nRows));
        p.mean[c] = mean;
        p.std[c] = sd;
        if (sd == 0.0) p.constantFlag[c] = 1;
    }
    return p;
}

Dataset applyScaler(const ScalerParams& params, const Dataset& data) {
    if (params.mean.size() != data.nCols)
        fail("E_INVALID_ARG", "scaler was fit on a different column count");
    Dataset out = data;
    for (std::size_t c = 0; c < data.nCols; ++c) {
        if (params.constantFlag[c]) continue;
        for (std::size_t r = 0; r < data.nRows; ++r)
            out.at(r, c) = (data.at(r, c) - params.mean[c]) / params.std[c];
    }
    return out;
}

std::vector<double> anovaFScores(const Dataset& data) {
    if (data.classes.size() < 2)
        fail("E_INVALID_ARG", "ANOVA F needs at least 2 classes");
    const auto counts = data.classCounts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0)
            fail("E_INVALID_ARG", "class '" + data.classes[c] + "' has no rows");
    const double n = static_cast<double>(data.nRows);
    const double g = static_cast<double>(data.classes.size());
    if (data.nRows <= data.classes.size())
        fail("E_INVALID_ARG", "ANOVA F needs n > number of classes");

    std::vector<double> scores(data.nCols);
    for (std::size_t c = 0; c < data.nCols; ++c) {
        double grand = 0.0;
        std::vector<double> classSum(data.classes.size(), 0.0);
        for (std::size_t r = 0; r < data.nRows; ++r) {
            grand += data.at(r, c);
            classSum[static_cast<std::size_t>(data.labels[r])] += data.at(r, c);
        }
        grand /= n;
        double ssb = 0.0;
        std::vector<double> classMean(data.classes.size());
        for (std::size_t k = 0; k < classMean.size(); ++k) {
            classMean[k] = classSum[k] / static_cast<double>(counts[k]);
            const double d = classMean[k] - grand;
            ssb += static_cast<double>(counts[k]) * d * d;
        }
        double ssw = 0.0;
        for (std::size_t r = 0; r < data.nRows; ++r) {
            const double d =
                data.at(r, c) - classMean[static_cast<std::size_t>(data.labels[r])];
            ssw += d * d;
        }
        if (ssw <= 0.0) {
            scores[c] = ssb > 0.0 ? kInfiniteF : 0.0;
        } else {
            scores[c] = (ssb / (g - 1.0)) / (ssw / (n - g));
        }
    }
    return scores;
}

std::vector<std::size_t> selectKBest(const std::vector<double>& scores, std::size_t k) {
    if (k > scores.size())
        fail("E_INVALID_ARG", "cannot select " + std::to_string(k) + " of " +
                                  std::to_string(scores.size()) + " features");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];  // stable keeps original order on ties
    });
    std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<long>(k));
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace durkit::ml
