#include "durkit/ml/smote.hpp"

#include <algorithm>
#include <cmath>

#include "durkit/common.hpp"

namespace durkit::ml {

namespace {

double squaredDistance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::map<std::string, std::size_t> balancedTargets(const Dataset& data) {
    const auto counts = data.classCounts();
    const std::size_t majority = *std::max_element(counts.begin(), counts.end());
    std::map<std::string, std::size_t> targets;
    for (std::size_t c = 0; c < data.classes.size(); ++c)
        targets[data.classes[c]] = majority;
    return targets;
}

Dataset smote(const Dataset& data, int kNeighbors,
              const std::map<std::string, std::size_t>& targetCounts, uint64_t seed,
              SmoteReport* report) {
    if (kNeighbors < 1) fail("E_INVALID_ARG", "k_neighbors must be positive");
    if (data.labels.size() != data.nRows)
        fail("E_INVALID_ARG", "smote needs a labeled dataset");
    SmoteReport local;
    SmoteReport& rep = report ? *report : local;
    rep = SmoteReport{};

    Dataset out = data;
    Rng master = Rng::seeded(seed);

    std::vector<std::vector<std::size_t>> byClass(data.classes.size());
    for (std::size_t r = 0; r < data.nRows; ++r)
        byClass[static_cast<std::size_t>(data.labels[r])].push_back(r);

    for (std::size_t c = 0; c < data.classes.size(); ++c) {
        const auto& rows = byClass[c];
        auto it = targetCounts.find(data.classes[c]);
        if (it == targetCounts.end() || it->second <= rows.size()) continue;
        const std::size_t need = it->second - rows.size();
        if (rows.size() < 2)
            fail("E_DEGENERATE", "class '" + data.classes[c] +
                                     "' has a single member, no neighbor to interpolate");

        int k = kNeighbors;
        if (rows.size() <= static_cast<std::size_t>(k)) {
            k = static_cast<int>(rows.size()) - 1;
            rep.reducedK[data.classes[c]] = k;
        }

        // k nearest same-class neighbors per member, ties by row order
        std::vector<std::vector<std::size_t>> neighbors(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::vector<std::pair<double, std::size_t>> dist;
            dist.reserve(rows.size() - 1);
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (j == i) continue;
                dist.push_back({squaredDistance(data.row(rows[i]), data.row(rows[j]),
                                                data.nCols),
                                rows[j]});
            }
            std::stable_sort(dist.begin(), dist.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (int t = 0; t < k; ++t) neighbors[i].push_back(dist[t].second);
        }

        Rng rng = master.fork(c);
        for (std::size_t s = 0; s < need; ++s) {
            const std::size_t i = rng.uniformIndex(rows.size());
            const std::size_t nn = neighbors[i][rng.uniformIndex(neighbors[i].size())];
            const double u = rng.uniform();
            const double* base = data.row(rows[i]);
            const double* other = data.row(nn);
            for (std::size_t col = 0; col < data.nCols; ++col)
                out.values.push_back(base[col] + u * (other[col] - base[col]));
            out.labels.push_back(static_cast<int>(c));
            ++out.nRows;
            ++rep.syntheticRows;
        }
    }
    return out;
}

}  // namespace durkit::ml
