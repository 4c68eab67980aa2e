#pragma once

#include <string>
#include <vector>

#include "durkit/common.hpp"
#include "durkit/ml/dataset.hpp"

namespace testdata {

/// Two well-separated Gaussian blobs in `dim` dimensions.
inline durkit::ml::Dataset twoGaussians(std::size_t n, std::size_t dim, double separation,
                                        uint64_t seed) {
    durkit::ml::Dataset d;
    d.nRows = n;
    d.nCols = dim;
    d.classes = {"neg", "pos"};
    for (std::size_t c = 0; c < dim; ++c) d.featureNames.push_back("f" + std::to_string(c));
    durkit::Rng rng = durkit::Rng::seeded(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 0 : 1;
        const double center = label == 0 ? 0.0 : separation;
        for (std::size_t c = 0; c < dim; ++c) d.values.push_back(rng.normal(center, 1.0));
        d.labels.push_back(label);
    }
    return d;
}

/// Four noisy clusters at the XOR corners.
inline durkit::ml::Dataset xorClusters(std::size_t n, double noise, uint64_t seed) {
    durkit::ml::Dataset d;
    d.nRows = n;
    d.nCols = 2;
    d.featureNames = {"x1", "x2"};
    d.classes = {"a", "b"};
    durkit::Rng rng = durkit::Rng::seeded(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int corner = static_cast<int>(i % 4);
        const double cx = (corner & 1) ? 1.0 : 0.0;
        const double cy = (corner & 2) ? 1.0 : 0.0;
        d.values.push_back(cx + rng.normal(0.0, noise));
        d.values.push_back(cy + rng.normal(0.0, noise));
        d.labels.push_back(cx == cy ? 0 : 1);
    }
    return d;
}

/// The bare 4-point XOR truth table.
inline durkit::ml::Dataset xorPoints() {
    durkit::ml::Dataset d;
    d.nRows = 4;
    d.nCols = 2;
    d.featureNames = {"x1", "x2"};
    d.classes = {"a", "b"};
    d.values = {0, 0, 1, 1, 0, 1, 1, 0};
    d.labels = {0, 0, 1, 1};
    return d;
}

/// Imbalanced multi-class blobs with mismatched feature scales and two
/// pure-noise columns, built to reward scaling, selection, and SMOTE.
inline durkit::ml::Dataset imbalancedBlobs(std::size_t n, uint64_t seed) {
    durkit::ml::Dataset d;
    d.nCols = 6;
    d.featureNames = {"f0", "f1", "f2", "f3", "noise0", "noise1"};
    d.classes = {"c1", "c2", "c3", "c4", "c5"};
    const double share[5] = {0.44, 0.28, 0.15, 0.08, 0.05};
    const double centers[5][4] = {{0, 0, 0, 0},
                                  {2.2, 0, 0, 1.1},
                                  {0, 2.2, 1.1, 0},
                                  {2.2, 2.2, 0, 0},
                                  {1.1, 1.1, 2.2, 2.2}};
    const double scale[6] = {1.0, 10.0, 100.0, 0.01, 1.0, 1.0};
    durkit::Rng rng = durkit::Rng::seeded(seed);
    for (int cls = 0; cls < 5; ++cls) {
        const std::size_t count = static_cast<std::size_t>(share[cls] * static_cast<double>(n));
        for (std::size_t i = 0; i < count; ++i) {
            for (int f = 0; f < 4; ++f)
                d.values.push_back((centers[cls][f] + rng.normal(0.0, 0.85)) * scale[f]);
            d.values.push_back(rng.normal(0.0, 1.0));
            d.values.push_back(rng.normal(0.0, 1.0));
            d.labels.push_back(cls);
            ++d.nRows;
        }
    }
    return d;
}

}  // namespace testdata
