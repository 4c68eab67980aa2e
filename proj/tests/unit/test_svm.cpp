#include <doctest.h>

#include <cmath>

#include "durkit/ml/forest.hpp"
#include "durkit/ml/preprocess.hpp"
#include "durkit/ml/svm.hpp"
#include "synth_data.hpp"

using namespace durkit;
using namespace durkit::ml;

namespace {

Dataset twoPoints() {
    Dataset d;
    d.nRows = 2;
    d.nCols = 1;
    d.featureNames = {"x"};
    d.classes = {"neg", "pos"};
    d.values = {-1.0, 1.0};
    d.labels = {0, 1};
    return d;
}

}  // namespace

TEST_CASE("two opposite points give the analytic max-margin solution") {
    auto d = twoPoints();
    SvmParams params;
    params.c = 1000.0;
    auto model = fitSvm(d, params, 42);
    // the machine for "pos" sees y = (-1, +1); optimum is w = 1, b = 0
    const auto& pos = model.machines[1];
    CHECK(pos.weights[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(pos.bias == doctest::Approx(0.0).epsilon(1e-3));
    auto pred = predictSvm(model, d);
    CHECK(pred == d.labels);
}

TEST_CASE("linear duality gap meets the relative tolerance") {
    auto d = testdata::twoGaussians(300, 3, 3.0, 17);
    auto scaled = applyScaler(fitScaler(d), d);
    SvmParams params;
    params.c = 1.0;
    auto model = fitSvm(scaled, params, 42);
    for (const auto& m : model.machines) {
        double wNorm = m.bias * m.bias;
        for (double w : m.weights) wNorm += w * w;
        // gap was checked against 1e-6 * (1 + |primal|) at convergence
        CHECK(m.dualityGap >= -1e-9);
        CHECK(m.dualityGap <= 1e-6 * (1.0 + 0.5 * wNorm + 300.0));
    }
}

TEST_CASE("duplicating every row leaves the separable boundary unchanged") {
    auto d = testdata::twoGaussians(80, 2, 8.0, 3);
    Dataset doubled = d;
    doubled.nRows = 2 * d.nRows;
    doubled.values.insert(doubled.values.end(), d.values.begin(), d.values.end());
    doubled.labels.insert(doubled.labels.end(), d.labels.begin(), d.labels.end());

    SvmParams params;
    params.c = 10.0;
    auto m1 = fitSvm(d, params, 7);
    auto m2 = fitSvm(doubled, params, 7);
    for (std::size_t c = 0; c < m1.machines.size(); ++c) {
        for (std::size_t f = 0; f < m1.machines[c].weights.size(); ++f)
            CHECK(m1.machines[c].weights[f] ==
                  doctest::Approx(m2.machines[c].weights[f]).epsilon(5e-3));
        CHECK(m1.machines[c].bias == doctest::Approx(m2.machines[c].bias).epsilon(5e-3));
    }
}

TEST_CASE("XOR defeats the linear kernel but not rbf") {
    auto d = testdata::xorPoints();
    SvmParams linear;
    linear.c = 10.0;
    auto linearModel = fitSvm(d, linear, 42);
    const double linearAcc = accuracyOf(d.labels, predictSvm(linearModel, d));
    CHECK(linearAcc <= 0.75);

    SvmParams rbf;
    rbf.kernel = SvmKernel::Rbf;
    rbf.gamma = 1.0;
    rbf.c = 10.0;
    auto rbfModel = fitSvm(d, rbf, 42);
    CHECK(accuracyOf(d.labels, predictSvm(rbfModel, d)) == doctest::Approx(1.0));
}

TEST_CASE("no linear separator beats 3/4 on XOR (brute force)") {
    auto d = testdata::xorPoints();
    double best = 0.0;
    for (double w1 = -2.0; w1 <= 2.0; w1 += 0.25)
        for (double w2 = -2.0; w2 <= 2.0; w2 += 0.25)
            for (double b = -2.0; b <= 2.0; b += 0.25) {
                int hits = 0;
                for (std::size_t r = 0; r < 4; ++r) {
                    const double v = w1 * d.at(r, 0) + w2 * d.at(r, 1) + b;
                    const int pred = v > 0 ? 1 : 0;
                    if (pred == d.labels[r]) ++hits;
                }
                best = std::max(best, hits / 4.0);
            }
    CHECK(best <= 0.75);
}

TEST_CASE("linear SVM separates two Gaussians at or above 0.95") {
    auto d = testdata::twoGaussians(500, 4, 4.0, 42);
    auto split = stratifiedSplit(d, 0.25, 42);
    auto train = d.selectRows(split.trainRows);
    auto scaler = fitScaler(train);
    auto test = d.selectRows(split.testRows);
    SvmParams params;
    auto model = fitSvm(applyScaler(scaler, train), params, 42);
    const double acc =
        accuracyOf(test.labels, predictSvm(model, applyScaler(scaler, test)));
    CHECK(acc >= 0.95);
}

TEST_CASE("standardization absorbs positive feature rescaling") {
    auto d = testdata::twoGaussians(200, 3, 3.0, 31);
    Dataset rescaled = d;
    const double scales[3] = {10.0, 0.01, 1000.0};
    for (std::size_t r = 0; r < d.nRows; ++r)
        for (std::size_t c = 0; c < 3; ++c) rescaled.at(r, c) = d.at(r, c) * scales[c];

    SvmParams params;
    auto m1 = fitSvm(applyScaler(fitScaler(d), d), params, 9);
    auto m2 = fitSvm(applyScaler(fitScaler(rescaled), rescaled), params, 9);
    auto p1 = predictSvm(m1, applyScaler(fitScaler(d), d));
    auto p2 = predictSvm(m2, applyScaler(fitScaler(rescaled), rescaled));
    CHECK(p1 == p2);
}

TEST_CASE("balanced class weights lift minority recall on skewed data") {
    Dataset d;
    d.nCols = 1;
    d.featureNames = {"x"};
    d.classes = {"big", "small"};
    Rng rng = Rng::seeded(15);
    for (int i = 0; i < 95; ++i) {
        d.values.push_back(rng.normal(0.0, 1.0));
        d.labels.push_back(0);
        ++d.nRows;
    }
    for (int i = 0; i < 5; ++i) {
        d.values.push_back(rng.normal(2.5, 0.5));
        d.labels.push_back(1);
        ++d.nRows;
    }
    SvmParams plain;
    plain.c = 0.05;
    SvmParams balanced = plain;
    balanced.balancedClassWeight = true;
    auto predPlain = predictSvm(fitSvm(d, plain, 2), d);
    auto predBalanced = predictSvm(fitSvm(d, balanced, 2), d);
    int recallPlain = 0, recallBalanced = 0;
    for (std::size_t r = 95; r < 100; ++r) {
        recallPlain += predPlain[r] == 1;
        recallBalanced += predBalanced[r] == 1;
    }
    CHECK(recallBalanced >= recallPlain);
    CHECK(recallBalanced >= 4);
}

TEST_CASE("rbf handles the noisy XOR clusters") {
    auto d = testdata::xorClusters(400, 0.25, 99);
    auto split = stratifiedSplit(d, 0.25, 99);
    auto train = d.selectRows(split.trainRows);
    auto test = d.selectRows(split.testRows);
    SvmParams params;
    params.kernel = SvmKernel::Rbf;
    params.gamma = 1.0;
    params.c = 10.0;
    auto model = fitSvm(train, params, 1);
    CHECK(accuracyOf(test.labels, predictSvm(model, test)) >= 0.9);
}
