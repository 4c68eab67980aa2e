#include <doctest.h>

#include "durkit/ml/grid.hpp"
#include "durkit/ml/metrics.hpp"
#include "synth_data.hpp"

using namespace durkit;
using namespace durkit::ml;

TEST_CASE("a 2x2 grid with 5 folds runs 20 fits") {
    auto d = testdata::twoGaussians(100, 2, 4.0, 8);
    GridSpec grid;
    grid.axes = {{"n_estimators", {"5", "10"}}, {"max_depth", {"2", "4"}}};
    auto result = gridSearchCv(d, ModelFamily::RandomForest, grid, 5, 42);
    CHECK(result.totalFits == 20);
    CHECK(result.configs.size() == 4);
}

TEST_CASE("a single-config grid returns that config") {
    auto d = testdata::twoGaussians(60, 2, 4.0, 8);
    GridSpec grid;
    grid.axes = {{"n_estimators", {"7"}}};
    auto result = gridSearchCv(d, ModelFamily::RandomForest, grid, 3, 1);
    CHECK(result.bestIndex == 0);
    CHECK(result.configs[0].at("n_estimators") == "7");
}

TEST_CASE("unlimited depth beats stumps on XOR-like data") {
    auto d = testdata::xorClusters(240, 0.2, 55);
    GridSpec grid;
    grid.axes = {{"max_depth", {"1", "none"}}, {"n_estimators", {"30"}}};
    auto result = gridSearchCv(d, ModelFamily::RandomForest, grid, 5, 7);
    CHECK(result.configs[result.bestIndex].at("max_depth") == "none");
    CHECK(result.meanScores[1] > result.meanScores[0]);
}

TEST_CASE("grids requesting the polynomial kernel are rejected up front") {
    auto d = testdata::twoGaussians(40, 2, 4.0, 8);
    GridSpec grid;
    grid.axes = {{"kernel", {"linear", "poly"}}, {"C", {"1"}}};
    CHECK_THROWS_WITH_AS(gridSearchCv(d, ModelFamily::SupportVector, grid, 2, 1),
                         doctest::Contains("polynomial"), Error);
}

TEST_CASE("a fold losing a class is rejected with a hint") {
    auto d = testdata::twoGaussians(9, 2, 4.0, 8);  // 4 or 5 rows per class
    GridSpec grid;
    grid.axes = {{"n_estimators", {"3"}}};
    CHECK_THROWS_WITH_AS(gridSearchCv(d, ModelFamily::RandomForest, grid, 6, 1),
                         doctest::Contains("fewer folds"), Error);
}

TEST_CASE("grid search is reproducible and thread independent") {
    auto d = testdata::xorClusters(160, 0.3, 2);
    GridSpec grid;
    grid.axes = {{"max_depth", {"2", "none"}}, {"n_estimators", {"10", "20"}}};
    auto a = gridSearchCv(d, ModelFamily::RandomForest, grid, 4, 11, 1);
    auto b = gridSearchCv(d, ModelFamily::RandomForest, grid, 4, 11, 8);
    CHECK(a.bestIndex == b.bestIndex);
    CHECK(a.meanScores == b.meanScores);
    for (std::size_t c = 0; c < a.foldScores.size(); ++c)
        CHECK(a.foldScores[c] == b.foldScores[c]);
}

TEST_CASE("stratified folds cover every row with balanced class shares") {
    auto d = testdata::twoGaussians(100, 2, 3.0, 4);
    auto folds = stratifiedFolds(d, 5, 3);
    std::vector<std::vector<int>> count(5, std::vector<int>(2, 0));
    for (std::size_t r = 0; r < d.nRows; ++r)
        count[static_cast<std::size_t>(folds[r])][static_cast<std::size_t>(d.labels[r])]++;
    for (int f = 0; f < 5; ++f)
        for (int c = 0; c < 2; ++c) CHECK(count[f][c] == 10);
}

TEST_CASE("perfect predictions score one everywhere") {
    std::vector<std::string> y = {"a", "b", "a", "c", "b"};
    auto rep = classificationMetrics(y, y);
    CHECK(rep.accuracy == doctest::Approx(1.0));
    for (const auto& m : rep.perClass) {
        CHECK(m.precision == doctest::Approx(1.0));
        CHECK(m.f1 == doctest::Approx(1.0));
    }
    CHECK(rep.macroF1 == doctest::Approx(1.0));
}

TEST_CASE("precision and recall match the definitional arithmetic") {
    // class x: TP = 2, FP = 1, FN = 1
    std::vector<std::string> truth = {"x", "x", "x", "y", "y"};
    std::vector<std::string> pred = {"x", "x", "y", "x", "y"};
    auto rep = classificationMetrics(truth, pred);
    const auto& x = rep.perClass[0];
    REQUIRE(x.label == "x");
    CHECK(x.precision == doctest::Approx(2.0 / 3.0));
    CHECK(x.recall == doctest::Approx(2.0 / 3.0));
    CHECK(x.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("an all-one-class predictor on balanced data scores one half") {
    std::vector<std::string> truth = {"a", "a", "b", "b"};
    std::vector<std::string> pred = {"a", "a", "a", "a"};
    auto rep = classificationMetrics(truth, pred);
    CHECK(rep.accuracy == doctest::Approx(0.5));
    const auto& b = rep.perClass[1];
    REQUIRE(b.label == "b");
    CHECK(b.recall == doctest::Approx(0.0));
    CHECK(b.precision == doctest::Approx(0.0));
    CHECK(b.neverPredicted);
}

TEST_CASE("confusion rows sum to the true class counts") {
    std::vector<std::string> truth = {"a", "a", "b", "c", "c", "c"};
    std::vector<std::string> pred = {"b", "a", "b", "a", "c", "c"};
    auto rep = classificationMetrics(truth, pred);
    std::size_t diag = 0;
    for (std::size_t c = 0; c < rep.classes.size(); ++c) {
        std::size_t rowSum = 0;
        for (auto v : rep.confusion[c]) rowSum += v;
        CHECK(rowSum == rep.perClass[c].support);
        diag += rep.confusion[c][c];
    }
    CHECK(rep.accuracy ==
          doctest::Approx(static_cast<double>(diag) / static_cast<double>(rep.total)));
    CHECK_THROWS_AS(classificationMetrics({}, {}), Error);
}

TEST_CASE("report text includes the headline sections") {
    std::vector<std::string> truth = {"a", "b", "a", "b"};
    std::vector<std::string> pred = {"a", "b", "b", "b"};
    const std::string text = formatReport(classificationMetrics(truth, pred));
    CHECK(text.find("precision") != std::string::npos);
    CHECK(text.find("macro avg") != std::string::npos);
    CHECK(text.find("confusion matrix") != std::string::npos);
}
