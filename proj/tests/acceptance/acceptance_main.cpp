// Acceptance suite: every release criterion runs here with its tolerance
// pinned in code, printing one PASS/FAIL line per criterion. The CLI
// criteria invoke the real binary named by DURKIT_CLI.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "durkit/common.hpp"
#include "durkit/corpus.hpp"
#include "durkit/features.hpp"
#include "durkit/ml/forest.hpp"
#include "durkit/ml/grid.hpp"
#include "durkit/ml/metrics.hpp"
#include "durkit/ml/preprocess.hpp"
#include "durkit/ml/smote.hpp"
#include "durkit/semrel.hpp"
#include "durkit/stats/compare.hpp"
#include "durkit/stats/correlation.hpp"
#include "durkit/stats/gam.hpp"
#include "durkit/stats/lmm.hpp"

namespace fs = std::filesystem;
using namespace durkit;

namespace {

struct Failure : std::runtime_error {
    explicit Failure(const std::string& m) : std::runtime_error(m) {}
};

void expect(bool condition, const std::string& message) {
    if (!condition) throw Failure(message);
}

std::string fmt(double v) { return formatShortest(v); }

// ---------------------------------------------------------------- helpers

ml::Dataset gaussianPair(std::size_t n, std::size_t dim, double separation, uint64_t seed) {
    ml::Dataset d;
    d.nRows = n;
    d.nCols = dim;
    d.classes = {"neg", "pos"};
    for (std::size_t c = 0; c < dim; ++c) d.featureNames.push_back("f" + std::to_string(c));
    Rng rng = Rng::seeded(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = i % 2 == 0 ? 0 : 1;
        for (std::size_t c = 0; c < dim; ++c)
            d.values.push_back(rng.normal(label == 0 ? 0.0 : separation, 1.0));
        d.labels.push_back(label);
    }
    return d;
}

ml::Dataset xorSet(std::size_t n, double noise, uint64_t seed) {
    ml::Dataset d;
    d.nRows = n;
    d.nCols = 2;
    d.featureNames = {"x1", "x2"};
    d.classes = {"a", "b"};
    Rng rng = Rng::seeded(seed);
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

ml::Dataset imbalancedFiveClass(std::size_t n, uint64_t seed) {
    ml::Dataset d;
    d.nCols = 6;
    d.featureNames = {"f0", "f1", "f2", "f3", "noise0", "noise1"};
    d.classes = {"c1", "c2", "c3", "c4", "c5"};
    const double share[5] = {0.44, 0.28, 0.15, 0.08, 0.05};
    const double centers[5][4] = {{0, 0, 0, 0},
                                  {2.1, 0, 0, 1.1},
                                  {0, 2.1, 1.1, 0},
                                  {2.1, 2.1, 0, 0},
                                  {1.1, 1.1, 2.1, 2.1}};
    const double scale[6] = {1.0, 20.0, 150.0, 0.02, 1.0, 1.0};
    Rng rng = Rng::seeded(seed);
    for (int cls = 0; cls < 5; ++cls) {
        const std::size_t count =
            static_cast<std::size_t>(share[cls] * static_cast<double>(n));
        for (std::size_t i = 0; i < count; ++i) {
            for (int f = 0; f < 4; ++f)
                d.values.push_back((centers[cls][f] + rng.normal(0.0, 0.8)) * scale[f]);
            d.values.push_back(rng.normal());
            d.values.push_back(rng.normal());
            d.labels.push_back(cls);
            ++d.nRows;
        }
    }
    return d;
}

std::vector<std::string> names(const ml::Dataset& d, const std::vector<int>& ids) {
    std::vector<std::string> out;
    for (int id : ids) out.push_back(d.className(id));
    return out;
}

feat::FeatureTable oneWayTable(const std::vector<std::vector<double>>& groups) {
    feat::FeatureTable t;
    t.numericNames = {"y"};
    t.numericColumns.emplace_back();
    t.categoricalNames = {"g"};
    t.categoricalColumns.emplace_back();
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (double v : groups[g]) {
            t.numericColumns[0].push_back(v);
            t.categoricalColumns[0].push_back("g" + std::to_string(g));
            t.rowProvenance.push_back(t.nRows++);
        }
    return t;
}

std::string cliPath() {
    const char* env = std::getenv("DURKIT_CLI");
    if (env && *env) return env;
    throw Failure("DURKIT_CLI is not set; run through ctest or export the CLI path");
}

void runCli(const std::string& args) {
    const std::string cmd = cliPath() + " " + args + " > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) throw Failure("CLI command failed (" + std::to_string(rc) + "): " + args);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure("missing artifact " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* kLmmFormula =
    "WordDuration~WordLength+LogWordFreq+CiteLength+SemanticRelevance+PhraseRate+"
    "Deletions+(1|Age)+(1|Sex)+(1|Speaker)";
const char* kGamFormula =
    "WordDuration~s(WordLength,k=7)+s(LogWordFreq)+s(CiteLength,k=5)+"
    "s(SemanticRelevance)+s(PhraseRate)+s(Deletions,k=4)+s(Sex,bs=\\\"re\\\")+"
    "s(Speaker,bs=\\\"re\\\")";

void runPipelineStages(const std::string& dir, int threads) {
    const std::string base = "--out-dir " + dir + " --seed 42 --threads " +
                             std::to_string(threads) + " ";
    runCli(base + "synth");
    runCli(base + "ingest");
    runCli(base + "features");
    runCli(base + "annotate");
    runCli(base + "classify --model rf");
    runCli(base + "regress --formula \"" + kLmmFormula + "\" --formula \"" + kGamFormula +
           "\"");
    runCli(base + "correlate");
    runCli(base + "plot-partials");
}

// ------------------------------------------------------------- criteria

void criterionAppendixWeights() {
    expect(semrel::pairWeight(0, 3) == 0.5, "target-distance-3 weight must be 1/2");
    expect(semrel::pairWeight(0, 2) == 2.0 / 3.0, "target-distance-2 weight must be 2/3");
    expect(semrel::pairWeight(0, 1) == 1.0, "target-distance-1 weight must be 1");
    expect(semrel::pairWeight(2, 3) == 1.0 / 3.0, "context pair (2,3) weight must be 1/3");
    expect(semrel::pairWeight(1, 2) == 0.5, "context pair (1,2) weight must be 1/2");

    corpus::EmbeddingTable unit;
    unit.dimension = 2;
    for (const char* w : {"a", "b", "c", "t"}) unit.vectors[w] = {1.0, 0.0};
    const auto identical =
        semrel::semanticRelevance({"t", {"a", "b", "c"}}, unit);
    expect(std::abs(identical.score - 3.0) <= 1e-12,
           "identical unit embeddings must score 3.0, got " + fmt(identical.score));

    // independent brute-force enumeration over 1000 random windows
    Rng rng = Rng::seeded(424242);
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniformIndex(3));
        const int dim = 2 + static_cast<int>(rng.uniformIndex(8));
        corpus::EmbeddingTable table;
        table.dimension = static_cast<std::size_t>(dim);
        std::vector<std::vector<double>> stack;
        const char* labels[] = {"t", "c1", "c2", "c3"};
        for (int k = 0; k <= m; ++k) {
            std::vector<double> v(static_cast<std::size_t>(dim));
            for (auto& x : v) x = rng.normal();
            table.vectors[labels[k]] = v;
            stack.push_back(v);
        }
        semrel::ContextWindow window;
        window.target = "t";
        for (int d = m; d >= 1; --d) window.context.push_back(labels[d]);

        auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
            double dot = 0, na = 0, nb = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                dot += a[i] * b[i];
                na += a[i] * a[i];
                nb += b[i] * b[i];
            }
            return na == 0 || nb == 0 ? 0.0 : dot / std::sqrt(na) / std::sqrt(nb);
        };
        double want = 0.0;
        for (int d = 1; d <= m; ++d) want += cosine(stack[0], stack[d]) * 2.0 / (d + 1);
        for (int a = 1; a < m; ++a)
            want += cosine(stack[a], stack[a + 1]) * 2.0 / (2 * a + 2);
        const double got = semrel::semanticRelevance(window, table).score;
        expect(std::abs(got - want) <= 1e-10,
               "brute-force mismatch at trial " + std::to_string(trial) + ": got " +
                   fmt(got) + " want " + fmt(want));
    }
}

void criterionRemlOracle() {
    auto table = oneWayTable({{1, 3}, {5, 7}});
    auto design = stats::buildDesign(stats::parseFormula("y ~ (1|g)"), table);
    auto fit = stats::fitLmmReml(design);
    expect(std::abs(fit.sigma2Residual - 2.0) <= 1e-6,
           "balanced fixture residual variance: got " + fmt(fit.sigma2Residual));
    expect(std::abs(fit.components[0].sigma2 - 7.0) <= 1e-6,
           "balanced fixture between variance: got " + fmt(fit.components[0].sigma2));

    std::vector<double> gEst, eEst;
    for (uint64_t rep = 0; rep < 25; ++rep) {
        Rng rng = Rng::seeded(52000 + rep);
        std::vector<std::vector<double>> groups(50);
        for (auto& g : groups) {
            const double offset = rng.normal(0.0, 1.0);
            for (int i = 0; i < 20; ++i) g.push_back(3.0 + offset + rng.normal(0.0, 2.0));
        }
        auto repFit =
            stats::fitLmmReml(stats::buildDesign(stats::parseFormula("y ~ (1|g)"),
                                                 oneWayTable(groups)));
        gEst.push_back(repFit.components[0].sigma2);
        eEst.push_back(repFit.sigma2Residual);
    }
    std::sort(gEst.begin(), gEst.end());
    std::sort(eEst.begin(), eEst.end());
    const double gMedian = gEst[12];
    const double eMedian = eEst[12];
    expect(std::abs(gMedian - 1.0) <= 0.3,
           "median group variance off: " + fmt(gMedian) + " vs 1.0 (tol 0.3)");
    expect(std::abs(eMedian - 4.0) <= 0.4,
           "median residual variance off: " + fmt(eMedian) + " vs 4.0 (tol 0.4)");
}

void criterionGamRecovery() {
    Rng rng = Rng::seeded(777);
    feat::FeatureTable table;
    table.numericNames = {"y", "x"};
    table.numericColumns.assign(2, {});
    std::vector<double> truth;
    for (int i = 0; i < 500; ++i) {
        const double x = rng.uniform(0.0, 1.0);
        const double t = std::sin(2.0 * M_PI * x);
        table.numericColumns[1].push_back(x);
        table.numericColumns[0].push_back(t + rng.normal(0.0, 0.1));
        truth.push_back(t);
        table.rowProvenance.push_back(table.nRows++);
    }
    auto design = stats::buildDesign(stats::parseFormula("y ~ s(x)"), table);
    auto fit = stats::fitGam(design);
    const Eigen::VectorXd fitted = stats::gamFittedValues(fit, design);
    double sse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        sse += (fitted[static_cast<Eigen::Index>(i)] - truth[i]) *
               (fitted[static_cast<Eigen::Index>(i)] - truth[i]);
    const double rmse = std::sqrt(sse / 500.0);
    expect(rmse <= 0.05, "sine recovery RMSE " + fmt(rmse) + " exceeds 0.05");

    // GCV local-minimum property at the selected lambda
    const double lambda = fit.blocks[1].lambda;
    const double here = stats::gamGcvAt(design, {lambda});
    expect(here <= stats::gamGcvAt(design, {2.0 * lambda}) + 1e-12,
           "GCV not a local minimum against doubling");
    expect(here <= stats::gamGcvAt(design, {0.5 * lambda}) + 1e-12,
           "GCV not a local minimum against halving");

    // at lambda 1e8 the smooth collapses onto the least-squares line
    stats::GamOptions heavy;
    heavy.fixedLambdas = {1e8};
    auto flat = stats::fitGam(design, heavy);
    const Eigen::VectorXd flatFit = stats::gamFittedValues(flat, design);
    const auto& xs = table.numericColumns[1];
    const auto& ys = table.numericColumns[0];
    const double mx = meanOf(xs), my = meanOf(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx, intercept = my - slope * mx;
    double sup = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        sup = std::max(sup, std::abs(flatFit[static_cast<Eigen::Index>(i)] -
                                     (intercept + slope * xs[i])));
    expect(sup <= 1e-3, "heavy-penalty fit deviates " + fmt(sup) + " from the OLS line");
}

void criterionExactStatistics() {
    ml::Dataset d;
    d.nRows = 4;
    d.nCols = 1;
    d.featureNames = {"x"};
    d.classes = {"a", "b"};
    d.values = {1, 2, 3, 4};
    d.labels = {0, 0, 1, 1};
    const auto f = ml::anovaFScores(d);
    expect(f[0] == 8.0, "ANOVA hand case must equal 8 exactly, got " + fmt(f[0]));

    const auto m = stats::pearsonMatrix({"x", "y"}, {{1, 2, 3}, {1, 3, 2}});
    expect(std::abs(m.r[0][1] - 0.5) <= 1e-12,
           "Pearson hand case must be 0.5 within 1e-12, got " + fmt(m.r[0][1]));
}

void criterionSeparability() {
    // two separable Gaussians
    auto blobs = gaussianPair(500, 4, 4.0, 4242);
    auto split = ml::stratifiedSplit(blobs, 0.25, 4242);
    auto train = blobs.selectRows(split.trainRows);
    auto test = blobs.selectRows(split.testRows);

    auto forest = ml::fitForest(train, ml::ForestParams{}, 4242);
    const double rfAcc = ml::accuracyOf(test.labels, ml::predictForest(forest, test));
    expect(rfAcc >= 0.95, "forest accuracy " + fmt(rfAcc) + " below 0.95");

    auto scaler = ml::fitScaler(train);
    auto svm = ml::fitSvm(ml::applyScaler(scaler, train), ml::SvmParams{}, 4242);
    const double svmAcc =
        ml::accuracyOf(test.labels, ml::predictSvm(svm, ml::applyScaler(scaler, test)));
    expect(svmAcc >= 0.95, "linear SVM accuracy " + fmt(svmAcc) + " below 0.95");

    // XOR structure: the nonlinearity gap
    auto xors = xorSet(400, 0.22, 999);
    auto xsplit = ml::stratifiedSplit(xors, 0.25, 999);
    auto xtrain = xors.selectRows(xsplit.trainRows);
    auto xtest = xors.selectRows(xsplit.testRows);

    auto xforest = ml::fitForest(xtrain, ml::ForestParams{}, 999);
    const double xrf = ml::accuracyOf(xtest.labels, ml::predictForest(xforest, xtest));
    expect(xrf >= 0.9, "forest XOR accuracy " + fmt(xrf) + " below 0.9");

    ml::SvmParams linear;
    linear.c = 10.0;
    auto xlinear = ml::fitSvm(xtrain, linear, 999);
    const double xlin = ml::accuracyOf(xtest.labels, ml::predictSvm(xlinear, xtest));
    expect(xlin <= 0.75, "linear SVM XOR accuracy " + fmt(xlin) + " above 0.75");

    ml::SvmParams rbf;
    rbf.kernel = ml::SvmKernel::Rbf;
    rbf.gamma = 1.0;
    rbf.c = 10.0;
    auto xrbf = ml::fitSvm(xtrain, rbf, 999);
    const double xr = ml::accuracyOf(xtest.labels, ml::predictSvm(xrbf, xtest));
    expect(xr >= 0.9, "rbf SVM XOR accuracy " + fmt(xr) + " below 0.9");
}

void criterionOptimizationImprovement() {
    // baseline: plain linear SVM on raw features; optimized: the full
    // scale -> ANOVA-F select -> SMOTE -> grid-search pipeline
    int wins = 0;
    std::vector<std::string> detail;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        auto data = imbalancedFiveClass(1100, 90000 + seed);
        auto split = ml::stratifiedSplit(data, 0.25, seed);
        auto train = data.selectRows(split.trainRows);
        auto test = data.selectRows(split.testRows);

        const auto baselineModel = ml::fitSvm(train, ml::SvmParams{}, seed);
        const auto baseline = ml::classificationMetrics(
            names(data, test.labels), names(data, ml::predictSvm(baselineModel, test)));

        const auto scaler = ml::fitScaler(train);
        auto trainScaled = ml::applyScaler(scaler, train);
        auto testScaled = ml::applyScaler(scaler, test);
        const auto chosen = ml::selectKBest(ml::anovaFScores(trainScaled), 4);
        auto trainSel = trainScaled.selectColumns(chosen);
        auto testSel = testScaled.selectColumns(chosen);
        const auto resampled =
            ml::smote(trainSel, 5, ml::balancedTargets(trainSel), mixSeed(seed, 7));

        ml::GridSpec grid;
        grid.axes = {{"C", {"0.1", "1", "10"}},
                     {"kernel", {"linear"}},
                     {"class_weight", {"none", "balanced"}}};
        const auto search =
            ml::gridSearchCv(resampled, ml::ModelFamily::SupportVector, grid, 3,
                             mixSeed(seed, 8));
        const auto params = ml::svmParamsFrom(search.configs[search.bestIndex], resampled);
        const auto model = ml::fitSvm(resampled, params, mixSeed(seed, 9));
        const auto optimized = ml::classificationMetrics(
            names(data, testSel.labels), names(data, ml::predictSvm(model, testSel)));

        if (optimized.macroF1 >= baseline.macroF1) ++wins;
        detail.push_back(fmt(baseline.macroF1) + "->" + fmt(optimized.macroF1));
    }
    std::string joined;
    for (const auto& d : detail) joined += d + " ";
    expect(wins >= 8, "optimized pipeline won only " + std::to_string(wins) +
                          "/10 seeds (macro-F1 " + joined + ")");
}

void criterionAicBehavior() {
    int lowered = 0, raised = 0;
    bool sawSimilarFlag = false;
    for (uint64_t sim = 0; sim < 100; ++sim) {
        Rng rng = Rng::seeded(31000 + sim);
        feat::FeatureTable table;
        table.numericNames = {"y", "x_true", "x_noise"};
        table.numericColumns.assign(3, {});
        for (int i = 0; i < 60; ++i) {
            const double x = rng.uniform(0, 1);
            table.numericColumns[1].push_back(x);
            table.numericColumns[2].push_back(rng.normal());
            table.numericColumns[0].push_back(0.5 + 1.2 * x + rng.normal(0, 0.8));
            table.rowProvenance.push_back(table.nRows++);
        }
        auto fitNull =
            stats::fitLmmReml(stats::buildDesign(stats::parseFormula("y ~ 1"), table));
        auto fitTrue =
            stats::fitLmmReml(stats::buildDesign(stats::parseFormula("y ~ x_true"), table));
        auto fitNoise = stats::fitLmmReml(
            stats::buildDesign(stats::parseFormula("y ~ x_true + x_noise"), table));

        for (const auto& f : {fitNull, fitTrue, fitNoise})
            expect(f.aic == 2.0 * f.df - 2.0 * f.mlLogLik,
                   "AIC identity violated at sim " + std::to_string(sim));

        if (fitTrue.aic < fitNull.aic) ++lowered;
        if (fitNoise.aic > fitTrue.aic) ++raised;

        const auto rows = stats::compareModels(
            {{"true", fitTrue.df, fitTrue.mlLogLik, fitTrue.aic, fitTrue.nRows},
             {"noise", fitNoise.df, fitNoise.mlLogLik, fitNoise.aic, fitNoise.nRows}});
        if (std::abs(fitNoise.aic - fitTrue.aic) < 2.0) {
            expect(rows[1].similarSupport, "delta-AIC < 2 pair missing the similar flag");
            sawSimilarFlag = true;
        }
    }
    expect(lowered >= 95, "true predictor lowered AIC in only " + std::to_string(lowered) +
                              "/100 runs");
    expect(raised >= 75, "noise predictor raised AIC in only " + std::to_string(raised) +
                             "/100 runs");
    expect(sawSimilarFlag, "no simulation produced a delta-AIC < 2 pair to flag");
}

void criterionThreadDeterminism() {
    const fs::path base = fs::current_path() / "acceptance_work";
    const fs::path dirA = base / "threads1";
    const fs::path dirB = base / "threads8";
    fs::remove_all(dirA);
    fs::remove_all(dirB);
    for (const auto& [dir, threads] :
         std::vector<std::pair<fs::path, int>>{{dirA, 1}, {dirB, 8}}) {
        const std::string b = "--out-dir " + dir.string() + " --seed 42 --threads " +
                              std::to_string(threads) + " ";
        runCli(b + "synth");
        runCli(b + "ingest");
        runCli(b + "features");
        runCli(b + "classify --model rf");
        runCli(b + "regress --formula \"" + kLmmFormula + "\" --formula \"" + kGamFormula +
               "\"");
    }
    for (const char* artifact : {"classify_report.json", "model_rf.json",
                                 "regress_summary.json", "gamfit_m2.json"}) {
        expect(slurp((dirA / artifact).string()) == slurp((dirB / artifact).string()),
               std::string(artifact) + " differs between 1-thread and 8-thread runs");
    }
}

void criterionFormulaParser() {
    const auto lm2 = stats::parseFormula(
        "WordDuration~WordLength+LogWordFreq+CiteLength+SemanticRelevance+PhraseRate+"
        "Deletions+(1|Age)+(1|Sex)+(1|Speaker)");
    expect(lm2.fixed.size() == 6,
           "lm2 fixed terms: " + std::to_string(lm2.fixed.size()) + " != 6");
    expect(lm2.randomIntercepts.size() == 3,
           "lm2 random terms: " + std::to_string(lm2.randomIntercepts.size()) + " != 3");

    const auto a = stats::parseFormula("y ~ x + (1|g)");
    const auto b = stats::parseFormula("y ~ x + s(g, bs=\"re\")");
    expect(a.canonical() == b.canonical(),
           "s(g, bs=\"re\") and (1|g) must normalize identically");

    bool rejected = false;
    try {
        stats::parseFormula("y ~ te(a,b)");
    } catch (const Error& e) {
        rejected = e.code() == "E_UNSUPPORTED_TENSOR" &&
                   std::string(e.what()).find("unsupported") != std::string::npos;
    }
    expect(rejected, "te(.,.) must raise the documented unsupported-tensor error");
}

void criterionEndToEndSmoke() {
    const fs::path dir = fs::current_path() / "acceptance_work" / "smoke";
    fs::remove_all(dir);
    runPipelineStages(dir.string(), 1);

    // every manifest-declared artifact exists
    const std::string manifest = slurp((dir / "manifest.json").string());
    std::size_t artifactCount = 0;
    std::size_t at = 0;
    while ((at = manifest.find(dir.string(), at)) != std::string::npos) {
        std::size_t end = manifest.find('"', at);
        const std::string path = manifest.substr(at, end - at);
        expect(fs::exists(path), "manifest-declared artifact missing: " + path);
        ++artifactCount;
        at = end;
    }
    expect(artifactCount >= 15, "manifest lists too few artifacts");

    // planted correlation sign pattern
    std::ifstream corr((dir / "correlation.tsv").string());
    expect(static_cast<bool>(corr), "correlation.tsv missing");
    std::string header;
    std::getline(corr, header);
    const auto cols = split(header, '\t');
    std::map<std::string, std::map<std::string, double>> r;
    std::string line;
    while (std::getline(corr, line)) {
        const auto cells = split(line, '\t');
        for (std::size_t c = 1; c < cells.size(); ++c) {
            double v = 0.0;
            if (tryParseDouble(cells[c], v)) r[cells[0]][cols[c]] = v;
        }
    }
    expect(r["WordLength"]["LogWordFreq"] < 0,
           "planted sign violated: WordLength vs LogWordFreq not negative");
    expect(r["WordLength"]["CiteLength"] > 0,
           "planted sign violated: WordLength vs CiteLength not positive");
    expect(r["WordDuration"]["LogWordFreq"] < 0,
           "planted sign violated: WordDuration vs LogWordFreq not negative");
    expect(r["WordDuration"]["WordLength"] > 0,
           "planted sign violated: WordDuration vs WordLength not positive");

    // six smooths produce six partial-effect plots
    std::size_t svgCount = 0;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().filename().string().rfind("partial_", 0) == 0 &&
            entry.path().extension() == ".svg")
            ++svgCount;
    expect(svgCount == 6, "expected 6 partial-effect SVGs, found " +
                              std::to_string(svgCount));
}

void criterionRealCorpusOptional() {
    const char* path = std::getenv("DURKIT_BUCKEYE_TSV");
    if (!path || !*path) throw Failure("__SKIP__ no real corpus supplied (optional)");
    const char* lexicon = std::getenv("DURKIT_BUCKEYE_LEXICON");
    const char* embeddings = std::getenv("DURKIT_BUCKEYE_EMBEDDINGS");
    expect(lexicon && embeddings,
           "set DURKIT_BUCKEYE_LEXICON and DURKIT_BUCKEYE_EMBEDDINGS too");

    const fs::path dir = fs::current_path() / "acceptance_work" / "real";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream cfg((dir / "config.json").string());
    cfg << "{\"out_dir\": \"" << dir.string() << "\", \"corpus\": \"" << path
        << "\", \"lexicon\": \"" << lexicon << "\", \"embeddings\": \"" << embeddings
        << "\"}";
    cfg.close();
    const std::string b = "--config " + (dir / "config.json").string() + " ";
    runCli(b + "ingest");
    runCli(b + "features");
    runCli(b + "classify --model rf");
    runCli(b + "regress --formula \"" + kLmmFormula + "\" --formula \"" + kGamFormula +
           "\"");
    runCli(b + "plot-partials");
    std::cout << "        real-corpus AIC table:\n" << slurp((dir / "regress_summary.txt").string());
}

struct Criterion {
    int id;
    const char* name;
    double timeLimit;  // seconds; 0 = none
    std::function<void()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "attention-aware relevance weights and brute-force oracle", 5.0,
         criterionAppendixWeights},
        {2, "REML balanced oracle and simulation recovery", 30.0, criterionRemlOracle},
        {3, "GAM sine recovery, heavy-penalty line, GCV local minimum", 20.0,
         criterionGamRecovery},
        {4, "exact ANOVA-F and Pearson hand cases", 0.0, criterionExactStatistics},
        {5, "classifier separability and the nonlinearity gap", 60.0,
         criterionSeparability},
        {6, "optimized pipeline beats baseline macro-F1 on 8 of 10 seeds", 300.0,
         criterionOptimizationImprovement},
        {7, "AIC lowers for true predictors, rises for noise, identity exact", 60.0,
         criterionAicBehavior},
        {8, "byte-identical artifacts across thread counts", 0.0,
         criterionThreadDeterminism},
        {9, "formula parser: lm2 shape, re-smooth normalization, te rejection", 0.0,
         criterionFormulaParser},
        {10, "end-to-end synthetic pipeline with planted correlation signs", 60.0,
         criterionEndToEndSmoke},
        {11, "optional real-corpus pipeline (reported, not gated)", 0.0,
         criterionRealCorpusOptional},
    };

    fs::create_directories(fs::current_path() / "acceptance_work");
    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string verdict = "PASS";
        std::string note;
        try {
            criterion.run();
        } catch (const Failure& f) {
            if (std::string(f.what()).rfind("__SKIP__", 0) == 0) {
                verdict = "SKIP";
                note = std::string(f.what()).substr(8);
            } else {
                verdict = "FAIL";
                note = f.what();
            }
        } catch (const std::exception& e) {
            verdict = "FAIL";
            note = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (verdict == "PASS" && criterion.timeLimit > 0.0 &&
            elapsed > criterion.timeLimit) {
            verdict = "FAIL";
            note = "exceeded the " + formatDouble(criterion.timeLimit, 0) + "s budget";
        }
        std::cout << verdict << "  criterion " << criterion.id << ": " << criterion.name
                  << " [" << formatDouble(elapsed, 2) << "s]";
        if (!note.empty()) std::cout << "  -- " << note;
        std::cout << std::endl;
        if (verdict == "FAIL") ++failures;
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all criteria passed" << std::endl;
    return 0;
}
