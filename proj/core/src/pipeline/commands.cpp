#include "durkit/pipeline/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "durkit/common.hpp"
#include "durkit/corpus.hpp"
#include "durkit/features.hpp"
#include "durkit/ml/grid.hpp"
#include "durkit/ml/metrics.hpp"
#include "durkit/ml/preprocess.hpp"
#include "durkit/ml/smote.hpp"
#include "durkit/pipeline/svg.hpp"
#include "durkit/pipeline/synth.hpp"
#include "durkit/semrel.hpp"
#include "durkit/stats/compare.hpp"
#include "durkit/stats/correlation.hpp"
#include "durkit/stats/gam.hpp"
#include "durkit/stats/lmm.hpp"

namespace durkit::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kWaldCaveat =
    "p-values use the normal approximation to the Wald statistic";

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) fail("E_IO", "cannot write " + path);
    out << content;
}

void writeJsonFile(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail("E_IO", "cannot write " + path);
    out << j.dump(2) << '\n';
}

json readJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("E_IO", "cannot read " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("E_PARSE", path + " is not valid JSON: " + e.what());
    }
    return j;
}

void updateManifest(const RunConfig& config, const StageResult& result) {
    const std::string path = config.outDir + "/manifest.json";
    json manifest;
    if (fs::exists(path)) manifest = readJsonFile(path);
    manifest["config_hash"] = config.hashHex();
    manifest["tool_version"] = kToolVersion;
    manifest["stages"][result.stage] = {{"seconds", result.seconds},
                                        {"artifacts", result.artifacts}};
    writeJsonFile(path, manifest);
}

std::vector<corpus::CorpusRecord> loadDataset(const RunConfig& config) {
    const std::string path = config.outDir + "/dataset.tsv";
    std::ifstream in(path);
    if (!in) fail("E_IO", "missing " + path + "; run the ingest stage first");
    return corpus::parseCorpus(in, corpus::ParseOptions{}, nullptr);
}

feat::FeatureTable loadFeatures(const RunConfig& config) {
    const std::string path = config.outDir + "/features.tsv";
    std::ifstream in(path);
    if (!in) fail("E_IO", "missing " + path + "; run the features stage first");
    return feat::readFeatureTable(in);
}

corpus::EmbeddingTable loadEmbeddings(const RunConfig& config) {
    std::ifstream in(config.resolvedEmbeddings());
    if (!in) fail("E_IO", "cannot open embeddings: " + config.resolvedEmbeddings());
    return corpus::parseEmbeddings(in);
}

semrel::RelevanceSeries annotateRecords(const RunConfig& config,
                                        const std::vector<corpus::CorpusRecord>& records) {
    const auto embeddings = loadEmbeddings(config);
    semrel::Options options;
    options.windowSize = config.windowSize;
    return semrel::annotateCorpus(records, embeddings, options, config.threads);
}

std::vector<std::string> labelStrings(const ml::Dataset& data,
                                      const std::vector<int>& ids) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(data.className(id));
    return out;
}

json reportToJson(const ml::ClassificationReport& report) {
    json per = json::array();
    for (const auto& m : report.perClass)
        per.push_back({{"class", m.label},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support},
                       {"never_predicted", m.neverPredicted}});
    return {{"accuracy", report.accuracy},
            {"per_class", per},
            {"macro", {{"precision", report.macroPrecision},
                       {"recall", report.macroRecall},
                       {"f1", report.macroF1}}},
            {"weighted", {{"precision", report.weightedPrecision},
                          {"recall", report.weightedRecall},
                          {"f1", report.weightedF1}}},
            {"confusion", report.confusion},
            {"classes", report.classes},
            {"total", report.total}};
}

json matrixToJson(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrixFromJson(const json& rows) {
    const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    Eigen::MatrixXd m(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r)
        for (Eigen::Index c = 0; c < nc; ++c)
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                          .get<double>();
    return m;
}

json vectorToJson(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vectorFromJson(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json gamFitToJson(const stats::GamFit& fit, const std::string& name,
                  const std::string& formula) {
    json blocks = json::array();
    for (const auto& b : fit.blocks)
        blocks.push_back({{"kind", static_cast<int>(b.kind)},
                          {"name", b.name},
                          {"offset", b.offset},
                          {"size", b.size},
                          {"lambda", b.lambda},
                          {"edf", b.edf}});
    json smooths = json::array();
    for (const auto& s : fit.smooths)
        smooths.push_back({{"name", s.name},
                           {"basis_dim", s.basisDim},
                           {"knots", s.knots},
                           {"transform", matrixToJson(s.transform)},
                           {"x_min", s.xMin},
                           {"x_max", s.xMax},
                           {"rug", s.rug},
                           {"block_index", s.blockIndex}});
    return {{"format", "durkit-gamfit"},
            {"version", 1},
            {"name", name},
            {"formula", formula},
            {"response", fit.responseName},
            {"theta", vectorToJson(fit.theta)},
            {"blocks", blocks},
            {"smooths", smooths},
            {"fixed_names", fit.fixedNames},
            {"post_cov", matrixToJson(fit.postCov)},
            {"sigma2", fit.sigma2},
            {"total_edf", fit.totalEdf},
            {"gcv", fit.gcv},
            {"rss", fit.rss},
            {"loglik", fit.logLik},
            {"aic", fit.aic},
            {"n_rows", fit.nRows}};
}

stats::GamFit gamFitFromJson(const json& j) {
    if (j.value("format", "") != "durkit-gamfit")
        fail("E_PARSE", "not a durkit-gamfit artifact");
    stats::GamFit fit;
    fit.theta = vectorFromJson(j.at("theta"));
    for (const auto& b : j.at("blocks")) {
        stats::GamBlock block;
        block.kind = static_cast<stats::GamBlock::Kind>(b.at("kind").get<int>());
        block.name = b.at("name").get<std::string>();
        block.offset = b.at("offset").get<int>();
        block.size = b.at("size").get<int>();
        block.lambda = b.at("lambda").get<double>();
        block.edf = b.at("edf").get<double>();
        fit.blocks.push_back(block);
    }
    for (const auto& s : j.at("smooths")) {
        stats::SmoothInfo info;
        info.name = s.at("name").get<std::string>();
        info.basisDim = s.at("basis_dim").get<int>();
        info.knots = s.at("knots").get<std::vector<double>>();
        info.transform = matrixFromJson(s.at("transform"));
        info.xMin = s.at("x_min").get<double>();
        info.xMax = s.at("x_max").get<double>();
        info.rug = s.at("rug").get<std::vector<double>>();
        info.blockIndex = s.at("block_index").get<int>();
        fit.smooths.push_back(std::move(info));
    }
    fit.fixedNames = j.at("fixed_names").get<std::vector<std::string>>();
    fit.postCov = matrixFromJson(j.at("post_cov"));
    fit.sigma2 = j.at("sigma2").get<double>();
    fit.totalEdf = j.at("total_edf").get<double>();
    fit.gcv = j.at("gcv").get<double>();
    fit.rss = j.at("rss").get<double>();
    fit.logLik = j.at("loglik").get<double>();
    fit.aic = j.at("aic").get<double>();
    fit.nRows = j.at("n_rows").get<std::size_t>();
    fit.responseName = j.at("response").get<std::string>();
    return fit;
}

ml::GridSpec gridFor(const RunConfig& config, ml::ModelFamily family) {
    if (!config.classify.grid.empty()) {
        ml::GridSpec grid;
        grid.axes = config.classify.grid;
        return grid;
    }
    return family == ml::ModelFamily::RandomForest ? ml::GridSpec::forestDefault()
                                                   : ml::GridSpec::svmDefault();
}

json forestModelJson(const ml::ForestModel& model) {
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"counts", n.classCounts}});
        trees.push_back(std::move(nodes));
    }
    return {{"format", "durkit-model"},
            {"version", 1},
            {"kind", "random_forest"},
            {"classes", model.classes},
            {"features", model.featureNames},
            {"hyperparams",
             {{"n_estimators", model.params.nEstimators},
              {"max_depth", model.params.tree.maxDepth},
              {"min_samples_split", model.params.tree.minSamplesSplit},
              {"min_samples_leaf", model.params.tree.minSamplesLeaf},
              {"seed", model.seed}}},
            {"parameters", {{"trees", trees}}}};
}

json svmModelJson(const ml::SvmModel& model) {
    json machines = json::array();
    for (const auto& m : model.machines) {
        json entry = {{"bias", m.bias}, {"duality_gap", m.dualityGap}};
        if (model.params.kernel == ml::SvmKernel::Linear) {
            entry["weights"] = m.weights;
        } else {
            entry["support_coefs"] = m.supportCoefs;
            entry["support_vectors"] = m.supportVectors;
        }
        machines.push_back(std::move(entry));
    }
    return {{"format", "durkit-model"},
            {"version", 1},
            {"kind", "svm"},
            {"classes", model.classes},
            {"features", model.featureNames},
            {"hyperparams",
             {{"kernel", model.params.kernel == ml::SvmKernel::Linear ? "linear" : "rbf"},
              {"C", model.params.c},
              {"gamma", model.params.gamma},
              {"class_weight", model.params.balancedClassWeight ? "balanced" : "none"},
              {"seed", model.seed}}},
            {"parameters", {{"machines", machines}}}};
}

std::string formatDoubleCell(double v) {
    if (std::isnan(v)) return "nan";
    return formatShortest(v);
}

}  // namespace

StageResult cmdSynth(const RunConfig& config) {
    StageTimer timer;
    auto result = generateSyntheticCorpus(config.synth, config.seed, config.outDir);

    StageResult stage;
    stage.stage = "synth";
    stage.artifacts = {result.corpusPath, result.lexiconPath, result.embeddingsPath};
    stage.seconds = timer.seconds();
    stage.summary = "generated " + std::to_string(result.tokens) + " tokens over " +
                    std::to_string(result.vocabulary) + " word types";
    updateManifest(config, stage);
    return stage;
}

StageResult cmdIngest(const RunConfig& config) {
    StageTimer timer;
    requireInputs(config, true, true, true);
    fs::create_directories(config.outDir);

    std::ifstream corpusIn(config.resolvedCorpus());
    if (!corpusIn) fail("E_IO", "cannot open corpus: " + config.resolvedCorpus());
    corpus::ParseReport parseReport;
    const auto records = corpus::parseCorpus(corpusIn, corpus::ParseOptions{}, &parseReport);

    std::ifstream lexIn(config.resolvedLexicon());
    if (!lexIn) fail("E_IO", "cannot open lexicon: " + config.resolvedLexicon());
    const auto lexicon = corpus::parseFrequencyList(lexIn);
    const auto embeddings = loadEmbeddings(config);

    const auto coverage = corpus::validateDataset(records, lexicon, embeddings);

    const std::string datasetPath = config.outDir + "/dataset.tsv";
    {
        std::ofstream out(datasetPath);
        if (!out) fail("E_IO", "cannot write " + datasetPath);
        corpus::writeCorpus(records, out);
    }

    json issues = json::array();
    for (const auto& issue : parseReport.issues)
        issues.push_back({{"line", issue.line}, {"reason", issue.reason}});
    const std::string coveragePath = config.outDir + "/coverage.json";
    writeJsonFile(coveragePath,
                  {{"config_hash", config.hashHex()},
                   {"records", coverage.recordCount},
                   {"word_types", coverage.wordTypeCount},
                   {"lexicon_type_coverage", coverage.lexiconTypeCoverage},
                   {"embedding_type_coverage", coverage.embeddingTypeCoverage},
                   {"realized_phones_fraction", coverage.realizedPhonesFraction},
                   {"rows_read", parseReport.rowsRead},
                   {"rows_dropped", parseReport.rowsDropped},
                   {"markers_skipped", parseReport.markersSkipped},
                   {"row_issues", issues}});

    StageResult stage;
    stage.stage = "ingest";
    stage.artifacts = {datasetPath, coveragePath};
    stage.seconds = timer.seconds();
    std::ostringstream os;
    os << coverage.recordCount << " records, lexicon coverage "
       << formatDouble(coverage.lexiconTypeCoverage, 3) << ", embedding coverage "
       << formatDouble(coverage.embeddingTypeCoverage, 3);
    stage.summary = os.str();
    updateManifest(config, stage);
    return stage;
}

StageResult cmdFeatures(const RunConfig& config) {
    StageTimer timer;
    const auto records = loadDataset(config);

    std::ifstream lexIn(config.resolvedLexicon());
    if (!lexIn) fail("E_IO", "cannot open lexicon: " + config.resolvedLexicon());
    const auto lexicon = corpus::parseFrequencyList(lexIn);
    const auto relevance = annotateRecords(config, records);

    feat::AssemblyOptions options;
    options.features =
        config.features.empty() ? feat::AssemblyOptions::defaultFeatures() : config.features;
    options.kBins = config.kBins;
    feat::AssemblyReport report;
    const auto table = feat::assembleFeatureTable(records, lexicon, relevance, options, &report);

    const std::string featuresPath = config.outDir + "/features.tsv";
    {
        std::ofstream out(featuresPath);
        if (!out) fail("E_IO", "cannot write " + featuresPath);
        feat::writeFeatureTable(table, out);
    }
    const std::string reportPath = config.outDir + "/features_report.json";
    writeJsonFile(reportPath, {{"config_hash", config.hashHex()},
                               {"rows_in", report.rowsIn},
                               {"rows_kept", report.rowsKept},
                               {"rows_dropped", report.rowsDropped},
                               {"zero_vowel_flags", report.zeroVowelFlags},
                               {"features", options.features},
                               {"k_bins", options.kBins},
                               {"label_classes", table.labelClasses}});

    StageResult stage;
    stage.stage = "features";
    stage.artifacts = {featuresPath, reportPath};
    stage.seconds = timer.seconds();
    stage.summary = std::to_string(report.rowsKept) + " rows, " +
                    std::to_string(table.numericNames.size()) + " numeric features, " +
                    std::to_string(report.rowsDropped) + " dropped";
    updateManifest(config, stage);
    return stage;
}

StageResult cmdAnnotate(const RunConfig& config) {
    StageTimer timer;
    const auto records = loadDataset(config);
    const auto relevance = annotateRecords(config, records);

    const std::string path = config.outDir + "/relevance.tsv";
    std::ofstream out(path);
    if (!out) fail("E_IO", "cannot write " + path);
    out << "token_index\tscore\tstatus\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const char* status = "ok";
        if (relevance.status[i] == semrel::ScoreStatus::EmptyContext)
            status = "empty_context";
        else if (relevance.status[i] == semrel::ScoreStatus::MissingTarget)
            status = "missing_target";
        out << i << '\t' << formatShortest(relevance.scores[i]) << '\t' << status << '\n';
    }
    out.close();

    std::size_t flagged = 0;
    for (auto s : relevance.status)
        if (s != semrel::ScoreStatus::Ok) ++flagged;

    StageResult stage;
    stage.stage = "annotate";
    stage.artifacts = {path};
    stage.seconds = timer.seconds();
    stage.summary = std::to_string(records.size()) + " tokens scored, " +
                    std::to_string(flagged) + " flagged";
    updateManifest(config, stage);
    return stage;
}

StageResult cmdClassify(const RunConfig& config) {
    StageTimer timer;
    const auto table = loadFeatures(config);
    if (!table.hasLabels())
        fail("E_INVALID_ARG", "features table has no duration-range labels");

    const ml::ModelFamily family = ml::modelFamilyFromName(config.classify.model);
    ml::Dataset data = ml::datasetFromTable(table, config.classify.features);
    const auto split = ml::stratifiedSplit(data, config.classify.testFraction, config.seed);
    const ml::Dataset train = data.selectRows(split.trainRows);
    const ml::Dataset test = data.selectRows(split.testRows);

    json output = {{"config_hash", config.hashHex()},
                   {"seed", config.seed},
                   {"model", config.classify.model},
                   {"features", config.classify.features},
                   {"rows", data.nRows},
                   {"train_rows", train.nRows},
                   {"test_rows", test.nRows}};
    std::ostringstream text;
    text << "classification: model=" << config.classify.model << " rows=" << data.nRows
         << " train=" << train.nRows << " test=" << test.nRows
         << " seed=" << config.seed << " config=" << config.hashHex() << "\n\n";

    json modelFile;
    double baselineAccuracy = 0.0;
    // baseline mirrors the plain train-then-score route on raw features
    {
        std::vector<int> predicted;
        if (family == ml::ModelFamily::RandomForest) {
            ml::ForestParams params;
            const auto model =
                ml::fitForest(train, params, mixSeed(config.seed, 101), config.threads);
            predicted = ml::predictForest(model, test);
            auto importances = ml::featureImportances(model);
            output["baseline"]["feature_importances"] = importances;
            modelFile = forestModelJson(model);
        } else {
            ml::SvmParams params;  // linear, C = 1
            const auto model =
                ml::fitSvm(train, params, mixSeed(config.seed, 101), config.threads);
            predicted = ml::predictSvm(model, test);
            modelFile = svmModelJson(model);
        }
        const auto report =
            ml::classificationMetrics(labelStrings(data, test.labels),
                                      labelStrings(data, predicted));
        baselineAccuracy = report.accuracy;
        output["baseline"]["report"] = reportToJson(report);
        text << "== baseline ==\n" << ml::formatReport(report) << "\n";
    }

    if (config.classify.optimize) {
        // scale -> ANOVA-F select -> SMOTE -> grid search, then refit
        const auto scaler = ml::fitScaler(train);
        const ml::Dataset trainScaled = ml::applyScaler(scaler, train);
        const ml::Dataset testScaled = ml::applyScaler(scaler, test);

        const auto fScores = ml::anovaFScores(trainScaled);
        const std::size_t k =
            std::min<std::size_t>(static_cast<std::size_t>(config.classify.selectK),
                                  trainScaled.nCols);
        const auto chosen = ml::selectKBest(fScores, k);
        ml::Dataset trainSelected = trainScaled.selectColumns(chosen);
        ml::Dataset testSelected = testScaled.selectColumns(chosen);

        ml::SmoteReport smoteReport;
        const ml::Dataset resampled =
            ml::smote(trainSelected, config.classify.smoteK,
                      ml::balancedTargets(trainSelected), mixSeed(config.seed, 202),
                      &smoteReport);

        const ml::GridSpec grid = gridFor(config, family);
        const auto search = ml::gridSearchCv(resampled, family, grid, config.classify.folds,
                                             mixSeed(config.seed, 303), config.threads);
        const auto& bestConfig = search.configs[search.bestIndex];

        std::vector<int> predicted;
        if (family == ml::ModelFamily::RandomForest) {
            const auto params = ml::forestParamsFrom(bestConfig);
            const auto model =
                ml::fitForest(resampled, params, mixSeed(config.seed, 404), config.threads);
            predicted = ml::predictForest(model, testSelected);
            output["optimized"]["feature_importances"] = ml::featureImportances(model);
            modelFile = forestModelJson(model);
        } else {
            const auto params = ml::svmParamsFrom(bestConfig, resampled);
            const auto model =
                ml::fitSvm(resampled, params, mixSeed(config.seed, 404), config.threads);
            predicted = ml::predictSvm(model, testSelected);
            modelFile = svmModelJson(model);
        }
        const auto report =
            ml::classificationMetrics(labelStrings(data, testSelected.labels),
                                      labelStrings(data, predicted));

        std::vector<std::string> selectedNames;
        for (auto c : chosen) selectedNames.push_back(trainScaled.featureNames[c]);
        json cv = json::array();
        for (std::size_t c = 0; c < search.configs.size(); ++c)
            cv.push_back({{"config", search.configs[c]},
                          {"mean_accuracy", search.meanScores[c]},
                          {"fold_accuracy", search.foldScores[c]}});
        output["optimized"]["selected_features"] = selectedNames;
        output["optimized"]["anova_f"] = fScores;
        output["optimized"]["smote_synthetic_rows"] = smoteReport.syntheticRows;
        output["optimized"]["best_config"] = bestConfig;
        output["optimized"]["cv"] = cv;
        output["optimized"]["total_fits"] = search.totalFits;
        output["optimized"]["report"] = reportToJson(report);

        text << "== optimized (scale + select-k + smote + grid search) ==\n";
        text << "selected features:";
        for (const auto& n : selectedNames) text << ' ' << n;
        text << "\nbest config:";
        for (const auto& [key, value] : bestConfig) text << ' ' << key << '=' << value;
        text << "  (cv accuracy " << formatDouble(search.meanScores[search.bestIndex], 4)
             << ", " << search.totalFits << " fits)\n\n"
             << ml::formatReport(report) << "\n";
        text << "baseline accuracy " << formatDouble(baselineAccuracy, 4)
             << " -> optimized accuracy " << formatDouble(report.accuracy, 4) << "\n";
    }

    const std::string jsonPath = config.outDir + "/classify_report.json";
    const std::string textPath = config.outDir + "/classify_report.txt";
    const std::string modelPath =
        config.outDir + "/model_" + config.classify.model + ".json";
    writeJsonFile(jsonPath, output);
    writeTextFile(textPath, text.str());
    writeJsonFile(modelPath, modelFile);

    StageResult stage;
    stage.stage = "classify";
    stage.artifacts = {jsonPath, textPath, modelPath};
    stage.seconds = timer.seconds();
    stage.summary = "baseline accuracy " + formatDouble(baselineAccuracy, 4) +
                    (config.classify.optimize ? " (optimized report written)" : "");
    updateManifest(config, stage);
    return stage;
}

namespace {

struct RegressOutcome {
    std::string name;
    std::string formulaText;
    bool isGam = false;
    json summary;
    std::string text;
    stats::ModelSummary comparison;
    json gamArtifact;  // empty when not a GAM
};

RegressOutcome runOneFormula(const RunConfig& config, const feat::FeatureTable& table,
                             std::size_t index, const std::string& formulaText) {
    RegressOutcome out;
    out.name = "m" + std::to_string(index + 1);
    out.formulaText = formulaText;
    const auto formula = stats::parseFormula(formulaText);
    const auto design = stats::buildDesign(formula, table, config.regress.basisDim);
    std::ostringstream text;
    text << "-- " << out.name << ": " << formulaText << "\n";

    if (formula.hasSmooths()) {
        out.isGam = true;
        const auto fit = stats::fitGam(design);
        json smoothRows = json::array();
        text << "   kind=gam n=" << fit.nRows << " edf=" << formatDouble(fit.totalEdf, 3)
             << " gcv=" << formatShortest(fit.gcv) << " aic=" << formatDouble(fit.aic, 2)
             << "\n   smooth terms:\n";
        for (const auto& block : fit.blocks) {
            if (block.kind == stats::GamBlock::Kind::Parametric) continue;
            const char* kind =
                block.kind == stats::GamBlock::Kind::Smooth ? "s" : "re";
            smoothRows.push_back({{"term", block.name},
                                  {"kind", kind},
                                  {"lambda", block.lambda},
                                  {"edf", block.edf}});
            text << "     " << kind << "(" << block.name << ") edf "
                 << formatDouble(block.edf, 2) << " lambda "
                 << formatShortest(block.lambda) << "\n";
        }
        out.summary = {{"name", out.name},
                       {"formula", formulaText},
                       {"kind", "gam"},
                       {"n", fit.nRows},
                       {"edf", fit.totalEdf},
                       {"gcv", fit.gcv},
                       {"sigma2", fit.sigma2},
                       {"loglik", fit.logLik},
                       {"aic", fit.aic},
                       {"df", fit.totalEdf + 1.0},
                       {"terms", smoothRows}};
        out.comparison = {out.name, fit.totalEdf + 1.0, fit.logLik, fit.aic, fit.nRows};
        out.gamArtifact = gamFitToJson(fit, out.name, formulaText);
    } else {
        const auto fit = stats::fitLmmReml(design);
        const auto wald = stats::waldTests(fit);
        json coefRows = json::array();
        text << "   kind=lmm n=" << fit.nRows << " df=" << fit.df
             << " reml=" << formatDouble(fit.remlCriterion, 2)
             << " loglik=" << formatDouble(fit.mlLogLik, 2)
             << " aic=" << formatDouble(fit.aic, 2) << "\n";
        text << "   " << std::left << std::setw(24) << "coefficient" << std::right
             << std::setw(12) << "estimate" << std::setw(12) << "se" << std::setw(10)
             << "t" << std::setw(12) << "p" << "\n";
        for (const auto& row : wald) {
            coefRows.push_back({{"name", row.name},
                                {"estimate", row.estimate},
                                {"se", row.se},
                                {"t", row.t},
                                {"p", row.p}});
            text << "   " << std::left << std::setw(24) << row.name << std::right
                 << std::setw(12) << formatDouble(row.estimate, 5) << std::setw(12)
                 << formatDouble(row.se, 5) << std::setw(10) << formatDouble(row.t, 2)
                 << std::setw(12) << (row.p < 1e-4 ? "<1e-4" : formatDouble(row.p, 4))
                 << "\n";
        }
        json varRows = json::array();
        text << "   variance components:\n";
        for (const auto& vc : fit.components) {
            varRows.push_back({{"factor", vc.factor},
                               {"sigma2", vc.sigma2},
                               {"boundary", vc.boundary}});
            text << "     (1|" << vc.factor << ") sigma2 " << formatShortest(vc.sigma2)
                 << (vc.boundary ? " [boundary]" : "") << "\n";
        }
        text << "     residual sigma2 " << formatShortest(fit.sigma2Residual) << "\n";
        out.summary = {{"name", out.name},
                       {"formula", formulaText},
                       {"kind", "lmm"},
                       {"n", fit.nRows},
                       {"df", fit.df},
                       {"reml_criterion", fit.remlCriterion},
                       {"loglik", fit.mlLogLik},
                       {"aic", fit.aic},
                       {"coefficients", coefRows},
                       {"variance_components", varRows},
                       {"residual_sigma2", fit.sigma2Residual},
                       {"p_value_method", kWaldCaveat}};
        out.comparison = {out.name, fit.df, fit.mlLogLik, fit.aic, fit.nRows};
    }
    out.text = text.str();
    return out;
}

}  // namespace

StageResult cmdRegress(const RunConfig& config) {
    StageTimer timer;
    if (config.regress.formulas.empty())
        fail("E_CONFIG", "regress needs at least one formula");
    const auto table = loadFeatures(config);

    std::vector<RegressOutcome> outcomes(config.regress.formulas.size());
    parallelFor(config.regress.formulas.size(), config.threads, [&](std::size_t i) {
        outcomes[i] = runOneFormula(config, table, i, config.regress.formulas[i]);
    });

    std::vector<stats::ModelSummary> summaries;
    for (const auto& o : outcomes) summaries.push_back(o.comparison);
    const auto ranking = stats::compareModels(summaries);

    std::ostringstream text;
    text << "regression track: " << outcomes.size() << " model(s), n="
         << summaries.front().nRows << ", seed=" << config.seed
         << ", config=" << config.hashHex() << "\n";
    text << "note: " << kWaldCaveat << "\n\n";
    for (const auto& o : outcomes) text << o.text << "\n";

    text << "== AIC comparison ==\n";
    text << std::left << std::setw(8) << "model" << std::right << std::setw(12) << "df"
         << std::setw(14) << "AIC" << std::setw(12) << "dAIC" << "  support\n";
    json rankingJson = json::array();
    for (const auto& row : ranking) {
        text << std::left << std::setw(8) << row.name << std::right << std::setw(12)
             << formatDouble(row.df, 2) << std::setw(14) << formatDouble(row.aic, 2)
             << std::setw(12) << formatDouble(row.deltaAic, 2)
             << (row.similarSupport ? "  similar support" : "") << "\n";
        rankingJson.push_back({{"name", row.name},
                               {"df", row.df},
                               {"aic", row.aic},
                               {"delta_aic", row.deltaAic},
                               {"similar_support", row.similarSupport}});
    }

    json output = {{"config_hash", config.hashHex()},
                   {"seed", config.seed},
                   {"n", summaries.front().nRows},
                   {"p_value_method", kWaldCaveat},
                   {"comparison", rankingJson}};
    json fitsJson = json::array();
    for (const auto& o : outcomes) fitsJson.push_back(o.summary);
    output["fits"] = fitsJson;

    const std::string textPath = config.outDir + "/regress_summary.txt";
    const std::string jsonPath = config.outDir + "/regress_summary.json";
    writeTextFile(textPath, text.str());
    writeJsonFile(jsonPath, output);

    StageResult stage;
    stage.stage = "regress";
    stage.artifacts = {textPath, jsonPath};
    for (const auto& o : outcomes) {
        if (!o.isGam) continue;
        const std::string path = config.outDir + "/gamfit_" + o.name + ".json";
        writeJsonFile(path, o.gamArtifact);
        stage.artifacts.push_back(path);
    }
    stage.seconds = timer.seconds();
    stage.summary = "best model " + ranking.front().name + " (AIC " +
                    formatDouble(ranking.front().aic, 2) + ")";
    updateManifest(config, stage);
    return stage;
}

StageResult cmdCorrelate(const RunConfig& config) {
    StageTimer timer;
    const auto table = loadFeatures(config);
    const std::vector<std::string> names =
        config.correlateColumns.empty() ? table.numericNames : config.correlateColumns;
    std::vector<std::vector<double>> columns;
    for (const auto& n : names) columns.push_back(table.numeric(n));
    const auto matrix = stats::pearsonMatrix(names, columns);

    const std::string tsvPath = config.outDir + "/correlation.tsv";
    {
        std::ostringstream out;
        out << "variable";
        for (const auto& n : names) out << '\t' << n;
        out << '\n';
        for (std::size_t r = 0; r < names.size(); ++r) {
            out << names[r];
            for (std::size_t c = 0; c < names.size(); ++c)
                out << '\t' << formatDoubleCell(matrix.r[r][c]);
            out << '\n';
        }
        writeTextFile(tsvPath, out.str());
    }

    // annotated heatmap
    const double cell = 54.0;
    const double left = 130.0, top = 90.0;
    const std::size_t k = names.size();
    SvgCanvas canvas(left + cell * static_cast<double>(k) + 20.0,
                     top + cell * static_cast<double>(k) + 20.0);
    for (std::size_t r = 0; r < k; ++r) {
        canvas.text(left - 6.0, top + cell * (static_cast<double>(r) + 0.62), names[r],
                    11.0, "end");
        canvas.text(left + cell * (static_cast<double>(r) + 0.5), top - 8.0, names[r],
                    10.0, "middle");
        for (std::size_t c = 0; c < k; ++c) {
            const double v = matrix.r[r][c];
            const std::string color = std::isnan(v) ? "#dddddd" : divergingColor(v);
            canvas.rect(left + cell * static_cast<double>(c),
                        top + cell * static_cast<double>(r), cell - 2.0, cell - 2.0, color);
            char label[16];
            if (std::isnan(v))
                std::snprintf(label, sizeof(label), "--");
            else
                std::snprintf(label, sizeof(label), "%.2f", v);
            canvas.text(left + cell * (static_cast<double>(c) + 0.5),
                        top + cell * (static_cast<double>(r) + 0.58), label, 11.0, "middle");
        }
    }
    const std::string svgPath = config.outDir + "/correlation.svg";
    writeTextFile(svgPath, canvas.finish());

    StageResult stage;
    stage.stage = "correlate";
    stage.artifacts = {tsvPath, svgPath};
    stage.seconds = timer.seconds();
    stage.summary = std::to_string(k) + "x" + std::to_string(k) + " correlation matrix";
    updateManifest(config, stage);
    return stage;
}

namespace {

void renderPartialSvg(const stats::PartialEffect& effect,
                      const std::vector<double>& rug, const std::string& response,
                      const std::string& path) {
    const double width = 440.0, height = 330.0;
    const double left = 64.0, right = 16.0, top = 34.0, bottom = 52.0;
    const double plotW = width - left - right;
    const double plotH = height - top - bottom;

    double yLo = 0.0, yHi = 0.0;
    for (std::size_t i = 0; i < effect.fitted.size(); ++i) {
        yLo = std::min(yLo, effect.fitted[i] - 2.0 * effect.se[i]);
        yHi = std::max(yHi, effect.fitted[i] + 2.0 * effect.se[i]);
    }
    const double pad = 0.06 * (yHi - yLo + 1e-12);
    yLo -= pad;
    yHi += pad;
    const double xLo = effect.grid.front(), xHi = effect.grid.back();

    auto px = [&](double x) { return left + (x - xLo) / (xHi - xLo) * plotW; };
    auto py = [&](double y) { return top + (yHi - y) / (yHi - yLo) * plotH; };

    SvgCanvas canvas(width, height);
    // confidence band first, then the zero line and the curve
    std::vector<std::pair<double, double>> band;
    for (std::size_t i = 0; i < effect.grid.size(); ++i)
        band.push_back({px(effect.grid[i]), py(effect.fitted[i] + 2.0 * effect.se[i])});
    for (std::size_t i = effect.grid.size(); i-- > 0;)
        band.push_back({px(effect.grid[i]), py(effect.fitted[i] - 2.0 * effect.se[i])});
    canvas.polygon(band, "#aac8e8", 0.55);

    if (yLo < 0.0 && yHi > 0.0)
        canvas.line(left, py(0.0), left + plotW, py(0.0), "#bbbbbb", 1.0);

    std::vector<std::pair<double, double>> curve;
    for (std::size_t i = 0; i < effect.grid.size(); ++i)
        curve.push_back({px(effect.grid[i]), py(effect.fitted[i])});
    canvas.polyline(curve, "#1f5fa9", 2.0);

    // rug of observed covariate values
    for (double v : rug)
        canvas.line(px(v), top + plotH - 6.0, px(v), top + plotH, "#666666", 1.0);

    // frame and ticks
    canvas.line(left, top, left, top + plotH, "#222222", 1.0);
    canvas.line(left, top + plotH, left + plotW, top + plotH, "#222222", 1.0);
    const AxisTicks xt = niceTicks(xLo, xHi);
    for (std::size_t i = 0; i < xt.values.size(); ++i) {
        const double x = px(xt.values[i]);
        canvas.line(x, top + plotH, x, top + plotH + 4.0, "#222222", 1.0);
        canvas.text(x, top + plotH + 17.0, xt.labels[i], 10.0, "middle");
    }
    const AxisTicks yt = niceTicks(yLo, yHi);
    for (std::size_t i = 0; i < yt.values.size(); ++i) {
        const double y = py(yt.values[i]);
        canvas.line(left - 4.0, y, left, y, "#222222", 1.0);
        canvas.text(left - 7.0, y + 3.5, yt.labels[i], 10.0, "end");
    }
    canvas.text(left + plotW / 2.0, height - 14.0, effect.covariate, 12.0, "middle");
    canvas.text(left, top - 12.0, "partial effect on " + response, 12.0, "start");
    writeTextFile(path, canvas.finish());
}

}  // namespace

StageResult cmdPlotPartials(const RunConfig& config) {
    StageTimer timer;
    std::vector<std::string> fitPaths;
    if (fs::exists(config.outDir)) {
        for (const auto& entry : fs::directory_iterator(config.outDir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("gamfit_", 0) == 0 && entry.path().extension() == ".json")
                fitPaths.push_back(entry.path().string());
        }
    }
    std::sort(fitPaths.begin(), fitPaths.end());
    if (fitPaths.empty())
        fail("E_IO", "no GAM fit artifact in " + config.outDir +
                         "; run regress with a smooth formula first");

    StageResult stage;
    stage.stage = "plot-partials";
    json sidecar = json::array();
    std::size_t plots = 0;
    for (const auto& path : fitPaths) {
        const json j = readJsonFile(path);
        const auto fit = gamFitFromJson(j);
        const std::string fitName = j.value("name", "fit");
        if (fit.smooths.empty()) continue;
        for (const auto& smooth : fit.smooths) {
            const auto effect =
                stats::partialEffects(fit, smooth.name, config.regress.gridSize);
            const std::string svgPath =
                config.outDir + "/partial_" + fitName + "_" + smooth.name + ".svg";
            renderPartialSvg(effect, smooth.rug, fit.responseName, svgPath);
            stage.artifacts.push_back(svgPath);
            sidecar.push_back({{"fit", fitName},
                               {"covariate", smooth.name},
                               {"slope_sign", effect.slopeSign},
                               {"x_min", smooth.xMin},
                               {"x_max", smooth.xMax}});
            ++plots;
        }
    }
    if (plots == 0)
        fail("E_INVALID_ARG", "the GAM fit artifacts contain no smooth terms to plot");

    const std::string sidecarPath = config.outDir + "/partials.json";
    writeJsonFile(sidecarPath, {{"config_hash", config.hashHex()}, {"plots", sidecar}});
    stage.artifacts.push_back(sidecarPath);
    stage.seconds = timer.seconds();
    stage.summary = std::to_string(plots) + " partial-effect plot(s)";
    updateManifest(config, stage);
    return stage;
}

}  // namespace durkit::pipeline
