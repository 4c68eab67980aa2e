#include <CLI11.hpp>
#include <iostream>

#include "durkit/common.hpp"
#include "durkit/pipeline/commands.hpp"

namespace {

using durkit::pipeline::RunConfig;
using durkit::pipeline::StageResult;

struct GlobalFlags {
    std::string configPath;
    std::optional<uint64_t> seed;
    std::optional<std::string> outDir;
    std::optional<int> threads;
};

RunConfig effectiveConfig(const GlobalFlags& flags) {
    RunConfig config;
    if (!flags.configPath.empty()) config = durkit::pipeline::loadConfig(flags.configPath);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.outDir) config.outDir = *flags.outDir;
    if (flags.threads) config.threads = *flags.threads;
    return config;
}

void printStage(const StageResult& result) {
    std::cout << result.stage << ": " << result.summary << " ["
              << durkit::formatDouble(result.seconds, 2) << "s]\n";
    for (const auto& artifact : result.artifacts) std::cout << "  " << artifact << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"word-duration corpus analytics: ML and mixed-model tracks"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.configPath, "JSON run configuration");
    app.add_option("--seed", flags.seed, "master random seed");
    app.add_option("--out-dir", flags.outDir, "artifact directory");
    app.add_option("--threads", flags.threads, "worker threads (results do not depend on this)");

    auto* synth = app.add_subcommand("synth", "generate the bundled synthetic mini-corpus");
    std::optional<std::size_t> synthTokens;
    synth->add_option("--tokens", synthTokens, "token count");

    auto* ingest = app.add_subcommand("ingest", "parse and validate corpus/lexicon/embeddings");
    auto* features = app.add_subcommand("features", "derive the analysis feature table");
    std::optional<int> kBins;
    std::optional<int> window;
    features->add_option("--k-bins", kBins, "duration range count");
    features->add_option("--window", window, "relevance context window");

    auto* annotate = app.add_subcommand("annotate", "write per-token semantic relevance scores");
    annotate->add_option("--window", window, "relevance context window");

    auto* classify = app.add_subcommand("classify", "train and score duration-range classifiers");
    std::optional<std::string> model;
    bool optimize = false;
    classify->add_option("--model", model, "rf or svm");
    classify->add_flag("--optimize", optimize, "run the scale/select/smote/grid pipeline");

    auto* regress = app.add_subcommand("regress", "fit mixed and additive models, compare AIC");
    std::vector<std::string> formulas;
    regress->add_option("--formula", formulas, "model formula (repeatable)");

    auto* correlate = app.add_subcommand("correlate", "Pearson correlation matrix and heatmap");
    auto* plotPartials =
        app.add_subcommand("plot-partials", "render partial-effect SVGs from GAM fits");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = effectiveConfig(flags);
        if (synthTokens) config.synth.tokens = *synthTokens;
        if (kBins) config.kBins = *kBins;
        if (window) config.windowSize = *window;
        if (model) config.classify.model = *model;
        if (optimize) config.classify.optimize = true;
        if (!formulas.empty()) config.regress.formulas = formulas;

        StageResult result;
        if (synth->parsed()) result = durkit::pipeline::cmdSynth(config);
        else if (ingest->parsed()) result = durkit::pipeline::cmdIngest(config);
        else if (features->parsed()) result = durkit::pipeline::cmdFeatures(config);
        else if (annotate->parsed()) result = durkit::pipeline::cmdAnnotate(config);
        else if (classify->parsed()) result = durkit::pipeline::cmdClassify(config);
        else if (regress->parsed()) result = durkit::pipeline::cmdRegress(config);
        else if (correlate->parsed()) result = durkit::pipeline::cmdCorrelate(config);
        else if (plotPartials->parsed()) result = durkit::pipeline::cmdPlotPartials(config);
        printStage(result);
        return 0;
    } catch (const durkit::Error& e) {
        std::cerr << "error[" << e.code() << "] " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[E_INTERNAL] " << e.what() << "\n";
        return 1;
    }
}
