#include "durkit/pipeline/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "durkit/common.hpp"
#include "durkit/features.hpp"

namespace durkit::pipeline {

using nlohmann::json;

const char* const kToolVersion = "durkit 0.1.0";

std::string RunConfig::resolvedCorpus() const {
    return corpusPath.empty() ? outDir + "/corpus.tsv" : corpusPath;
}
std::string RunConfig::resolvedLexicon() const {
    return lexiconPath.empty() ? outDir + "/lexicon.tsv" : lexiconPath;
}
std::string RunConfig::resolvedEmbeddings() const {
    return embeddingsPath.empty() ? outDir + "/embeddings.txt" : embeddingsPath;
}

namespace {

json gridToJson(const std::vector<std::pair<std::string, std::vector<std::string>>>& grid) {
    json out = json::array();
    for (const auto& [name, values] : grid) out.push_back({{"name", name}, {"values", values}});
    return out;
}

}  // namespace

std::string RunConfig::canonicalJson() const {
    // out_dir and defaulted input paths stay out of the hash: the hash
    // names the analysis, and relocating a run must not change it
    json j;
    j["seed"] = seed;
    j["corpus"] = corpusPath;
    j["lexicon"] = lexiconPath;
    j["embeddings"] = embeddingsPath;
    j["features"] = features.empty() ? feat::AssemblyOptions::defaultFeatures() : features;
    j["k_bins"] = kBins;
    j["window_m"] = windowSize;
    j["classify"] = {{"model", classify.model},
                     {"test_fraction", classify.testFraction},
                     {"features", classify.features},
                     {"optimize", classify.optimize},
                     {"select_k", classify.selectK},
                     {"smote_k", classify.smoteK},
                     {"folds", classify.folds},
                     {"grid", gridToJson(classify.grid)}};
    j["regress"] = {{"formulas", regress.formulas},
                    {"basis_dim", regress.basisDim},
                    {"grid_size", regress.gridSize}};
    j["synth"] = {{"tokens", synth.tokens},
                  {"speakers", synth.speakers},
                  {"vocabulary", synth.vocabulary},
                  {"embedding_dim", synth.embeddingDim},
                  {"clusters", synth.clusters}};
    j["correlate_columns"] = correlateColumns;
    // threads deliberately excluded: results must not depend on them
    return j.dump();
}

std::string RunConfig::hashHex() const {
    std::ostringstream os;
    os << std::hex << fnv1a(canonicalJson());
    return os.str();
}

namespace {

void rejectUnknownKeys(const json& j, const std::set<std::string>& known,
                       const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key))
            fail("E_CONFIG", "unknown config key '" + key + "' in " + where);
    }
}

std::vector<std::string> stringList(const json& j, const std::string& where) {
    if (!j.is_array()) fail("E_CONFIG", where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j) out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

RunConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("E_IO", "cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("E_CONFIG", "config '" + path + "' is not valid JSON: " + e.what());
    }

    RunConfig config;
    rejectUnknownKeys(j, {"seed", "out_dir", "threads", "corpus", "lexicon", "embeddings",
                          "features", "k_bins", "window_m", "classify", "regress", "synth",
                          "correlate_columns"},
                      "top level");
    if (j.contains("seed")) config.seed = j["seed"].get<uint64_t>();
    if (j.contains("out_dir")) config.outDir = j["out_dir"].get<std::string>();
    if (j.contains("threads")) config.threads = j["threads"].get<int>();
    if (j.contains("corpus")) config.corpusPath = j["corpus"].get<std::string>();
    if (j.contains("lexicon")) config.lexiconPath = j["lexicon"].get<std::string>();
    if (j.contains("embeddings")) config.embeddingsPath = j["embeddings"].get<std::string>();
    if (j.contains("features")) config.features = stringList(j["features"], "features");
    if (j.contains("k_bins")) config.kBins = j["k_bins"].get<int>();
    if (j.contains("window_m")) config.windowSize = j["window_m"].get<int>();

    if (j.contains("classify")) {
        const json& c = j["classify"];
        rejectUnknownKeys(c, {"model", "test_fraction", "features", "optimize", "select_k",
                              "smote_k", "folds", "grid"},
                          "classify");
        if (c.contains("model")) config.classify.model = c["model"].get<std::string>();
        if (c.contains("test_fraction"))
            config.classify.testFraction = c["test_fraction"].get<double>();
        if (c.contains("features"))
            config.classify.features = stringList(c["features"], "classify.features");
        if (c.contains("optimize")) config.classify.optimize = c["optimize"].get<bool>();
        if (c.contains("select_k")) config.classify.selectK = c["select_k"].get<int>();
        if (c.contains("smote_k")) config.classify.smoteK = c["smote_k"].get<int>();
        if (c.contains("folds")) config.classify.folds = c["folds"].get<int>();
        if (c.contains("grid")) {
            if (!c["grid"].is_object()) fail("E_CONFIG", "classify.grid must be an object");
            for (const auto& [axis, values] : c["grid"].items())
                config.classify.grid.push_back(
                    {axis, stringList(values, "classify.grid." + axis)});
        }
    }
    if (j.contains("regress")) {
        const json& r = j["regress"];
        rejectUnknownKeys(r, {"formulas", "basis_dim", "grid_size"}, "regress");
        if (r.contains("formulas"))
            config.regress.formulas = stringList(r["formulas"], "regress.formulas");
        if (r.contains("basis_dim")) config.regress.basisDim = r["basis_dim"].get<int>();
        if (r.contains("grid_size")) config.regress.gridSize = r["grid_size"].get<int>();
    }
    if (j.contains("synth")) {
        const json& s = j["synth"];
        rejectUnknownKeys(s, {"tokens", "speakers", "vocabulary", "embedding_dim", "clusters"},
                          "synth");
        if (s.contains("tokens")) config.synth.tokens = s["tokens"].get<std::size_t>();
        if (s.contains("speakers")) config.synth.speakers = s["speakers"].get<int>();
        if (s.contains("vocabulary"))
            config.synth.vocabulary = s["vocabulary"].get<std::size_t>();
        if (s.contains("embedding_dim"))
            config.synth.embeddingDim = s["embedding_dim"].get<std::size_t>();
        if (s.contains("clusters")) config.synth.clusters = s["clusters"].get<int>();
    }
    if (j.contains("correlate_columns"))
        config.correlateColumns = stringList(j["correlate_columns"], "correlate_columns");
    return config;
}

void requireInputs(const RunConfig& config, bool corpus, bool lexicon, bool embeddings) {
    namespace fs = std::filesystem;
    auto check = [](const std::string& path, const char* what) {
        if (!fs::exists(path))
            fail("E_IO", std::string(what) + " path does not exist: " + path);
    };
    if (corpus) check(config.resolvedCorpus(), "corpus");
    if (lexicon) check(config.resolvedLexicon(), "lexicon");
    if (embeddings) check(config.resolvedEmbeddings(), "embeddings");
}

}  // namespace durkit::pipeline
