#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace durkit::pipeline {

struct ClassifyConfig {
    std::string model = "rf";  // rf | svm
    double testFraction = 0.25;
    std::vector<std::string> features = {"CiteLength", "Deletions", "WordLength",
                                         "LogWordFreq", "PhraseRate"};
    bool optimize = false;
    int selectK = 4;
    int smoteK = 5;
    int folds = 5;
    /// Hyperparameter grid axes; empty selects the stock grid per family.
    std::vector<std::pair<std::string, std::vector<std::string>>> grid;
};

struct RegressConfig {
    std::vector<std::string> formulas;
    int basisDim = 10;
    int gridSize = 100;  // partial-effect evaluation grid
};

struct SynthConfig {
    std::size_t tokens = 5000;
    int speakers = 8;
    std::size_t vocabulary = 420;
    std::size_t embeddingDim = 16;
    int clusters = 10;
};

struct RunConfig {
    uint64_t seed = 42;
    std::string outDir = "out";
    int threads = 1;
    std::string corpusPath;      // default: <out_dir>/corpus.tsv
    std::string lexiconPath;     // default: <out_dir>/lexicon.tsv
    std::string embeddingsPath;  // default: <out_dir>/embeddings.txt
    std::vector<std::string> features;  // default: the stock feature set
    int kBins = 5;
    int windowSize = 3;
    ClassifyConfig classify;
    RegressConfig regress;
    SynthConfig synth;
    std::vector<std::string> correlateColumns;  // default: all numeric

    std::string resolvedCorpus() const;
    std::string resolvedLexicon() const;
    std::string resolvedEmbeddings() const;

    /// Canonical JSON of the effective configuration.
    std::string canonicalJson() const;
    /// FNV-1a hash of canonicalJson(), hex-encoded.
    std::string hashHex() const;
};

/// Reads a JSON config file; unknown keys are rejected to catch typos.
RunConfig loadConfig(const std::string& path);

/// Validates paths needed by a stage before any work starts.
void requireInputs(const RunConfig& config, bool corpus, bool lexicon, bool embeddings);

extern const char* const kToolVersion;

}  // namespace durkit::pipeline
