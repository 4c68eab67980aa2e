#pragma once

#include <string>
#include <vector>

#include "durkit/pipeline/config.hpp"

namespace durkit::pipeline {

/// Planted structure of the generated corpus, asserted by the smoke tests:
/// word length falls with frequency rank, syllable count tracks length,
/// durations grow with syllables and shrink with frequency and speech rate.
struct SynthSigns {
    static constexpr double kWordLengthVsLogFreq = -1.0;
    static constexpr double kWordLengthVsCiteLength = 1.0;
    static constexpr double kDurationVsLogFreq = -1.0;
    static constexpr double kDurationVsWordLength = 1.0;
};

struct SynthResult {
    std::string corpusPath;
    std::string lexiconPath;
    std::string embeddingsPath;
    std::size_t tokens = 0;
    std::size_t vocabulary = 0;
};

/// Writes corpus.tsv, lexicon.tsv, and embeddings.txt under outDir.
/// Deterministic for a fixed config: speakers carry their own rate and
/// duration offsets, phrases are topically coherent through planted
/// embedding clusters, and word frequencies follow a power law.
SynthResult generateSyntheticCorpus(const SynthConfig& config, uint64_t seed,
                                    const std::string& outDir);

}  // namespace durkit::pipeline
