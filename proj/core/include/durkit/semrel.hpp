#pragma once

#include <string>
#include <vector>

#include "durkit/corpus.hpp"

namespace durkit::semrel {

/// Cosine similarity, the similarity backing the relevance metric.
/// Zero-norm input gives 0 by convention; mismatched dimensions throw.
double cosineSimilarity(const std::vector<double>& u, const std::vector<double>& v);

/// Proximity weight for the pair at distances (di, dj) from the target
/// (target itself sits at distance 0, the adjacent word at 1):
///
///     w = 2 / (di + dj + 1)
///
/// which gives 1, 2/3, 1/2 for the target against context at distance
/// 1, 2, 3 and 1/2, 1/3 for the adjacent context pairs (1,2) and (2,3).
double pairWeight(int di, int dj);

/// A target word with its preceding context, nearest word last.
struct ContextWindow {
    std::string target;
    std::vector<std::string> context;  // context[k] sits at distance size()-k
};

enum class ScoreStatus { Ok, EmptyContext, MissingTarget };

struct ScoreResult {
    double score = 0.0;
    ScoreStatus status = ScoreStatus::Ok;
};

struct Options {
    int windowSize = 3;  // preceding words kept in the memory stack
    /// The metric sums consecutive context pairs only; this switch also
    /// adds the non-adjacent ones.
    bool includeNonadjacentContextPairs = false;
};

/// Attention-aware semantic relevance of the target to its context:
/// the weighted sum of target-context similarities plus the weighted
/// similarities of consecutive context pairs. Context words without an
/// embedding contribute 0; a target without one yields a flagged score.
ScoreResult semanticRelevance(const ContextWindow& window,
                              const corpus::EmbeddingTable& embeddings,
                              const Options& options = Options{});

struct RelevanceSeries {
    std::vector<double> scores;        // aligned with the record sequence
    std::vector<ScoreStatus> status;
};

/// Scores every record. Context windows never cross a phrase or speaker
/// boundary; the first word of a phrase therefore carries a flagged 0.
RelevanceSeries annotateCorpus(const std::vector<corpus::CorpusRecord>& records,
                               const corpus::EmbeddingTable& embeddings,
                               const Options& options = Options{}, int threads = 1);

}  // namespace durkit::semrel
