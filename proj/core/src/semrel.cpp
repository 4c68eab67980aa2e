#include "durkit/semrel.hpp"

#include <cmath>

#include "durkit/common.hpp"

namespace durkit::semrel {

double cosineSimilarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        fail("E_DIM_MISMATCH", "cosine similarity of vectors with dimensions " +
                                   std::to_string(u.size()) + " and " +
                                   std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double pairWeight(int di, int dj) {
    return 2.0 / static_cast<double>(di + dj + 1);
}

ScoreResult semanticRelevance(const ContextWindow& window,
                              const corpus::EmbeddingTable& embeddings,
                              const Options& options) {
    if (window.context.empty()) return {0.0, ScoreStatus::EmptyContext};

    const std::vector<double>* target = embeddings.find(window.target);
    if (!target) return {0.0, ScoreStatus::MissingTarget};

    const int m = static_cast<int>(window.context.size());
    // vectors[d] is the word at distance d from the target; index 0 = target
    std::vector<const std::vector<double>*> vectors(static_cast<std::size_t>(m) + 1, nullptr);
    vectors[0] = target;
    for (int d = 1; d <= m; ++d)
        vectors[static_cast<std::size_t>(d)] =
            embeddings.find(window.context[static_cast<std::size_t>(m - d)]);

    auto simAt = [&](int a, int b) -> double {
        const auto* va = vectors[static_cast<std::size_t>(a)];
        const auto* vb = vectors[static_cast<std::size_t>(b)];
        if (!va || !vb) return 0.0;  // missing context embedding contributes nothing
        return cosineSimilarity(*va, *vb);
    };

    double score = 0.0;
    for (int d = 1; d <= m; ++d) score += simAt(0, d) * pairWeight(0, d);
    for (int di = 1; di <= m; ++di) {
        for (int dj = di + 1; dj <= m; ++dj) {
            if (dj - di > 1 && !options.includeNonadjacentContextPairs) continue;
            score += simAt(di, dj) * pairWeight(di, dj);
        }
    }
    return {score, ScoreStatus::Ok};
}

RelevanceSeries annotateCorpus(const std::vector<corpus::CorpusRecord>& records,
                               const corpus::EmbeddingTable& embeddings,
                               const Options& options, int threads) {
    RelevanceSeries series;
    series.scores.assign(records.size(), 0.0);
    series.status.assign(records.size(), ScoreStatus::EmptyContext);

    parallelFor(records.size(), threads, [&](std::size_t i) {
        const auto& rec = records[i];
        ContextWindow window;
        window.target = rec.word;
        // walk backwards while staying inside the phrase and speaker stream
        std::vector<std::string> preceding;
        for (std::size_t back = 1;
             back <= i && static_cast<int>(preceding.size()) < options.windowSize; ++back) {
            const auto& prev = records[i - back];
            if (prev.speakerId != rec.speakerId || prev.phraseId != rec.phraseId) break;
            preceding.push_back(prev.word);
        }
        // preceding is nearest-first; the window wants nearest-last
        window.context.assign(preceding.rbegin(), preceding.rend());
        const ScoreResult r = semanticRelevance(window, embeddings, options);
        series.scores[i] = r.score;
        series.status[i] = r.status;
    });
    return series;
}

}  // namespace durkit::semrel
