#include "durkit/pipeline/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "durkit/common.hpp"
#include "durkit/corpus.hpp"
#include "durkit/semrel.hpp"

namespace durkit::pipeline {

namespace {

struct Syllable {
    const char* phones[2];
    const char* letters;
};

// consonant-vowel inventory; letters roughly mirror the phones
const Syllable kSyllables[] = {
    {{"b", "aa"}, "ba"},   {{"d", "eh"}, "de"},   {{"f", "ih"}, "fi"},
    {{"g", "ow"}, "go"},   {{"h", "ae"}, "ha"},   {{"k", "iy"}, "kee"},
    {{"l", "uw"}, "loo"},  {{"m", "ey"}, "may"},  {{"n", "ah"}, "nu"},
    {{"p", "er"}, "per"},  {{"r", "aa"}, "ra"},   {{"s", "eh"}, "se"},
    {{"t", "ih"}, "ti"},   {{"v", "ow"}, "vo"},   {{"w", "ae"}, "wa"},
    {{"z", "iy"}, "zee"},  {{"sh", "uw"}, "shoo"}, {{"ch", "ey"}, "chay"},
    {{"th", "ah"}, "thu"}, {{"jh", "er"}, "jer"}};

struct Word {
    std::string text;
    std::vector<std::string> phones;
    int syllables = 0;
    uint64_t count = 0;   // lexicon frequency
    int cluster = 0;
    std::vector<double> vector;
};

struct Speaker {
    std::string id;
    std::string sex;
    std::string age;
    double rate = 1.0;        // fast speakers compress durations
    double durationOffset = 0.0;
};

std::vector<Word> buildVocabulary(const SynthConfig& config, Rng& rng) {
    const std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);
    std::vector<Word> vocab;
    std::set<std::string> seen;
    for (std::size_t rank = 0; vocab.size() < config.vocabulary; ++rank) {
        // word length grows with frequency rank, so frequent words are short
        const double rel = static_cast<double>(vocab.size()) /
                           static_cast<double>(config.vocabulary);
        int syllables = 1 + static_cast<int>(rel * 4.0);
        if (rng.uniform() < 0.3) syllables += 1;
        syllables = std::min(syllables, 6);

        Word w;
        for (int s = 0; s < syllables; ++s) {
            const auto& syl = kSyllables[rng.uniformIndex(kSyllableCount)];
            w.text += syl.letters;
            w.phones.push_back(syl.phones[0]);
            w.phones.push_back(syl.phones[1]);
        }
        if (!seen.insert(w.text).second) continue;  // keep words unique
        w.syllables = syllables;
        // power-law counts by rank
        w.count = static_cast<uint64_t>(
            std::max(1.0, 60000.0 / std::pow(static_cast<double>(vocab.size()) + 2.0, 1.08)));
        w.cluster = static_cast<int>(vocab.size()) % config.clusters;
        vocab.push_back(std::move(w));
    }
    return vocab;
}

void buildEmbeddings(std::vector<Word>& vocab, const SynthConfig& config, Rng& rng) {
    std::vector<std::vector<double>> centers;
    for (int c = 0; c < config.clusters; ++c) {
        std::vector<double> center(config.embeddingDim);
        for (auto& v : center) v = rng.normal(0.0, 1.0);
        centers.push_back(center);
    }
    for (auto& w : vocab) {
        w.vector.resize(config.embeddingDim);
        for (std::size_t d = 0; d < config.embeddingDim; ++d)
            w.vector[d] = centers[static_cast<std::size_t>(w.cluster)][d] +
                          rng.normal(0.0, 0.35);
    }
}

std::vector<Speaker> buildSpeakers(const SynthConfig& config, Rng& rng) {
    std::vector<Speaker> speakers;
    for (int s = 0; s < config.speakers; ++s) {
        Speaker sp;
        sp.id = "s" + std::string(s < 9 ? "0" : "") + std::to_string(s + 1);
        sp.sex = s % 2 == 0 ? "female" : "male";
        sp.age = (s / 2) % 2 == 0 ? "young" : "old";
        sp.rate = rng.uniform(0.88, 1.18);
        sp.durationOffset = rng.normal(0.0, 0.012);
        speakers.push_back(sp);
    }
    return speakers;
}

/// Sample a word index, biased toward the phrase topic's cluster.
std::size_t sampleWord(const std::vector<Word>& vocab,
                       const std::vector<std::vector<std::size_t>>& byCluster, int topic,
                       uint64_t totalCount, Rng& rng) {
    if (rng.uniform() < 0.72) {
        const auto& members = byCluster[static_cast<std::size_t>(topic)];
        // weight members by frequency within the topic
        uint64_t clusterTotal = 0;
        for (std::size_t i : members) clusterTotal += vocab[i].count;
        uint64_t pick = static_cast<uint64_t>(rng.uniform() * static_cast<double>(clusterTotal));
        for (std::size_t i : members) {
            if (pick < vocab[i].count) return i;
            pick -= vocab[i].count;
        }
        return members.back();
    }
    uint64_t pick = static_cast<uint64_t>(rng.uniform() * static_cast<double>(totalCount));
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (pick < vocab[i].count) return i;
        pick -= vocab[i].count;
    }
    return vocab.size() - 1;
}

}  // namespace

SynthResult generateSyntheticCorpus(const SynthConfig& config, uint64_t seed,
                                    const std::string& outDir) {
    if (config.tokens < 100) fail("E_INVALID_ARG", "synthetic corpus needs >= 100 tokens");
    if (config.speakers < 2) fail("E_INVALID_ARG", "need at least 2 speakers");
    namespace fs = std::filesystem;
    fs::create_directories(outDir);

    Rng master = Rng::seeded(seed);
    Rng vocabRng = master.fork(1);
    Rng speakerRng = master.fork(2);
    Rng textRng = master.fork(3);
    Rng noiseRng = master.fork(4);

    std::vector<Word> vocab = buildVocabulary(config, vocabRng);
    buildEmbeddings(vocab, config, vocabRng);
    const std::vector<Speaker> speakers = buildSpeakers(config, speakerRng);

    std::vector<std::vector<std::size_t>> byCluster(
        static_cast<std::size_t>(config.clusters));
    uint64_t totalCount = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        byCluster[static_cast<std::size_t>(vocab[i].cluster)].push_back(i);
        totalCount += vocab[i].count;
    }
    const double meanLogCount = [&] {
        double s = 0.0;
        for (const auto& w : vocab) s += std::log(static_cast<double>(w.count) + 1.0);
        return s / static_cast<double>(vocab.size());
    }();

    // embedding lookup for scoring relevance during generation
    corpus::EmbeddingTable table;
    table.dimension = config.embeddingDim;
    for (const auto& w : vocab) table.vectors[w.text] = w.vector;

    std::vector<corpus::CorpusRecord> records;
    records.reserve(config.tokens);
    const std::size_t perSpeaker = config.tokens / static_cast<std::size_t>(config.speakers);

    for (std::size_t s = 0; s < speakers.size(); ++s) {
        const Speaker& speaker = speakers[s];
        double clock = 1.0 + static_cast<double>(s);
        int tokenIndex = 0;
        int phraseIndex = 0;
        std::size_t produced = 0;
        const std::size_t target =
            s + 1 == speakers.size() ? config.tokens - perSpeaker * s : perSpeaker;

        while (produced < target) {
            const int topic = static_cast<int>(textRng.uniformIndex(
                static_cast<std::size_t>(config.clusters)));
            const std::size_t phraseLen =
                std::min<std::size_t>(3 + textRng.uniformIndex(8), target - produced);
            const std::string phraseId =
                speaker.id + ":p" + std::to_string(phraseIndex++);
            std::vector<std::string> recent;

            for (std::size_t wpos = 0; wpos < phraseLen; ++wpos) {
                const std::size_t pick =
                    sampleWord(vocab, byCluster, topic, totalCount, textRng);
                const Word& word = vocab[pick];

                // attention-aware relevance of this token to its phrase context
                semrel::ContextWindow window;
                window.target = word.text;
                const std::size_t ctx = std::min<std::size_t>(recent.size(), 3);
                window.context.assign(recent.end() - static_cast<long>(ctx), recent.end());
                const auto scored = semrel::semanticRelevance(window, table);
                const double relevance =
                    scored.status == semrel::ScoreStatus::Ok ? scored.score : 0.0;

                const double logCount =
                    std::log(static_cast<double>(word.count) + 1.0) - meanLogCount;
                double duration = 0.082 + 0.046 * static_cast<double>(word.syllables) -
                                  0.011 * logCount + 0.016 * relevance +
                                  speaker.durationOffset +
                                  (speaker.sex == "female" ? 0.006 : -0.006) +
                                  (speaker.age == "old" ? 0.004 : -0.004) +
                                  noiseRng.normal(0.0, 0.016);
                duration /= speaker.rate;
                duration = std::max(duration, 0.03);

                corpus::CorpusRecord rec;
                rec.tokenIndex = tokenIndex++;
                rec.word = word.text;
                rec.canonicalPhones = word.phones;
                // phonological reduction: drop non-initial phones, more at speed
                const double dropP = 0.05 + 0.10 * (speaker.rate - 0.88);
                for (std::size_t p = 0; p < word.phones.size(); ++p) {
                    if (p > 0 && word.phones.size() > 2 && noiseRng.uniform() < dropP)
                        continue;
                    rec.realizedPhones.push_back(word.phones[p]);
                }
                rec.hasRealizedPhones = true;
                duration -= 0.004 * static_cast<double>(word.phones.size() -
                                                        rec.realizedPhones.size());
                duration = std::max(duration, 0.03);
                rec.startS = clock;
                rec.endS = clock + duration;
                clock = rec.endS + (wpos + 1 == phraseLen ? 0.35 : 0.0);
                rec.phraseId = phraseId;
                rec.speakerId = speaker.id;
                rec.sex = speaker.sex;
                rec.age = speaker.age;
                records.push_back(std::move(rec));
                recent.push_back(word.text);
                ++produced;
            }
        }
    }

    SynthResult result;
    result.tokens = records.size();
    result.vocabulary = vocab.size();
    result.corpusPath = outDir + "/corpus.tsv";
    result.lexiconPath = outDir + "/lexicon.tsv";
    result.embeddingsPath = outDir + "/embeddings.txt";

    {
        std::ofstream out(result.corpusPath);
        if (!out) fail("E_IO", "cannot write " + result.corpusPath);
        corpus::writeCorpus(records, out);
    }
    {
        std::ofstream out(result.lexiconPath);
        if (!out) fail("E_IO", "cannot write " + result.lexiconPath);
        // frequency list ordered by descending count, merged duplicates
        std::map<std::string, uint64_t> counts;
        for (const auto& w : vocab) counts[w.text] += w.count;
        std::vector<std::pair<std::string, uint64_t>> ordered(counts.begin(), counts.end());
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [text, count] : ordered) out << text << '\t' << count << '\n';
    }
    {
        std::ofstream out(result.embeddingsPath);
        if (!out) fail("E_IO", "cannot write " + result.embeddingsPath);
        out << vocab.size() << ' ' << config.embeddingDim << '\n';
        for (const auto& w : vocab) {
            out << w.text;
            for (double v : w.vector) out << ' ' << formatShortest(v);
            out << '\n';
        }
    }
    return result;
}

}  // namespace durkit::pipeline
