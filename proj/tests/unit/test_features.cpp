#include <doctest.h>

#include <cmath>
#include <sstream>

#include "durkit/common.hpp"
#include "durkit/features.hpp"

using namespace durkit;
using namespace durkit::feat;
using durkit::corpus::CorpusRecord;

namespace {

CorpusRecord makeRecord(const std::string& word, double start, double end,
                        std::vector<std::string> canonical = {},
                        std::vector<std::string> realized = {}) {
    CorpusRecord r;
    r.word = word;
    r.startS = start;
    r.endS = end;
    r.speakerId = "s01";
    r.sex = "female";
    r.age = "young";
    r.phraseId = "p0";
    r.canonicalPhones = std::move(canonical);
    if (!realized.empty()) {
        r.realizedPhones = std::move(realized);
        r.hasRealizedPhones = true;
    }
    return r;
}

corpus::FrequencyLexicon lexiconOf(std::initializer_list<std::pair<std::string, uint64_t>> items) {
    corpus::FrequencyLexicon lex;
    for (const auto& [w, c] : items) {
        lex.counts[w] += c;
        lex.total += c;
    }
    return lex;
}

}  // namespace

TEST_CASE("word_length counts letters only") {
    CHECK(wordLength(makeRecord("water", 0, 1)) == 5);
    CHECK(wordLength(makeRecord("i", 0, 1)) == 1);
    CHECK(wordLength(makeRecord("don't", 0, 1)) == 4);
}

TEST_CASE("log_word_frequency matches the smoothed per-million formula") {
    auto lex = lexiconOf({{"a", 9}});
    CHECK(logWordFrequency("a", lex) == doctest::Approx(std::log(1e6)).epsilon(1e-12));
    CHECK(logWordFrequency("zzz", lex) ==
          doctest::Approx(std::log(0.1 * 1e6)).epsilon(1e-12));

    auto lex2 = lexiconOf({{"x", 4}, {"y", 4}});
    CHECK(logWordFrequency("x", lex2) == doctest::Approx(logWordFrequency("y", lex2)));
}

TEST_CASE("log_word_frequency is strictly increasing in count") {
    auto lex = lexiconOf({{"rare", 1}, {"mid", 10}, {"common", 100}});
    const double a = logWordFrequency("rare", lex);
    const double b = logWordFrequency("mid", lex);
    const double c = logWordFrequency("common", lex);
    CHECK(a < b);
    CHECK(b < c);
}

TEST_CASE("cite_length counts vowel nuclei") {
    CHECK(citeLength(makeRecord("water", 0, 1, {"w", "aa", "dx", "er"})) == 2);
    CHECK(citeLength(makeRecord("the", 0, 1, {"dh", "ah"})) == 1);
    CHECK(citeLength(makeRecord("s", 0, 1, {"s"})) == 0);
    // stress digits are ignored
    CHECK(citeLength(makeRecord("bee", 0, 1, {"b", "iy1"})) == 1);
}

TEST_CASE("phrase_rate is words per second over the phrase span") {
    std::vector<CorpusRecord> recs;
    for (int i = 0; i < 4; ++i)
        recs.push_back(makeRecord("w" + std::to_string(i), 0.5 * i, 0.5 * i + 0.5));
    std::vector<const CorpusRecord*> phrase;
    for (auto& r : recs) phrase.push_back(&r);
    CHECK(phraseRate(phrase) == doctest::Approx(2.0));

    CorpusRecord solo = makeRecord("hi", 1.0, 1.5);
    CHECK(phraseRate({&solo}) == doctest::Approx(2.0));

    CorpusRecord degenerate = makeRecord("x", 1.0, 1.0);
    CHECK_THROWS_WITH_AS(phraseRate({&degenerate}), doctest::Contains("degenerate"), Error);
}

TEST_CASE("deletion_count uses a minimal alignment") {
    CHECK(editDeletions({"w", "ah", "dx", "er"}, {"w", "ah", "er"}) == 1);
    CHECK(editDeletions({"k", "ae", "t"}, {"k", "ae", "t"}) == 0);
    CHECK(editDeletions({"k", "ae", "t"}, {}) == 3);

    auto rec = makeRecord("word", 0, 1, {"w", "er", "d"});
    CHECK(!deletionCount(rec).has_value());
    rec.deletionsOverride = 2;
    CHECK(deletionCount(rec) == 2);
}

TEST_CASE("deletion_count shrinks as realized approaches canonical") {
    const std::vector<std::string> canonical = {"s", "t", "r", "iy", "t"};
    std::vector<std::string> realized;
    int last = editDeletions(canonical, realized);
    CHECK(last == 5);
    for (const auto& p : canonical) {
        realized.push_back(p);
        const int d = editDeletions(canonical, realized);
        CHECK(d <= last);
        last = d;
    }
    CHECK(last == 0);
}

TEST_CASE("make_bins places edges at linear-interpolation quantiles") {
    std::vector<double> durations;
    for (int i = 1; i <= 10; ++i) durations.push_back(i);
    auto spec = makeBins(durations, 5);
    REQUIRE(spec.edges.size() == 6);
    const double expected[] = {1.0, 2.8, 4.6, 6.4, 8.2, 10.0};
    for (int i = 0; i < 6; ++i) CHECK(spec.edges[i] == doctest::Approx(expected[i]));
    CHECK(spec.labels.front() == "1");
    CHECK(spec.labels.back() == "5");
}

TEST_CASE("make_bins rejects constant samples") {
    std::vector<double> durations(20, 0.25);
    CHECK_THROWS_WITH_AS(makeBins(durations, 4),
                         doctest::Contains("insufficient distinct quantiles"), Error);
}

TEST_CASE("assign_bin boundary rules") {
    std::vector<double> durations;
    for (int i = 1; i <= 10; ++i) durations.push_back(i);
    auto spec = makeBins(durations, 5);
    CHECK(assignBin(1.0, spec) == "1");    // minimum, include_lowest
    CHECK(assignBin(10.0, spec) == "5");   // maximum, upper inclusive
    CHECK(assignBin(2.8, spec) == "1");    // interior edge goes down
    CHECK(assignBin(0.5, spec) == kOutOfRangeLabel);
    CHECK(assignBin(11.0, spec) == kOutOfRangeLabel);
}

TEST_CASE("median split balances counts within one") {
    Rng rng = Rng::seeded(99);
    std::vector<double> durations;
    for (int i = 0; i < 101; ++i) durations.push_back(rng.uniform());
    auto spec = makeBins(durations, 2);
    int low = 0, high = 0;
    for (double d : durations) (assignBin(d, spec) == "1" ? low : high)++;
    CHECK(std::abs(low - high) <= 1);
}

TEST_CASE("bin occupancy stays within one of n/k for tie-free samples") {
    Rng rng = Rng::seeded(123);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 60 + static_cast<int>(rng.uniformIndex(200));
        const int k = 2 + static_cast<int>(rng.uniformIndex(6));
        std::vector<double> durations;
        for (int i = 0; i < n; ++i) durations.push_back(rng.uniform(0.05, 1.2));
        auto spec = makeBins(durations, k);
        std::map<std::string, int> counts;
        for (double d : durations) counts[assignBin(d, spec)]++;
        for (const auto& label : spec.labels) {
            const double ideal = static_cast<double>(n) / k;
            CHECK(std::abs(counts[label] - ideal) <= 1.0);
        }
    }
}

namespace {

struct Fixture {
    std::vector<CorpusRecord> records;
    corpus::FrequencyLexicon lexicon;
    semrel::RelevanceSeries relevance;
};

Fixture smallCorpus() {
    Fixture f;
    const char* words[] = {"give", "me", "some", "water", "now",
                           "the",  "cat", "sat",  "on",    "mats"};
    for (int i = 0; i < 10; ++i) {
        auto r = makeRecord(words[i], 0.31 * i, 0.31 * i + 0.2 + 0.011 * i,
                            {"k", "ae", "t"}, {"k", "ae", "t"});
        r.tokenIndex = i;
        r.phraseId = i < 5 ? "p0" : "p1";
        f.records.push_back(r);
        f.lexicon.counts[words[i]] += 5 + i;
        f.lexicon.total += 5 + i;
    }
    f.relevance.scores.assign(10, 0.5);
    f.relevance.status.assign(10, semrel::ScoreStatus::Ok);
    return f;
}

}  // namespace

TEST_CASE("assemble builds requested columns with zero drops on clean data") {
    auto f = smallCorpus();
    AssemblyOptions opts;
    opts.features = {"WordLength", "LogWordFreq"};
    AssemblyReport rep;
    auto table = assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, &rep);
    CHECK(table.numericNames.size() == 2);
    CHECK(rep.rowsDropped == 0);
    CHECK(table.nRows == 10);
    CHECK(table.hasLabels());
}

TEST_CASE("assemble drops rows lacking phones when CiteLength is requested") {
    auto f = smallCorpus();
    f.records[3].canonicalPhones.clear();
    AssemblyOptions opts;
    opts.features = {"CiteLength"};
    AssemblyReport rep;
    auto table = assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, &rep);
    CHECK(rep.rowsDropped == 1);
    CHECK(table.nRows == 9);
}

TEST_CASE("assemble computes the full default feature set") {
    auto f = smallCorpus();
    AssemblyOptions opts;
    opts.features = AssemblyOptions::defaultFeatures();
    auto table = assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, nullptr);
    CHECK(table.numericNames.size() == 7);
    CHECK(table.hasLabels());
    CHECK(table.categoricalNames.size() == 3);
}

TEST_CASE("assemble rejects unknown feature names") {
    auto f = smallCorpus();
    AssemblyOptions opts;
    opts.features = {"WordLenght"};
    CHECK_THROWS_WITH_AS(assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, nullptr),
                         doctest::Contains("WordLenght"), Error);
}

TEST_CASE("assembly is deterministic and serialization round-trips") {
    auto f = smallCorpus();
    AssemblyOptions opts;
    opts.features = AssemblyOptions::defaultFeatures();
    auto t1 = assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, nullptr);
    auto t2 = assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, nullptr);

    std::ostringstream s1, s2;
    writeFeatureTable(t1, s1);
    writeFeatureTable(t2, s2);
    CHECK(s1.str() == s2.str());

    std::istringstream in(s1.str());
    auto back = readFeatureTable(in);
    CHECK(back.nRows == t1.nRows);
    CHECK(back.numericNames == t1.numericNames);
    for (std::size_t c = 0; c < t1.numericColumns.size(); ++c)
        for (std::size_t r = 0; r < t1.nRows; ++r)
            CHECK(back.numericColumns[c][r] == t1.numericColumns[c][r]);
    CHECK(back.labels == t1.labels);
    CHECK(back.rowProvenance == t1.rowProvenance);
}

TEST_CASE("phrase rates differ across phrases and repeat within one") {
    auto f = smallCorpus();
    AssemblyOptions opts;
    opts.features = {"PhraseRate"};
    auto table = assembleFeatureTable(f.records, f.lexicon, f.relevance, opts, nullptr);
    const auto& rate = table.numeric("PhraseRate");
    CHECK(rate[0] == rate[1]);
    CHECK(rate[0] == rate[4]);
    CHECK(rate[5] == rate[9]);
    CHECK(rate[0] != rate[5]);
}
