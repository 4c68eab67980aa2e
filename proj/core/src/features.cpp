#include "durkit/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "durkit/common.hpp"

namespace durkit::feat {

const char* const kOutOfRangeLabel = "out-of-range";

int FeatureTable::numericIndex(const std::string& name) const {
    for (std::size_t i = 0; i < numericNames.size(); ++i)
        if (numericNames[i] == name) return static_cast<int>(i);
    return -1;
}

int FeatureTable::categoricalIndex(const std::string& name) const {
    for (std::size_t i = 0; i < categoricalNames.size(); ++i)
        if (categoricalNames[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<double>& FeatureTable::numeric(const std::string& name) const {
    const int i = numericIndex(name);
    if (i < 0) fail("E_UNKNOWN_COLUMN", "no numeric column '" + name + "'");
    return numericColumns[static_cast<std::size_t>(i)];
}

const std::vector<std::string>& FeatureTable::categorical(const std::string& name) const {
    const int i = categoricalIndex(name);
    if (i < 0) fail("E_UNKNOWN_COLUMN", "no categorical column '" + name + "'");
    return categoricalColumns[static_cast<std::size_t>(i)];
}

void writeFeatureTable(const FeatureTable& table, std::ostream& out) {
    std::vector<std::string> header;
    header.push_back("row:prov");
    for (const auto& n : table.numericNames) header.push_back(n + ":num");
    for (const auto& n : table.categoricalNames) header.push_back(n + ":cat");
    if (table.hasLabels()) header.push_back("label:label");
    out << joinStrings(header, "\t") << '\n';

    for (std::size_t r = 0; r < table.nRows; ++r) {
        out << table.rowProvenance[r];
        for (const auto& col : table.numericColumns) out << '\t' << formatShortest(col[r]);
        for (const auto& col : table.categoricalColumns) out << '\t' << col[r];
        if (table.hasLabels()) out << '\t' << table.labels[r];
        out << '\n';
    }
}

FeatureTable readFeatureTable(std::istream& in) {
    std::string headerLine;
    if (!std::getline(in, headerLine)) fail("E_EMPTY", "feature table has no header");
    if (!headerLine.empty() && headerLine.back() == '\r') headerLine.pop_back();

    FeatureTable table;
    struct Col {
        enum Kind { Prov, Num, Cat, Label } kind;
        int slot;
    };
    std::vector<Col> layout;
    for (const auto& field : split(headerLine, '\t')) {
        const std::size_t colon = field.rfind(':');
        if (colon == std::string::npos)
            fail("E_SCHEMA", "feature header field '" + field + "' lacks a :kind suffix");
        const std::string name = field.substr(0, colon);
        const std::string kind = field.substr(colon + 1);
        if (kind == "prov") {
            layout.push_back({Col::Prov, 0});
        } else if (kind == "num") {
            layout.push_back({Col::Num, static_cast<int>(table.numericNames.size())});
            table.numericNames.push_back(name);
            table.numericColumns.emplace_back();
        } else if (kind == "cat") {
            layout.push_back({Col::Cat, static_cast<int>(table.categoricalNames.size())});
            table.categoricalNames.push_back(name);
            table.categoricalColumns.emplace_back();
        } else if (kind == "label") {
            layout.push_back({Col::Label, 0});
        } else {
            fail("E_SCHEMA", "unknown feature column kind '" + kind + "'");
        }
    }

    std::string line;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, '\t');
        if (cells.size() != layout.size())
            fail("E_PARSE", "feature table line " + std::to_string(lineNo) +
                                ": expected " + std::to_string(layout.size()) + " fields");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            switch (layout[c].kind) {
                case Col::Prov: {
                    long long v = 0;
                    if (!tryParseLong(cells[c], v) || v < 0)
                        fail("E_PARSE", "feature table line " + std::to_string(lineNo) +
                                            ": bad provenance index");
                    table.rowProvenance.push_back(static_cast<std::size_t>(v));
                    break;
                }
                case Col::Num: {
                    double v = 0.0;
                    if (!tryParseDouble(cells[c], v))
                        fail("E_PARSE", "feature table line " + std::to_string(lineNo) +
                                            ": non-numeric value '" + cells[c] + "'");
                    table.numericColumns[static_cast<std::size_t>(layout[c].slot)].push_back(v);
                    break;
                }
                case Col::Cat:
                    table.categoricalColumns[static_cast<std::size_t>(layout[c].slot)]
                        .push_back(cells[c]);
                    break;
                case Col::Label:
                    table.labels.push_back(cells[c]);
                    break;
            }
        }
        ++table.nRows;
    }
    if (table.hasLabels()) {
        std::set<std::string> classes(table.labels.begin(), table.labels.end());
        table.labelClasses.assign(classes.begin(), classes.end());
    }
    return table;
}

int wordLength(const corpus::CorpusRecord& record) {
    int n = 0;
    for (unsigned char c : record.word)
        if (std::isalpha(c)) ++n;
    return n;
}

double logWordFrequency(const std::string& word, const corpus::FrequencyLexicon& lexicon) {
    if (lexicon.total == 0) fail("E_EMPTY", "frequency lexicon has zero total");
    const double count = static_cast<double>(lexicon.countOf(word));
    const double denom =
        static_cast<double>(lexicon.total) + static_cast<double>(lexicon.typeCount());
    return std::log((count + 1.0) / denom * 1e6);
}

const std::set<std::string>& defaultVowelNuclei() {
    static const std::set<std::string> vowels = {
        "aa", "ae", "ah", "ao", "aw", "ay", "eh", "er", "ey", "ih", "iy",
        "ow", "oy", "uh", "uw",
        // reduced vowels and syllabic consonants
        "ax", "axr", "ix", "ux", "el", "em", "en", "eng"};
    return vowels;
}

namespace {

std::string stripStress(const std::string& phone) {
    std::size_t e = phone.size();
    while (e > 0 && std::isdigit(static_cast<unsigned char>(phone[e - 1]))) --e;
    return phone.substr(0, e);
}

}  // namespace

int citeLength(const corpus::CorpusRecord& record, const std::set<std::string>& vowels) {
    int n = 0;
    for (const auto& p : record.canonicalPhones)
        if (vowels.count(stripStress(p))) ++n;
    return n;
}

double phraseRate(const std::vector<const corpus::CorpusRecord*>& phrase) {
    if (phrase.empty()) fail("E_EMPTY", "phrase_rate of empty phrase");
    double minStart = phrase.front()->startS;
    double maxEnd = phrase.front()->endS;
    for (const auto* r : phrase) {
        minStart = std::min(minStart, r->startS);
        maxEnd = std::max(maxEnd, r->endS);
    }
    const double span = maxEnd - minStart;
    if (!(span > 0.0)) fail("E_DEGENERATE", "degenerate phrase: zero time span");
    return static_cast<double>(phrase.size()) / span;
}

int editDeletions(const std::vector<std::string>& canonical,
                  const std::vector<std::string>& realized) {
    const std::size_t n = canonical.size(), m = realized.size();
    // dp over (cost, deletions), minimized lexicographically
    struct Cell {
        int cost;
        int del;
    };
    auto better = [](Cell a, Cell b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.del < b.del;
    };
    std::vector<Cell> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = {static_cast<int>(j), 0};
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = {static_cast<int>(i), static_cast<int>(i)};
        for (std::size_t j = 1; j <= m; ++j) {
            const bool match = canonical[i - 1] == realized[j - 1];
            Cell best = {prev[j - 1].cost + (match ? 0 : 1), prev[j - 1].del};
            const Cell viaDel = {prev[j].cost + 1, prev[j].del + 1};
            const Cell viaIns = {cur[j - 1].cost + 1, cur[j - 1].del};
            if (better(viaDel, best)) best = viaDel;
            if (better(viaIns, best)) best = viaIns;
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    return prev[m].del;
}

std::optional<int> deletionCount(const corpus::CorpusRecord& record) {
    if (record.hasRealizedPhones)
        return editDeletions(record.canonicalPhones, record.realizedPhones);
    if (record.deletionsOverride) return *record.deletionsOverride;
    return std::nullopt;
}

BinSpec makeBins(std::vector<double> durations, int k) {
    if (k < 2) fail("E_INVALID_ARG", "bin count must be at least 2");
    if (durations.size() < static_cast<std::size_t>(k))
        fail("E_INVALID_ARG", "need at least k durations to form k bins");
    std::sort(durations.begin(), durations.end());

    BinSpec spec;
    spec.k = k;
    spec.edges.resize(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i)
        spec.edges[static_cast<std::size_t>(i)] =
            quantileSorted(durations, static_cast<double>(i) / static_cast<double>(k));
    for (int i = 0; i < k; ++i) {
        if (!(spec.edges[static_cast<std::size_t>(i)] <
              spec.edges[static_cast<std::size_t>(i) + 1]))
            fail("E_DEGENERATE", "insufficient distinct quantiles for " +
                                     std::to_string(k) + " bins");
        spec.labels.push_back(std::to_string(i + 1));
    }
    return spec;
}

std::string assignBin(double duration, const BinSpec& spec) {
    if (duration < spec.edges.front() || duration > spec.edges.back())
        return kOutOfRangeLabel;
    // interior edges belong to the lower bin; the lowest edge to bin 1
    for (int i = 1; i <= spec.k; ++i) {
        if (duration <= spec.edges[static_cast<std::size_t>(i)])
            return spec.labels[static_cast<std::size_t>(i) - 1];
    }
    return spec.labels.back();
}

std::vector<std::string> AssemblyOptions::defaultFeatures() {
    return {"WordDuration", "WordLength", "LogWordFreq",      "CiteLength",
            "PhraseRate",   "Deletions",  "SemanticRelevance"};
}

std::vector<std::string> AssemblyOptions::availableFeatures() {
    return {"WordDuration", "WordLength",   "LogWordFreq", "CiteLength",
            "PhraseRate",   "PhraseLength", "Deletions",   "SemanticRelevance",
            "SpeakerRate"};
}

FeatureTable assembleFeatureTable(const std::vector<corpus::CorpusRecord>& records,
                                  const corpus::FrequencyLexicon& lexicon,
                                  const semrel::RelevanceSeries& relevance,
                                  const AssemblyOptions& options,
                                  AssemblyReport* report) {
    AssemblyReport local;
    AssemblyReport& rep = report ? *report : local;
    rep = AssemblyReport{};
    rep.rowsIn = records.size();
    if (records.empty()) fail("E_EMPTY", "no records");

    const auto available = AssemblyOptions::availableFeatures();
    for (const auto& f : options.features) {
        if (std::find(available.begin(), available.end(), f) == available.end())
            fail("E_UNKNOWN_FEATURE", "unknown feature name '" + f + "'");
    }
    const bool wantsRelevance =
        std::find(options.features.begin(), options.features.end(),
                  "SemanticRelevance") != options.features.end();
    if (wantsRelevance && relevance.scores.size() != records.size())
        fail("E_INVALID_ARG", "relevance series is not aligned with the record set");

    // phrase grouping for PhraseRate / PhraseLength / SpeakerRate
    std::map<std::pair<std::string, std::string>, std::vector<const corpus::CorpusRecord*>>
        phrases;
    for (const auto& r : records) phrases[{r.speakerId, r.phraseId}].push_back(&r);
    std::map<std::pair<std::string, std::string>, double> rateByPhrase;
    std::map<std::pair<std::string, std::string>, double> lengthByPhrase;
    std::map<std::string, double> speakerRate;
    {
        std::map<std::string, std::pair<double, std::size_t>> acc;
        for (const auto& [key, members] : phrases) {
            const double rate = phraseRate(members);
            rateByPhrase[key] = rate;
            lengthByPhrase[key] = static_cast<double>(members.size());
            auto& a = acc[key.first];
            a.first += rate;
            a.second += 1;
        }
        for (const auto& [speaker, a] : acc)
            speakerRate[speaker] = a.first / static_cast<double>(a.second);
    }

    // bin edges use every input duration, mirroring the cut-then-drop order
    BinSpec bins;
    if (options.makeLabels) {
        std::vector<double> durations;
        durations.reserve(records.size());
        for (const auto& r : records) durations.push_back(r.duration());
        bins = makeBins(std::move(durations), options.kBins);
    }

    FeatureTable table;
    table.numericNames = options.features;
    table.numericColumns.assign(options.features.size(), {});
    table.categoricalNames = {"Speaker", "Sex", "Age"};
    table.categoricalColumns.assign(3, {});
    if (options.makeLabels) table.labelClasses = bins.labels;

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::vector<double> values(options.features.size(), 0.0);
        bool missing = false;
        for (std::size_t f = 0; f < options.features.size() && !missing; ++f) {
            const std::string& name = options.features[f];
            if (name == "WordDuration") {
                values[f] = r.duration();
            } else if (name == "WordLength") {
                values[f] = static_cast<double>(wordLength(r));
            } else if (name == "LogWordFreq") {
                values[f] = logWordFrequency(r.word, lexicon);
            } else if (name == "CiteLength") {
                if (r.canonicalPhones.empty()) {
                    missing = true;
                    break;
                }
                const int n = citeLength(r, options.vowels);
                if (n == 0) ++rep.zeroVowelFlags;
                values[f] = static_cast<double>(n);
            } else if (name == "PhraseRate") {
                values[f] = rateByPhrase.at({r.speakerId, r.phraseId});
            } else if (name == "PhraseLength") {
                values[f] = lengthByPhrase.at({r.speakerId, r.phraseId});
            } else if (name == "Deletions") {
                const auto d = deletionCount(r);
                if (!d) {
                    missing = true;
                    break;
                }
                values[f] = static_cast<double>(*d);
            } else if (name == "SemanticRelevance") {
                if (relevance.status[i] != semrel::ScoreStatus::Ok) {
                    missing = true;
                    break;
                }
                values[f] = relevance.scores[i];
            } else if (name == "SpeakerRate") {
                values[f] = speakerRate.at(r.speakerId);
            }
        }
        if (missing) {
            ++rep.rowsDropped;
            continue;
        }
        for (std::size_t f = 0; f < values.size(); ++f)
            table.numericColumns[f].push_back(values[f]);
        table.categoricalColumns[0].push_back(r.speakerId);
        table.categoricalColumns[1].push_back(r.sex);
        table.categoricalColumns[2].push_back(r.age);
        if (options.makeLabels) table.labels.push_back(assignBin(r.duration(), bins));
        table.rowProvenance.push_back(i);
        ++table.nRows;
    }
    rep.rowsKept = table.nRows;
    if (table.nRows == 0) fail("E_EMPTY", "all rows were dropped during assembly");
    return table;
}

}  // namespace durkit::feat
