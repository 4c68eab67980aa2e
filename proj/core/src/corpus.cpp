#include "durkit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "durkit/common.hpp"

namespace durkit::corpus {

namespace {

constexpr const char* kCanonicalColumns[] = {
    "token_index", "word",          "start",           "end",
    "speaker",     "sex",           "age",             "phrase_id",
    "canonical_phones", "realized_phones", "deletions"};

std::vector<std::string> splitPhones(const std::string& field) {
    std::vector<std::string> out;
    for (auto& p : splitWhitespace(field)) out.push_back(toLower(p));
    return out;
}

}  // namespace

ColumnMap ColumnMap::defaults() {
    ColumnMap m;
    for (const char* c : kCanonicalColumns) m.names[c] = c;
    return m;
}

const std::string& ColumnMap::actual(const std::string& canonical) const {
    auto it = names.find(canonical);
    if (it == names.end()) {
        static const std::string empty;
        return empty;
    }
    return it->second;
}

std::string normalizeWord(const std::string& raw) {
    std::size_t b = 0, e = raw.size();
    auto keepEdge = [](unsigned char c) { return std::isalnum(c) != 0; };
    while (b < e && !keepEdge(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && !keepEdge(static_cast<unsigned char>(raw[e - 1]))) --e;
    return toLower(raw.substr(b, e - b));
}

std::vector<CorpusRecord> parseCorpus(std::istream& in, const ParseOptions& options,
                                      ParseReport* report) {
    ParseReport local;
    ParseReport& rep = report ? *report : local;
    rep = ParseReport{};

    std::string headerLine;
    if (!std::getline(in, headerLine)) fail("E_EMPTY", "corpus stream has no header row");
    if (!headerLine.empty() && headerLine.back() == '\r') headerLine.pop_back();

    const std::vector<std::string> header = split(headerLine, '\t');
    std::map<std::string, int> columnIndex;  // canonical name -> column position
    for (const char* canonical : kCanonicalColumns) {
        const std::string& actual = options.columns.actual(canonical);
        if (actual.empty()) continue;
        auto it = std::find(header.begin(), header.end(), actual);
        if (it != header.end())
            columnIndex[canonical] = static_cast<int>(it - header.begin());
    }
    for (const char* required : {"word", "start", "end", "speaker"}) {
        if (!columnIndex.count(required))
            fail("E_SCHEMA", std::string("corpus is missing required column '") +
                                 options.columns.actual(required) + "'");
    }

    const bool hasTokenIndex = columnIndex.count("token_index") > 0;
    const bool hasPhraseId = columnIndex.count("phrase_id") > 0;
    const bool hasCanonicalPhones = columnIndex.count("canonical_phones") > 0;
    const bool hasRealizedPhones = columnIndex.count("realized_phones") > 0;
    const bool hasDeletions = columnIndex.count("deletions") > 0;

    auto fieldOf = [&](const std::vector<std::string>& cells, const char* canonical,
                       bool* present = nullptr) -> std::string {
        auto it = columnIndex.find(canonical);
        if (it == columnIndex.end() || it->second >= static_cast<int>(cells.size())) {
            if (present) *present = false;
            return {};
        }
        if (present) *present = true;
        return cells[static_cast<std::size_t>(it->second)];
    };

    std::vector<CorpusRecord> records;
    // per-speaker counters drive token_index and auto phrase ids
    std::unordered_map<std::string, int> nextTokenIndex;
    std::unordered_map<std::string, int> phraseCounter;
    std::string lastSpeaker;

    std::string line;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++rep.rowsRead;
        const std::vector<std::string> cells = split(line, '\t');

        auto drop = [&](const std::string& reason) {
            ++rep.rowsDropped;
            rep.issues.push_back({lineNo, reason});
        };

        const std::string rawWord = trim(fieldOf(cells, "word"));
        const std::string speaker = trim(fieldOf(cells, "speaker"));
        if (speaker.empty()) {
            drop("missing speaker");
            continue;
        }
        if (!rawWord.empty() && options.markerChars.find(rawWord[0]) != std::string::npos) {
            // pause/noise marker: phrase boundary, never an analysis row
            ++rep.markersSkipped;
            phraseCounter[speaker] += 1;
            continue;
        }

        CorpusRecord rec;
        rec.word = normalizeWord(rawWord);
        if (rec.word.empty()) {
            drop("missing word");
            continue;
        }
        rec.speakerId = speaker;

        double startV = 0.0, endV = 0.0;
        if (!tryParseDouble(fieldOf(cells, "start"), startV)) {
            drop("non-numeric start time");
            continue;
        }
        if (!tryParseDouble(fieldOf(cells, "end"), endV)) {
            drop("non-numeric end time");
            continue;
        }
        if (!(endV > startV)) {
            drop("end time not after start time");
            continue;
        }
        rec.startS = startV;
        rec.endS = endV;

        rec.sex = toLower(trim(fieldOf(cells, "sex")));
        rec.age = toLower(trim(fieldOf(cells, "age")));

        if (hasCanonicalPhones) {
            rec.canonicalPhones = splitPhones(fieldOf(cells, "canonical_phones"));
            if (rec.canonicalPhones.empty()) {
                drop("missing canonical phones");
                continue;
            }
        }
        if (hasRealizedPhones) {
            bool present = false;
            const std::string f = fieldOf(cells, "realized_phones", &present);
            if (present && !trim(f).empty()) {
                rec.realizedPhones = splitPhones(f);
                rec.hasRealizedPhones = true;
            }
        }
        if (hasDeletions) {
            const std::string f = trim(fieldOf(cells, "deletions"));
            if (!f.empty()) {
                long long d = 0;
                if (!tryParseLong(f, d) || d < 0) {
                    drop("invalid deletions value");
                    continue;
                }
                rec.deletionsOverride = static_cast<int>(d);
            }
        }

        if (hasTokenIndex) {
            long long t = 0;
            if (!tryParseLong(fieldOf(cells, "token_index"), t) || t < 0) {
                drop("invalid token_index");
                continue;
            }
            rec.tokenIndex = static_cast<int>(t);
        } else {
            rec.tokenIndex = nextTokenIndex[speaker]++;
        }

        if (hasPhraseId) {
            rec.phraseId = trim(fieldOf(cells, "phrase_id"));
            if (rec.phraseId.empty()) {
                drop("missing phrase_id");
                continue;
            }
        } else {
            if (speaker != lastSpeaker) lastSpeaker = speaker;
            rec.phraseId = speaker + ":p" + std::to_string(phraseCounter[speaker]);
        }

        records.push_back(std::move(rec));
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const CorpusRecord& a, const CorpusRecord& b) {
                         if (a.speakerId != b.speakerId) return a.speakerId < b.speakerId;
                         return a.tokenIndex < b.tokenIndex;
                     });
    rep.recordsKept = records.size();
    return records;
}

void writeCorpus(const std::vector<CorpusRecord>& records, std::ostream& out) {
    out << "token_index\tword\tstart\tend\tspeaker\tsex\tage\tphrase_id"
           "\tcanonical_phones\trealized_phones\n";
    for (const auto& r : records) {
        out << r.tokenIndex << '\t' << r.word << '\t' << formatShortest(r.startS) << '\t'
            << formatShortest(r.endS) << '\t' << r.speakerId << '\t' << r.sex << '\t'
            << r.age << '\t' << r.phraseId << '\t' << joinStrings(r.canonicalPhones, " ")
            << '\t' << (r.hasRealizedPhones ? joinStrings(r.realizedPhones, " ") : "")
            << '\n';
    }
}

FrequencyLexicon parseFrequencyList(std::istream& in) {
    FrequencyLexicon lex;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> parts = split(line, '\t');
        if (parts.size() < 2) parts = splitWhitespace(line);
        if (parts.size() != 2)
            fail("E_PARSE", "frequency list line " + std::to_string(lineNo) +
                                ": expected 'word<TAB>count'");
        long long count = 0;
        if (!tryParseLong(parts[1], count))
            fail("E_PARSE", "frequency list line " + std::to_string(lineNo) +
                                ": non-integer count '" + parts[1] + "'");
        if (count < 0)
            fail("E_PARSE", "frequency list line " + std::to_string(lineNo) +
                                ": negative count");
        const std::string word = normalizeWord(parts[0]);
        if (word.empty()) continue;
        lex.counts[word] += static_cast<uint64_t>(count);
        lex.total += static_cast<uint64_t>(count);
    }
    if (lex.counts.empty() || lex.total == 0) fail("E_EMPTY", "empty lexicon");
    return lex;
}

EmbeddingTable parseEmbeddings(std::istream& in, std::optional<std::size_t> expectedDim) {
    EmbeddingTable table;
    if (expectedDim) table.dimension = *expectedDim;

    std::string line;
    std::size_t lineNo = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> parts = splitWhitespace(line);

        if (first) {
            first = false;
            // word2vec-style "N D" count/dimension header
            long long a = 0, b = 0;
            if (parts.size() == 2 && tryParseLong(parts[0], a) && tryParseLong(parts[1], b) &&
                a >= 0 && b >= 1) {
                if (expectedDim && static_cast<std::size_t>(b) != *expectedDim)
                    fail("E_DIM_MISMATCH",
                         "embedding header declares dimension " + std::to_string(b) +
                             " but " + std::to_string(*expectedDim) + " was expected");
                table.dimension = static_cast<std::size_t>(b);
                continue;
            }
        }

        if (parts.size() < 2)
            fail("E_PARSE", "embeddings line " + std::to_string(lineNo) + ": too few fields");
        const std::size_t dim = parts.size() - 1;
        if (table.dimension == 0) {
            table.dimension = dim;
        } else if (dim != table.dimension) {
            fail("E_DIM_MISMATCH", "embeddings line " + std::to_string(lineNo) +
                                       ": dimension " + std::to_string(dim) + " != " +
                                       std::to_string(table.dimension));
        }
        std::vector<double> vec(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            double v = 0.0;
            if (!tryParseDouble(parts[i + 1], v))
                fail("E_PARSE", "embeddings line " + std::to_string(lineNo) +
                                    ": non-finite or malformed component '" + parts[i + 1] +
                                    "'");
            vec[i] = v;
        }
        table.vectors[toLower(parts[0])] = std::move(vec);
    }
    if (table.vectors.empty()) fail("E_EMPTY", "empty embedding table");
    return table;
}

CoverageReport validateDataset(const std::vector<CorpusRecord>& records,
                               const FrequencyLexicon& lexicon,
                               const EmbeddingTable& embeddings) {
    if (records.empty()) fail("E_EMPTY", "no records");
    CoverageReport rep;
    rep.recordCount = records.size();

    std::set<std::string> types;
    std::size_t withRealized = 0;
    for (const auto& r : records) {
        types.insert(r.word);
        if (r.hasRealizedPhones) ++withRealized;
    }
    rep.wordTypeCount = types.size();

    std::size_t inLexicon = 0, inEmbeddings = 0;
    for (const auto& w : types) {
        if (lexicon.countOf(w) > 0) ++inLexicon;
        if (embeddings.find(w)) ++inEmbeddings;
    }
    const double nTypes = static_cast<double>(types.size());
    rep.lexiconTypeCoverage = static_cast<double>(inLexicon) / nTypes;
    rep.embeddingTypeCoverage = static_cast<double>(inEmbeddings) / nTypes;
    rep.realizedPhonesFraction =
        static_cast<double>(withRealized) / static_cast<double>(records.size());
    return rep;
}

}  // namespace durkit::corpus
