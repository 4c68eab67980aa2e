#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace durkit::corpus {

/// One spoken word token. Immutable after parsing.
struct CorpusRecord {
    int tokenIndex = 0;  // ordinal position within the speaker stream
    std::string word;    // lowercased, punctuation-stripped
    std::vector<std::string> canonicalPhones;  // dictionary pronunciation
    std::vector<std::string> realizedPhones;   // as spoken, may be absent
    bool hasRealizedPhones = false;
    double startS = 0.0;
    double endS = 0.0;
    std::string phraseId;
    std::string speakerId;
    std::string sex;
    std::string age;
    std::optional<int> deletionsOverride;  // precomputed Deletions column, if supplied

    double duration() const { return endS - startS; }
};

/// Maps canonical column names onto the actual header names of an export.
/// Canonical names: token_index, word, start, end, speaker, sex, age,
/// phrase_id, canonical_phones, realized_phones, deletions.
struct ColumnMap {
    std::map<std::string, std::string> names;

    static ColumnMap defaults();
    const std::string& actual(const std::string& canonical) const;
};

struct ParseOptions {
    ColumnMap columns = ColumnMap::defaults();
    /// Tokens whose raw word starts with one of these characters are pause
    /// or noise markers: they never become records but close the current
    /// phrase when phrase ids are auto-generated.
    std::string markerChars = "<{[";
};

struct RowIssue {
    std::size_t line = 0;  // 1-based line number in the stream
    std::string reason;
};

struct ParseReport {
    std::size_t rowsRead = 0;
    std::size_t recordsKept = 0;
    std::size_t rowsDropped = 0;
    std::size_t markersSkipped = 0;
    std::vector<RowIssue> issues;
};

/// Reads the flat TSV corpus format. Throws on a missing required column;
/// malformed rows are dropped, counted, and listed in the report.
/// Records come back ordered by (speaker_id, token_index).
std::vector<CorpusRecord> parseCorpus(std::istream& in, const ParseOptions& options,
                                      ParseReport* report = nullptr);

/// Canonical serialization; parseCorpus(writeCorpus(r)) == r.
void writeCorpus(const std::vector<CorpusRecord>& records, std::ostream& out);

struct FrequencyLexicon {
    std::map<std::string, uint64_t> counts;
    uint64_t total = 0;

    uint64_t countOf(const std::string& word) const {
        auto it = counts.find(word);
        return it == counts.end() ? 0 : it->second;
    }
    std::size_t typeCount() const { return counts.size(); }
};

/// "word<TAB>count" lines (plain whitespace also accepted). Duplicate words
/// merge by summation.
FrequencyLexicon parseFrequencyList(std::istream& in);

struct EmbeddingTable {
    std::size_t dimension = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    const std::vector<double>* find(const std::string& word) const {
        auto it = vectors.find(word);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

/// Text embeddings, one "word v1 ... vD" line per word; a leading "N D"
/// header line is tolerated. Dimension is inferred from the first vector.
EmbeddingTable parseEmbeddings(std::istream& in,
                               std::optional<std::size_t> expectedDim = std::nullopt);

struct CoverageReport {
    std::size_t recordCount = 0;
    std::size_t wordTypeCount = 0;
    double lexiconTypeCoverage = 0.0;
    double embeddingTypeCoverage = 0.0;
    double realizedPhonesFraction = 0.0;
};

CoverageReport validateDataset(const std::vector<CorpusRecord>& records,
                               const FrequencyLexicon& lexicon,
                               const EmbeddingTable& embeddings);

/// Ingestion normalization: lowercase and strip surrounding punctuation.
/// Returns empty when nothing alphanumeric remains.
std::string normalizeWord(const std::string& raw);

}  // namespace durkit::corpus
