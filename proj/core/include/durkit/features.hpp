#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "durkit/corpus.hpp"
#include "durkit/semrel.hpp"

namespace durkit::feat {

/// Column-oriented analysis table. All columns share nRows; numeric
/// columns never contain NaN (rows with a missing value are dropped
/// during assembly).
struct FeatureTable {
    std::size_t nRows = 0;
    std::vector<std::string> numericNames;
    std::vector<std::vector<double>> numericColumns;
    std::vector<std::string> categoricalNames;
    std::vector<std::vector<std::string>> categoricalColumns;
    std::vector<std::string> labels;        // empty when no label column
    std::vector<std::string> labelClasses;  // ordered class set
    std::vector<std::size_t> rowProvenance; // source record indices

    bool hasLabels() const { return !labels.empty(); }
    int numericIndex(const std::string& name) const;
    int categoricalIndex(const std::string& name) const;
    const std::vector<double>& numeric(const std::string& name) const;
    const std::vector<std::string>& categorical(const std::string& name) const;
};

/// TSV with a typed header (name:num, name:cat, name:label, name:prov).
void writeFeatureTable(const FeatureTable& table, std::ostream& out);
FeatureTable readFeatureTable(std::istream& in);

// ---- per-record features -------------------------------------------------

/// Number of alphabetic characters in the word (apostrophes excluded).
int wordLength(const corpus::CorpusRecord& record);

/// Natural log of the add-one-smoothed per-million rate:
///     ln(((count + 1) / (total + |V|)) * 1e6)
/// Out-of-vocabulary words fall back to the smoothed floor.
double logWordFrequency(const std::string& word, const corpus::FrequencyLexicon& lexicon);

/// ARPAbet vowel nuclei (plus the reduced vowels and syllabic consonants
/// conversational corpora transcribe with).
const std::set<std::string>& defaultVowelNuclei();

/// Syllable count of the citation form: phones in the vowel-nucleus set.
/// Stress digits are ignored when matching ("aa1" counts as "aa").
int citeLength(const corpus::CorpusRecord& record,
               const std::set<std::string>& vowels = defaultVowelNuclei());

/// Words per second over one phrase: n / (max end - min start).
double phraseRate(const std::vector<const corpus::CorpusRecord*>& phrase);

/// Deletion edits in a minimal-cost alignment (unit costs) from canonical
/// to realized phones. Among same-cost alignments the one with fewest
/// deletions is counted, which makes the value well defined.
int editDeletions(const std::vector<std::string>& canonical,
                  const std::vector<std::string>& realized);

/// Per-record deletions: edit alignment when realized phones exist, else
/// the precomputed column; nullopt when neither source is available.
std::optional<int> deletionCount(const corpus::CorpusRecord& record);

// ---- duration binning ------------------------------------------------------

struct BinSpec {
    int k = 0;
    std::vector<double> edges;        // length k+1, strictly increasing
    std::vector<std::string> labels;  // "1".."k"
};

/// Equal-frequency bin edges at quantiles i/k (linear interpolation).
BinSpec makeBins(std::vector<double> durations, int k);

/// Sentinel label for durations outside [edges.front(), edges.back()].
extern const char* const kOutOfRangeLabel;

/// Lowest edge inclusive; interior edges belong to the lower bin.
std::string assignBin(double duration, const BinSpec& spec);

// ---- assembly --------------------------------------------------------------

struct AssemblyOptions {
    std::vector<std::string> features;  // numeric feature names to compute
    int kBins = 5;
    std::set<std::string> vowels = defaultVowelNuclei();
    bool makeLabels = true;

    static std::vector<std::string> defaultFeatures();
    static std::vector<std::string> availableFeatures();
};

struct AssemblyReport {
    std::size_t rowsIn = 0;
    std::size_t rowsKept = 0;
    std::size_t rowsDropped = 0;
    std::size_t zeroVowelFlags = 0;
};

/// Builds the analysis table: requested numeric features, the speaker
/// metadata as categorical columns, and the duration-range label. Rows
/// with any missing value are dropped and counted. Bin edges come from
/// the durations of all input records, before any drop.
FeatureTable assembleFeatureTable(const std::vector<corpus::CorpusRecord>& records,
                                  const corpus::FrequencyLexicon& lexicon,
                                  const semrel::RelevanceSeries& relevance,
                                  const AssemblyOptions& options,
                                  AssemblyReport* report = nullptr);

}  // namespace durkit::feat
