#include "durkit/stats/formula.hpp"

#include <cctype>
#include <set>

#include "durkit/common.hpp"

namespace durkit::stats {

namespace {

class Scanner {
public:
    explicit Scanner(const std::string& text) : text_(text) {}

    void skipSpace() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool done() {
        skipSpace();
        return pos_ >= text_.size();
    }

    char peek() {
        skipSpace();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        skipSpace();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const std::string& what) {
        if (!consume(c)) failHere("expected '" + std::string(1, c) + "' " + what);
    }

    std::string identifier() {
        skipSpace();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '.'))
            ++pos_;
        if (pos_ == start) failHere("expected a name");
        return text_.substr(start, pos_ - start);
    }

    [[noreturn]] void failHere(const std::string& message) {
        fail("E_FORMULA", "formula parse error at position " + std::to_string(pos_ + 1) +
                              ": " + message);
    }

    std::size_t position() const { return pos_; }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

ModelFormula parseFormula(const std::string& text) {
    Scanner scan(text);
    ModelFormula formula;
    formula.response = scan.identifier();
    scan.expect('~', "after the response");

    std::set<std::string> seen;
    auto noteTerm = [&](const std::string& key, Scanner& s) {
        if (!seen.insert(key).second) s.failHere("duplicate term '" + key + "'");
    };

    bool first = true;
    bool sawTerm = false;
    while (true) {
        if (!first) {
            if (scan.done()) break;
            scan.expect('+', "between terms");
        }
        first = false;
        sawTerm = true;

        if (scan.peek() == '(') {
            // (1|g) random intercept
            scan.expect('(', "");
            scan.expect('1', "in the random-intercept term");
            scan.expect('|', "in the random-intercept term");
            const std::string factor = scan.identifier();
            scan.expect(')', "closing the random-intercept term");
            noteTerm("re:" + factor, scan);
            formula.randomIntercepts.push_back(factor);
            continue;
        }

        const std::string name = scan.identifier();
        if (name == "1") continue;  // explicit intercept, always present anyway
        if (name == "te" && scan.peek() == '(')
            fail("E_UNSUPPORTED_TENSOR",
                 "unsupported: tensor smooth te(...) terms are out of scope");
        if (name == formula.response) scan.failHere("response cannot be a predictor");

        if (name == "s" && scan.peek() == '(') {
            scan.expect('(', "");
            const std::string covariate = scan.identifier();
            std::optional<int> basisDim;
            bool isRandom = false;
            while (scan.consume(',')) {
                const std::string arg = scan.identifier();
                if (arg == "bs") {
                    scan.expect('=', "after bs");
                    scan.expect('"', "around the basis name");
                    const std::string basis = scan.identifier();
                    scan.expect('"', "around the basis name");
                    if (basis == "re") {
                        isRandom = true;
                    } else {
                        scan.failHere("unsupported basis '" + basis + "'");
                    }
                } else if (arg == "k") {
                    scan.expect('=', "after k");
                    const std::string digits = scan.identifier();
                    long long k = 0;
                    if (!tryParseLong(digits, k) || k < 4)
                        scan.failHere("k must be an integer of at least 4");
                    basisDim = static_cast<int>(k);
                } else {
                    scan.failHere("unknown smooth argument '" + arg + "'");
                }
            }
            scan.expect(')', "closing s(...)");
            if (isRandom) {
                noteTerm("re:" + covariate, scan);
                formula.randomIntercepts.push_back(covariate);
            } else {
                noteTerm("s:" + covariate, scan);
                formula.smooths.push_back({covariate, basisDim});
            }
            continue;
        }

        noteTerm("f:" + name, scan);
        formula.fixed.push_back(name);
    }

    if (!sawTerm) fail("E_FORMULA", "formula has no terms");
    return formula;
}

std::string ModelFormula::canonical() const {
    std::string out = response + " ~ ";
    std::vector<std::string> terms;
    for (const auto& f : fixed) terms.push_back(f);
    for (const auto& s : smooths)
        terms.push_back("s(" + s.covariate +
                        (s.basisDim ? ", k=" + std::to_string(*s.basisDim) : "") + ")");
    for (const auto& r : randomIntercepts) terms.push_back("(1|" + r + ")");
    return out + joinStrings(terms, " + ");
}

}  // namespace durkit::stats
