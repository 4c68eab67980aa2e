#pragma once

#include <optional>
#include <string>
#include <vector>

namespace durkit::stats {

struct SmoothSpec {
    std::string covariate;
    std::optional<int> basisDim;  // s(x, k=N); engine default when absent
};

/// Parsed model formula in the mini-language
///     response ~ term (+ term)*
///     term := 1 | name | s(name) | s(name, k=N) | (1|name) | s(name, bs="re")
/// The random-effect smooth form normalizes to a random intercept; a bare
/// `1` stands for the always-present intercept, so `y ~ 1` is the null
/// model.
struct ModelFormula {
    std::string response;
    std::vector<std::string> fixed;
    std::vector<SmoothSpec> smooths;
    std::vector<std::string> randomIntercepts;

    bool hasSmooths() const { return !smooths.empty(); }
    std::string canonical() const;
};

/// Throws parse errors that carry the 1-based character position.
/// te(...) is rejected with the dedicated unsupported-tensor error.
ModelFormula parseFormula(const std::string& text);

}  // namespace durkit::stats
