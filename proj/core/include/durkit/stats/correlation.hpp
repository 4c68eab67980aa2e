#pragma once

#include <string>
#include <vector>

namespace durkit::stats {

struct PearsonMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> r;     // symmetric, unit diagonal
    std::vector<uint8_t> constantColumn;    // entries involving these are NaN
};

/// Pairwise Pearson correlations. Constant columns are flagged and their
/// off-diagonal entries are NaN rather than fatal.
PearsonMatrix pearsonMatrix(const std::vector<std::string>& names,
                            const std::vector<std::vector<double>>& columns);

}  // namespace durkit::stats
