#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "durkit/ml/dataset.hpp"

namespace durkit::ml {

struct SmoteReport {
    /// Classes whose neighbor count was reduced because the class is
    /// smaller than k+1, with the k actually used.
    std::map<std::string, int> reducedK;
    std::size_t syntheticRows = 0;
};

/// Synthetic minority oversampling: each synthetic point interpolates a
/// class member toward one of its k nearest same-class neighbors,
///     x_new = x + u * (x_nn - x),  u ~ U[0, 1].
/// Classes grow to targetCounts (by class name); classes at or above
/// target pass through untouched. Deterministic per seed.
Dataset smote(const Dataset& data, int kNeighbors,
              const std::map<std::string, std::size_t>& targetCounts, uint64_t seed,
              SmoteReport* report = nullptr);

/// Target map that balances every class up to the majority count.
std::map<std::string, std::size_t> balancedTargets(const Dataset& data);

}  // namespace durkit::ml
