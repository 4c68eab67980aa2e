#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "durkit/features.hpp"

namespace durkit::ml {

/// Dense row-major design matrix with integer-coded labels.
struct Dataset {
    std::size_t nRows = 0;
    std::size_t nCols = 0;
    std::vector<double> values;  // row-major, nRows * nCols
    std::vector<std::string> featureNames;
    std::vector<int> labels;            // class ids, empty when unlabeled
    std::vector<std::string> classes;   // sorted class names, id = position

    double at(std::size_t r, std::size_t c) const { return values[r * nCols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * nCols + c]; }
    const double* row(std::size_t r) const { return values.data() + r * nCols; }

    Dataset selectRows(const std::vector<std::size_t>& rows) const;
    Dataset selectColumns(const std::vector<std::size_t>& cols) const;

    std::vector<std::size_t> classCounts() const;
    const std::string& className(int id) const { return classes[static_cast<std::size_t>(id)]; }
};

/// Builds a Dataset from feature-table columns. Numeric names map through
/// unchanged; categorical names are encoded as integer codes in sorted
/// level order. The table's label column becomes the class labels.
Dataset datasetFromTable(const feat::FeatureTable& table,
                         const std::vector<std::string>& featureNames);

}  // namespace durkit::ml
