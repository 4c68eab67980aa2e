#include "durkit/ml/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "durkit/common.hpp"

namespace durkit::ml {

Dataset Dataset::selectRows(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.nRows = rows.size();
    out.nCols = nCols;
    out.featureNames = featureNames;
    out.classes = classes;
    out.values.reserve(rows.size() * nCols);
    for (std::size_t r : rows)
        out.values.insert(out.values.end(), row(r), row(r) + nCols);
    if (!labels.empty()) {
        out.labels.reserve(rows.size());
        for (std::size_t r : rows) out.labels.push_back(labels[r]);
    }
    return out;
}

Dataset Dataset::selectColumns(const std::vector<std::size_t>& cols) const {
    Dataset out;
    out.nRows = nRows;
    out.nCols = cols.size();
    out.labels = labels;
    out.classes = classes;
    for (std::size_t c : cols) out.featureNames.push_back(featureNames[c]);
    out.values.reserve(nRows * cols.size());
    for (std::size_t r = 0; r < nRows; ++r)
        for (std::size_t c : cols) out.values.push_back(at(r, c));
    return out;
}

std::vector<std::size_t> Dataset::classCounts() const {
    std::vector<std::size_t> counts(classes.size(), 0);
    for (int id : labels) counts[static_cast<std::size_t>(id)]++;
    return counts;
}

Dataset datasetFromTable(const feat::FeatureTable& table,
                         const std::vector<std::string>& featureNames) {
    Dataset out;
    out.nRows = table.nRows;
    out.nCols = featureNames.size();
    out.featureNames = featureNames;
    out.values.resize(out.nRows * out.nCols);

    for (std::size_t c = 0; c < featureNames.size(); ++c) {
        const std::string& name = featureNames[c];
        const int numIdx = table.numericIndex(name);
        if (numIdx >= 0) {
            const auto& col = table.numericColumns[static_cast<std::size_t>(numIdx)];
            for (std::size_t r = 0; r < out.nRows; ++r) out.at(r, c) = col[r];
            continue;
        }
        const int catIdx = table.categoricalIndex(name);
        if (catIdx >= 0) {
            const auto& col = table.categoricalColumns[static_cast<std::size_t>(catIdx)];
            std::set<std::string> levels(col.begin(), col.end());
            std::map<std::string, double> code;
            double next = 0.0;
            for (const auto& level : levels) code[level] = next++;
            for (std::size_t r = 0; r < out.nRows; ++r) out.at(r, c) = code[col[r]];
            continue;
        }
        fail("E_UNKNOWN_COLUMN", "feature '" + name + "' is not in the table");
    }

    if (table.hasLabels()) {
        std::set<std::string> classes(table.labels.begin(), table.labels.end());
        out.classes.assign(classes.begin(), classes.end());
        std::map<std::string, int> id;
        for (std::size_t i = 0; i < out.classes.size(); ++i)
            id[out.classes[i]] = static_cast<int>(i);
        out.labels.reserve(table.nRows);
        for (const auto& l : table.labels) out.labels.push_back(id[l]);
    }
    return out;
}

}  // namespace durkit::ml
