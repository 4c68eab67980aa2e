#include "durkit/stats/correlation.hpp"

#include <cmath>
#include <limits>

#include "durkit/common.hpp"

namespace durkit::stats {

PearsonMatrix pearsonMatrix(const std::vector<std::string>& names,
                            const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size())
        fail("E_INVALID_ARG", "column names and data differ in count");
    if (columns.empty()) fail("E_EMPTY", "no columns to correlate");
    const std::size_t n = columns[0].size();
    if (n < 2) fail("E_INVALID_ARG", "correlation needs at least 2 rows");
    for (const auto& c : columns)
        if (c.size() != n) fail("E_INVALID_ARG", "columns differ in length");

    const std::size_t k = columns.size();
    std::vector<double> mean(k, 0.0), sd(k, 0.0);
    PearsonMatrix out;
    out.names = names;
    out.constantColumn.assign(k, 0);
    for (std::size_t c = 0; c < k; ++c) {
        mean[c] = meanOf(columns[c]);
        double ss = 0.0;
        for (double v : columns[c]) ss += (v - mean[c]) * (v - mean[c]);
        sd[c] = std::sqrt(ss);
        if (sd[c] == 0.0) out.constantColumn[c] = 1;
    }

    out.r.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        out.r[i][i] = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            double value;
            if (out.constantColumn[i] || out.constantColumn[j]) {
                value = std::numeric_limits<double>::quiet_NaN();
            } else {
                double cov = 0.0;
                for (std::size_t t = 0; t < n; ++t)
                    cov += (columns[i][t] - mean[i]) * (columns[j][t] - mean[j]);
                value = cov / (sd[i] * sd[j]);
                value = std::min(1.0, std::max(-1.0, value));
            }
            out.r[i][j] = value;
            out.r[j][i] = value;  // mirrored, so symmetry is exact
        }
    }
    return out;
}

}  // namespace durkit::stats
