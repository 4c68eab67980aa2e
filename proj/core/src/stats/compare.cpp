#include "durkit/stats/compare.hpp"

#include <algorithm>

#include "durkit/common.hpp"

namespace durkit::stats {

double aicOf(double df, double logLik) { return 2.0 * df - 2.0 * logLik; }

std::vector<ComparisonRow> compareModels(const std::vector<ModelSummary>& fits) {
    if (fits.empty()) fail("E_EMPTY", "no fits to compare");
    for (const auto& f : fits) {
        if (f.nRows != fits.front().nRows)
            fail("E_INVALID_ARG", "fits cover different row sets (" +
                                      std::to_string(f.nRows) + " vs " +
                                      std::to_string(fits.front().nRows) +
                                      "); AIC values are not comparable");
    }
    std::vector<ComparisonRow> rows;
    for (const auto& f : fits) rows.push_back({f.name, f.df, f.aic, 0.0, false});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ComparisonRow& a, const ComparisonRow& b) {
                         return a.aic < b.aic;
                     });
    const double best = rows.front().aic;
    for (auto& r : rows) {
        r.deltaAic = r.aic - best;
        r.similarSupport = r.deltaAic < 2.0;
    }
    return rows;
}

}  // namespace durkit::stats
