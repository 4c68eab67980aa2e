#pragma once

#include <string>
#include <vector>

namespace durkit::ml {

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    bool neverPredicted = false;  // precision 0 by convention
};

struct ClassificationReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> perClass;
    double macroPrecision = 0.0, macroRecall = 0.0, macroF1 = 0.0;
    double weightedPrecision = 0.0, weightedRecall = 0.0, weightedF1 = 0.0;
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> confusion;  // rows = true class
    std::size_t total = 0;
};

ClassificationReport classificationMetrics(const std::vector<std::string>& truth,
                                           const std::vector<std::string>& predicted);

/// Aligned text in the familiar per-class precision/recall/F1 layout,
/// confusion matrix appended.
std::string formatReport(const ClassificationReport& report);

}  // namespace durkit::ml
