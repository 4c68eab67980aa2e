#include "durkit/ml/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "durkit/common.hpp"

namespace durkit::ml {

ClassificationReport classificationMetrics(const std::vector<std::string>& truth,
                                           const std::vector<std::string>& predicted) {
    if (truth.empty()) fail("E_EMPTY", "no labels to score");
    if (truth.size() != predicted.size())
        fail("E_INVALID_ARG", "label vectors differ in length");

    std::set<std::string> classSet(truth.begin(), truth.end());
    classSet.insert(predicted.begin(), predicted.end());

    ClassificationReport rep;
    rep.classes.assign(classSet.begin(), classSet.end());
    rep.total = truth.size();
    std::map<std::string, std::size_t> id;
    for (std::size_t i = 0; i < rep.classes.size(); ++i) id[rep.classes[i]] = i;

    rep.confusion.assign(rep.classes.size(),
                         std::vector<std::size_t>(rep.classes.size(), 0));
    for (std::size_t i = 0; i < truth.size(); ++i)
        rep.confusion[id[truth[i]]][id[predicted[i]]]++;

    std::size_t trace = 0;
    for (std::size_t c = 0; c < rep.classes.size(); ++c) trace += rep.confusion[c][c];
    rep.accuracy = static_cast<double>(trace) / static_cast<double>(rep.total);

    double supportSum = 0.0;
    for (std::size_t c = 0; c < rep.classes.size(); ++c) {
        ClassMetrics m;
        m.label = rep.classes[c];
        std::size_t tp = rep.confusion[c][c], fp = 0, fn = 0;
        for (std::size_t k = 0; k < rep.classes.size(); ++k) {
            if (k == c) continue;
            fp += rep.confusion[k][c];
            fn += rep.confusion[c][k];
        }
        m.support = tp + fn;
        if (tp + fp == 0) {
            m.precision = 0.0;
            m.neverPredicted = true;
        } else {
            m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        m.recall = (tp + fn) == 0 ? 0.0
                                  : static_cast<double>(tp) / static_cast<double>(tp + fn);
        m.f1 = (m.precision + m.recall) == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        rep.macroPrecision += m.precision;
        rep.macroRecall += m.recall;
        rep.macroF1 += m.f1;
        rep.weightedPrecision += m.precision * static_cast<double>(m.support);
        rep.weightedRecall += m.recall * static_cast<double>(m.support);
        rep.weightedF1 += m.f1 * static_cast<double>(m.support);
        supportSum += static_cast<double>(m.support);
        rep.perClass.push_back(m);
    }
    const double g = static_cast<double>(rep.classes.size());
    rep.macroPrecision /= g;
    rep.macroRecall /= g;
    rep.macroF1 /= g;
    rep.weightedPrecision /= supportSum;
    rep.weightedRecall /= supportSum;
    rep.weightedF1 /= supportSum;
    return rep;
}

std::string formatReport(const ClassificationReport& report) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    std::size_t nameWidth = 12;
    for (const auto& m : report.perClass) nameWidth = std::max(nameWidth, m.label.size() + 2);

    os << std::setw(static_cast<int>(nameWidth)) << "" << std::setw(11) << "precision"
       << std::setw(11) << "recall" << std::setw(11) << "f1-score" << std::setw(11)
       << "support" << '\n';
    for (const auto& m : report.perClass) {
        os << std::setw(static_cast<int>(nameWidth)) << m.label << std::setw(11)
           << m.precision << std::setw(11) << m.recall << std::setw(11) << m.f1
           << std::setw(11) << m.support;
        if (m.neverPredicted) os << "  (never predicted)";
        os << '\n';
    }
    os << '\n'
       << std::setw(static_cast<int>(nameWidth)) << "accuracy" << std::setw(33) << ""
       << std::setprecision(4) << report.accuracy << '\n';
    os << std::setw(static_cast<int>(nameWidth)) << "macro avg" << std::setw(11)
       << report.macroPrecision << std::setw(11) << report.macroRecall << std::setw(11)
       << report.macroF1 << std::setw(11) << report.total << '\n';
    os << std::setw(static_cast<int>(nameWidth)) << "weighted avg" << std::setw(11)
       << report.weightedPrecision << std::setw(11) << report.weightedRecall
       << std::setw(11) << report.weightedF1 << std::setw(11) << report.total << '\n';

    os << "\nconfusion matrix (rows = true class)\n";
    for (std::size_t r = 0; r < report.classes.size(); ++r) {
        os << std::setw(static_cast<int>(nameWidth)) << report.classes[r];
        for (std::size_t c = 0; c < report.classes.size(); ++c)
            os << std::setw(8) << report.confusion[r][c];
        os << '\n';
    }
    return os.str();
}

}  // namespace durkit::ml
