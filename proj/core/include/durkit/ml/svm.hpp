#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "durkit/ml/dataset.hpp"

namespace durkit::ml {

enum class SvmKernel { Linear, Rbf };

struct SvmParams {
    SvmKernel kernel = SvmKernel::Linear;
    double c = 1.0;
    double gamma = 1.0;                 // rbf width
    bool balancedClassWeight = false;   // reweights hinge terms by n/(g*n_class)
    double kktTolerance = 1e-4;
    double relativeGapTolerance = 1e-6;
    std::size_t maxEpochs = 100000;
};

/// One-vs-rest binary machine. Linear problems keep the primal weights;
/// rbf problems keep the support expansion.
struct SvmBinary {
    std::vector<double> weights;  // linear: length p, plus bias below
    double bias = 0.0;
    std::vector<std::size_t> supportRows;   // rbf
    std::vector<double> supportCoefs;       // rbf: alpha_i * y_i
    std::vector<std::vector<double>> supportVectors;
    double dualityGap = 0.0;
    std::size_t epochs = 0;
};

struct SvmModel {
    SvmParams params;
    std::vector<std::string> classes;
    std::vector<std::string> featureNames;
    std::vector<SvmBinary> machines;  // one per class
    uint64_t seed = 0;

    double decisionValue(std::size_t machine, const double* row) const;
};

/// Linear problems are solved by dual coordinate descent on the
/// L2-regularized hinge objective (bias handled as an augmented constant
/// feature); rbf problems by maximal-violating-pair SMO under the box
/// [0, C]. Exceeding the epoch budget throws with the final duality gap.
SvmModel fitSvm(const Dataset& data, const SvmParams& params, uint64_t seed,
                int threads = 1);

/// argmax of the per-class decision values; ties break toward the
/// lexicographically smallest class.
std::vector<int> predictSvm(const SvmModel& model, const Dataset& data);

/// gamma = 1 / (p * Var(X)) as the "scale" heuristic, 1/p for "auto".
double gammaScale(const Dataset& data);
double gammaAuto(const Dataset& data);

}  // namespace durkit::ml
