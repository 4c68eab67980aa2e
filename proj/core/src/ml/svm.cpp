#include "durkit/ml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "durkit/common.hpp"

namespace durkit::ml {

namespace {

constexpr double kTau = 1e-12;

struct BinaryProblem {
    const Dataset& data;
    std::vector<double> y;      // +1 / -1
    std::vector<double> cost;   // per-row C_i
};

BinaryProblem makeProblem(const Dataset& data, int positiveClass, const SvmParams& params) {
    BinaryProblem p{data, {}, {}};
    p.y.resize(data.nRows);
    p.cost.resize(data.nRows);
    const auto counts = data.classCounts();
    const double g = static_cast<double>(data.classes.size());
    const double n = static_cast<double>(data.nRows);
    for (std::size_t r = 0; r < data.nRows; ++r) {
        p.y[r] = data.labels[r] == positiveClass ? 1.0 : -1.0;
        double c = params.c;
        if (params.balancedClassWeight) {
            const double nc =
                static_cast<double>(counts[static_cast<std::size_t>(data.labels[r])]);
            c *= n / (g * nc);
        }
        p.cost[r] = c;
    }
    return p;
}

// ---- linear: dual coordinate descent over the augmented representation ----

SvmBinary solveLinear(const BinaryProblem& prob, const SvmParams& params, Rng rng) {
    const std::size_t n = prob.data.nRows;
    const std::size_t p = prob.data.nCols;
    const std::size_t dim = p + 1;  // trailing constant-1 bias feature

    std::vector<double> alpha(n, 0.0);
    std::vector<double> w(dim, 0.0);
    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0;  // bias feature
        const double* x = prob.data.row(i);
        for (std::size_t c = 0; c < p; ++c) s += x[c] * x[c];
        qii[i] = s;
    }

    auto dot = [&](std::size_t i) {
        const double* x = prob.data.row(i);
        double s = w[p];
        for (std::size_t c = 0; c < p; ++c) s += w[c] * x[c];
        return s;
    };

    auto objectives = [&]() {
        double wNorm = 0.0;
        for (double v : w) wNorm += v * v;
        double hinge = 0.0, alphaSum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            hinge += prob.cost[i] * std::max(0.0, 1.0 - prob.y[i] * dot(i));
            alphaSum += alpha[i];
        }
        const double primal = 0.5 * wNorm + hinge;
        const double dual = alphaSum - 0.5 * wNorm;
        return std::make_pair(primal, primal - dual);
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    double gap = std::numeric_limits<double>::infinity();
    std::size_t epoch = 0;
    for (; epoch < params.maxEpochs; ++epoch) {
        rng.shuffle(order);
        double maxViolation = 0.0;
        for (std::size_t i : order) {
            const double grad = prob.y[i] * dot(i) - 1.0;
            double projected = grad;
            if (alpha[i] <= 0.0)
                projected = std::min(grad, 0.0);
            else if (alpha[i] >= prob.cost[i])
                projected = std::max(grad, 0.0);
            maxViolation = std::max(maxViolation, std::abs(projected));
            if (std::abs(projected) < kTau) continue;
            const double updated =
                std::min(std::max(alpha[i] - grad / qii[i], 0.0), prob.cost[i]);
            const double delta = (updated - alpha[i]) * prob.y[i];
            if (delta != 0.0) {
                const double* x = prob.data.row(i);
                for (std::size_t c = 0; c < p; ++c) w[c] += delta * x[c];
                w[p] += delta;
            }
            alpha[i] = updated;
        }
        if (maxViolation < params.kktTolerance) {
            const auto [primal, g2] = objectives();
            gap = g2;
            if (gap <= params.relativeGapTolerance * (1.0 + std::abs(primal))) break;
        }
    }
    if (epoch >= params.maxEpochs) {
        const auto [primal, finalGap] = objectives();
        fail("E_CONVERGENCE",
             "linear SVM did not converge within " + std::to_string(params.maxEpochs) +
                 " epochs (duality gap " + formatShortest(finalGap) + ", primal " +
                 formatShortest(primal) + ")");
    }

    SvmBinary out;
    out.weights.assign(w.begin(), w.begin() + static_cast<long>(p));
    out.bias = w[p];
    out.dualityGap = gap;
    out.epochs = epoch + 1;
    return out;
}

// ---- rbf: maximal-violating-pair SMO ----------------------------------

struct RbfKernel {
    const Dataset& data;
    double gamma;
    std::vector<double> full;  // cached when small enough
    bool cached = false;

    explicit RbfKernel(const Dataset& d, double g) : data(d), gamma(g) {
        if (d.nRows <= 3000) {
            full.resize(d.nRows * d.nRows);
            for (std::size_t i = 0; i < d.nRows; ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    const double k = eval(i, j);
                    full[i * d.nRows + j] = k;
                    full[j * d.nRows + i] = k;
                }
            cached = true;
        }
    }

    double eval(std::size_t i, std::size_t j) const {
        const double* a = data.row(i);
        const double* b = data.row(j);
        double s = 0.0;
        for (std::size_t c = 0; c < data.nCols; ++c) {
            const double d = a[c] - b[c];
            s += d * d;
        }
        return std::exp(-gamma * s);
    }

    double at(std::size_t i, std::size_t j) const {
        return cached ? full[i * data.nRows + j] : eval(i, j);
    }
};

SvmBinary solveRbf(const BinaryProblem& prob, const SvmParams& params) {
    const std::size_t n = prob.data.nRows;
    RbfKernel kernel(prob.data, params.gamma);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G = Q alpha - e

    auto selectPair = [&](std::size_t& outI, std::size_t& outJ, double& m, double& M) {
        m = -std::numeric_limits<double>::infinity();
        M = std::numeric_limits<double>::infinity();
        outI = n;
        outJ = n;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = -prob.y[k] * grad[k];
            const bool up = (prob.y[k] > 0 && alpha[k] < prob.cost[k]) ||
                            (prob.y[k] < 0 && alpha[k] > 0);
            const bool low = (prob.y[k] > 0 && alpha[k] > 0) ||
                             (prob.y[k] < 0 && alpha[k] < prob.cost[k]);
            if (up && v > m) {
                m = v;
                outI = k;
            }
            if (low && v < M) {
                M = v;
                outJ = k;
            }
        }
    };

    const std::size_t maxIter = std::max<std::size_t>(params.maxEpochs, n * 50);
    std::size_t iter = 0;
    double m = 0, M = 0;
    for (; iter < maxIter; ++iter) {
        std::size_t i, j;
        selectPair(i, j, m, M);
        if (i >= n || j >= n || m - M <= params.kktTolerance) break;

        const double a = std::max(kernel.at(i, i) + kernel.at(j, j) - 2.0 * kernel.at(i, j),
                                  kTau);
        double t = (prob.y[j] * grad[j] - prob.y[i] * grad[i]) / a;

        // box constraints along alpha_i += y_i t, alpha_j -= y_j t
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        if (prob.y[i] > 0) {
            lo = std::max(lo, -alpha[i]);
            hi = std::min(hi, prob.cost[i] - alpha[i]);
        } else {
            lo = std::max(lo, alpha[i] - prob.cost[i]);
            hi = std::min(hi, alpha[i]);
        }
        if (prob.y[j] > 0) {
            lo = std::max(lo, alpha[j] - prob.cost[j]);
            hi = std::min(hi, alpha[j]);
        } else {
            lo = std::max(lo, -alpha[j]);
            hi = std::min(hi, prob.cost[j] - alpha[j]);
        }
        t = std::min(std::max(t, lo), hi);
        if (t == 0.0) break;

        alpha[i] += prob.y[i] * t;
        alpha[j] -= prob.y[j] * t;
        for (std::size_t k = 0; k < n; ++k)
            grad[k] += t * prob.y[k] * (kernel.at(k, i) - kernel.at(k, j));
    }
    if (iter >= maxIter)
        fail("E_CONVERGENCE", "rbf SVM did not converge within " +
                                  std::to_string(maxIter) + " iterations (KKT gap " +
                                  formatShortest(m - M) + ")");

    SvmBinary out;
    std::size_t fi = 0, fj = 0;
    selectPair(fi, fj, m, M);  // refresh the final bounds
    out.dualityGap = std::max(0.0, m - M);
    out.epochs = iter;
    // bias sits midway between the final violating-pair bounds
    out.bias = (m + M) / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (alpha[k] > 0.0) {
            out.supportRows.push_back(k);
            out.supportCoefs.push_back(alpha[k] * prob.y[k]);
            out.supportVectors.emplace_back(prob.data.row(k),
                                            prob.data.row(k) + prob.data.nCols);
        }
    }
    return out;
}

}  // namespace

double SvmModel::decisionValue(std::size_t machine, const double* row) const {
    const SvmBinary& m = machines[machine];
    if (params.kernel == SvmKernel::Linear) {
        double s = m.bias;
        for (std::size_t c = 0; c < m.weights.size(); ++c) s += m.weights[c] * row[c];
        return s;
    }
    double s = m.bias;
    for (std::size_t k = 0; k < m.supportVectors.size(); ++k) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < m.supportVectors[k].size(); ++c) {
            const double d = m.supportVectors[k][c] - row[c];
            d2 += d * d;
        }
        s += m.supportCoefs[k] * std::exp(-params.gamma * d2);
    }
    return s;
}

SvmModel fitSvm(const Dataset& data, const SvmParams& params, uint64_t seed, int threads) {
    if (data.classes.size() < 2) fail("E_INVALID_ARG", "SVM needs at least 2 classes");
    SvmModel model;
    model.params = params;
    model.classes = data.classes;
    model.featureNames = data.featureNames;
    model.seed = seed;
    model.machines.resize(data.classes.size());

    parallelFor(data.classes.size(), threads, [&](std::size_t c) {
        BinaryProblem prob = makeProblem(data, static_cast<int>(c), params);
        if (params.kernel == SvmKernel::Linear) {
            model.machines[c] = solveLinear(prob, params, Rng::seeded(mixSeed(seed, c)));
        } else {
            model.machines[c] = solveRbf(prob, params);
        }
    });
    return model;
}

std::vector<int> predictSvm(const SvmModel& model, const Dataset& data) {
    std::vector<int> out(data.nRows);
    for (std::size_t r = 0; r < data.nRows; ++r) {
        int best = 0;
        double bestValue = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < model.machines.size(); ++c) {
            const double v = model.decisionValue(c, data.row(r));
            if (v > bestValue + 1e-15) {
                bestValue = v;
                best = static_cast<int>(c);
            }
        }
        out[r] = best;
    }
    return out;
}

double gammaScale(const Dataset& data) {
    double mean = 0.0, m2 = 0.0;
    const std::size_t total = data.nRows * data.nCols;
    for (std::size_t i = 0; i < total; ++i) {
        const double d = data.values[i] - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (data.values[i] - mean);
    }
    const double var = total > 0 ? m2 / static_cast<double>(total) : 1.0;
    if (var <= 0.0) return 1.0;
    return 1.0 / (static_cast<double>(data.nCols) * var);
}

double gammaAuto(const Dataset& data) {
    return 1.0 / static_cast<double>(data.nCols);
}

}  // namespace durkit::ml
