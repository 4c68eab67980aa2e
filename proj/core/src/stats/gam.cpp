#include "durkit/stats/gam.hpp"

#include <algorithm>
#include <cmath>

#include "durkit/common.hpp"

namespace durkit::stats {

namespace {

struct Assembled {
    Eigen::MatrixXd c;           // n x p stacked design
    Eigen::MatrixXd ctc;
    Eigen::VectorXd cty;
    double yty = 0.0;
    std::vector<GamBlock> blocks;
    std::vector<Eigen::MatrixXd> penalties;  // aligned with penalized blocks
    std::vector<int> penalizedBlock;         // block index per lambda
    std::size_t n = 0;
};

Assembled assemble(const DesignMatrices& design) {
    Assembled a;
    a.n = design.nRows;
    int p = static_cast<int>(design.x.cols());
    for (const auto& s : design.smooths) p += static_cast<int>(s.design.cols());
    for (const auto& r : design.randomBlocks) p += static_cast<int>(r.z.cols());

    a.c.resize(static_cast<Eigen::Index>(design.nRows), p);
    int at = 0;

    GamBlock parametric;
    parametric.kind = GamBlock::Kind::Parametric;
    parametric.name = "parametric";
    parametric.offset = at;
    parametric.size = static_cast<int>(design.x.cols());
    a.c.middleCols(at, parametric.size) = design.x;
    at += parametric.size;
    a.blocks.push_back(parametric);

    for (const auto& s : design.smooths) {
        GamBlock b;
        b.kind = GamBlock::Kind::Smooth;
        b.name = s.name;
        b.offset = at;
        b.size = static_cast<int>(s.design.cols());
        a.c.middleCols(at, b.size) = s.design;
        at += b.size;
        a.penalizedBlock.push_back(static_cast<int>(a.blocks.size()));
        a.penalties.push_back(s.penalty);
        a.blocks.push_back(b);
    }
    for (const auto& r : design.randomBlocks) {
        GamBlock b;
        b.kind = GamBlock::Kind::RandomIntercept;
        b.name = r.factor;
        b.offset = at;
        b.size = static_cast<int>(r.z.cols());
        a.c.middleCols(at, b.size) = r.z;
        at += b.size;
        a.penalizedBlock.push_back(static_cast<int>(a.blocks.size()));
        a.penalties.push_back(Eigen::MatrixXd::Identity(b.size, b.size));
        a.blocks.push_back(b);
    }

    a.ctc = a.c.transpose() * a.c;
    a.cty = a.c.transpose() * design.y;
    a.yty = design.y.dot(design.y);
    return a;
}

struct Solved {
    Eigen::VectorXd theta;
    double rss = 0.0;
    double edf = 0.0;
    double gcv = 0.0;
    Eigen::MatrixXd penalized;  // C'C + S_lambda
};

Solved solveAt(const Assembled& a, const std::vector<double>& lambdas) {
    Eigen::MatrixXd m = a.ctc;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const auto& block = a.blocks[static_cast<std::size_t>(a.penalizedBlock[j])];
        m.block(block.offset, block.offset, block.size, block.size) +=
            lambdas[j] * a.penalties[j];
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
        fail("E_SINGULAR", "penalized least-squares system is singular");

    Solved s;
    s.penalized = m;
    s.theta = ldlt.solve(a.cty);
    s.rss = std::max(a.yty - 2.0 * s.theta.dot(a.cty) + s.theta.dot(a.ctc * s.theta), 0.0);
    const Eigen::MatrixXd influence = ldlt.solve(a.ctc);
    s.edf = influence.trace();
    const double n = static_cast<double>(a.n);
    const double denom = n - s.edf;
    if (denom <= 0.0) fail("E_DEGENERATE", "effective degrees of freedom exhaust the data");
    s.gcv = n * s.rss / (denom * denom);
    return s;
}

double goldenSection(const std::function<double(double)>& f, double lo, double hi,
                     double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double gamGcvAt(const DesignMatrices& design, const std::vector<double>& lambdas) {
    Assembled a = assemble(design);
    if (lambdas.size() != a.penalties.size())
        fail("E_INVALID_ARG", "one lambda per penalized block is required");
    return solveAt(a, lambdas).gcv;
}

GamFit fitGam(const DesignMatrices& design, const GamOptions& options) {
    Assembled a = assemble(design);
    const std::size_t nPen = a.penalties.size();

    std::vector<double> lambdas(nPen, 1.0);
    if (!options.fixedLambdas.empty()) {
        if (options.fixedLambdas.size() != nPen)
            fail("E_INVALID_ARG", "expected " + std::to_string(nPen) +
                                      " smoothing parameters, got " +
                                      std::to_string(options.fixedLambdas.size()));
        lambdas = options.fixedLambdas;
        for (double l : lambdas)
            if (!(l > 0.0)) fail("E_INVALID_ARG", "smoothing parameters must be positive");
    } else if (nPen > 0) {
        // coordinate-wise GCV: coarse grid then golden-section, cycled
        double previousGcv = solveAt(a, lambdas).gcv;
        bool settled = false;
        for (int cycle = 0; cycle < options.maxCycles && !settled; ++cycle) {
            for (std::size_t j = 0; j < nPen; ++j) {
                auto objective = [&](double log10Lambda) {
                    auto trial = lambdas;
                    trial[j] = std::pow(10.0, log10Lambda);
                    return solveAt(a, trial).gcv;
                };
                double bestLog = std::log10(lambdas[j]);
                double bestVal = objective(bestLog);
                for (double g = options.log10LambdaMin; g <= options.log10LambdaMax + 1e-9;
                     g += 1.0) {
                    const double v = objective(g);
                    if (v < bestVal - 1e-14) {
                        bestVal = v;
                        bestLog = g;
                    }
                }
                const double refined =
                    goldenSection(objective, std::max(bestLog - 1.0, options.log10LambdaMin),
                                  std::min(bestLog + 1.0, options.log10LambdaMax), 1e-4);
                if (objective(refined) <= bestVal) bestLog = refined;
                lambdas[j] = std::pow(10.0, bestLog);
            }
            const double gcvNow = solveAt(a, lambdas).gcv;
            if (std::abs(previousGcv - gcvNow) <=
                1e-9 * (1.0 + std::abs(gcvNow)))
                settled = true;
            previousGcv = gcvNow;
        }
        if (!settled && options.maxCycles > 1)
            fail("E_CONVERGENCE", "GCV smoothing-parameter cycle did not settle; last GCV " +
                                      formatShortest(previousGcv));

        // enforce the local-minimum property against halving and doubling
        for (std::size_t j = 0; j < nPen; ++j) {
            for (int guard = 0; guard < 60; ++guard) {
                auto half = lambdas, twice = lambdas;
                half[j] *= 0.5;
                twice[j] *= 2.0;
                const double here = solveAt(a, lambdas).gcv;
                const double below = solveAt(a, half).gcv;
                const double above = solveAt(a, twice).gcv;
                if (below < here && below <= above) {
                    lambdas = half;
                } else if (above < here) {
                    lambdas = twice;
                } else {
                    break;
                }
            }
        }
    }

    const Solved solved = solveAt(a, lambdas);

    GamFit fit;
    fit.nRows = a.n;
    fit.theta = solved.theta;
    fit.blocks = a.blocks;
    fit.fixedNames = design.fixedNames;
    fit.responseName = design.responseName;
    fit.rss = solved.rss;
    fit.totalEdf = solved.edf;
    fit.gcv = solved.gcv;

    for (std::size_t j = 0; j < nPen; ++j)
        fit.blocks[static_cast<std::size_t>(a.penalizedBlock[j])].lambda = lambdas[j];

    // per-block edf from the influence diagonal
    {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(solved.penalized);
        const Eigen::MatrixXd influence = ldlt.solve(a.ctc);
        for (auto& block : fit.blocks) {
            double edf = 0.0;
            for (int i = 0; i < block.size; ++i) edf += influence(block.offset + i, block.offset + i);
            block.edf = edf;
        }
        const double n = static_cast<double>(a.n);
        fit.sigma2 = solved.rss / (n - solved.edf);
        fit.postCov = fit.sigma2 *
                      ldlt.solve(Eigen::MatrixXd::Identity(a.ctc.rows(), a.ctc.cols()));
        const double sigma2Ml = std::max(solved.rss / n, 1e-300);
        fit.logLik = -0.5 * n * (std::log(2.0 * M_PI * sigma2Ml) + 1.0);
        fit.aic = 2.0 * (solved.edf + 1.0) - 2.0 * fit.logLik;
    }

    // carry the smooth geometry so effects can be evaluated later
    for (std::size_t s = 0; s < design.smooths.size(); ++s) {
        const auto& src = design.smooths[s];
        SmoothInfo info;
        info.name = src.name;
        info.basisDim = src.basisDim;
        info.knots = src.knots;
        info.transform = src.transform;
        info.xMin = src.xMin;
        info.xMax = src.xMax;
        info.blockIndex = 1 + static_cast<int>(s);  // parametric block sits first
        // deterministic rug: up to 200 order statistics
        std::vector<double> sorted = src.observed;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t points = std::min<std::size_t>(sorted.size(), 200);
        for (std::size_t i = 0; i < points; ++i) {
            const std::size_t idx = points == 1 ? 0 : i * (sorted.size() - 1) / (points - 1);
            info.rug.push_back(sorted[idx]);
        }
        fit.smooths.push_back(std::move(info));
    }
    return fit;
}

PartialEffect partialEffects(const GamFit& fit, const std::string& covariate,
                             int gridSize) {
    const SmoothInfo* info = nullptr;
    for (const auto& s : fit.smooths)
        if (s.name == covariate) info = &s;
    if (!info)
        fail("E_INVALID_ARG", "'" + covariate + "' has no smooth term in this fit");
    if (gridSize < 2) fail("E_INVALID_ARG", "grid size must be at least 2");

    const GamBlock& block = fit.blocks[static_cast<std::size_t>(info->blockIndex)];
    const Eigen::VectorXd coef = fit.theta.segment(block.offset, block.size);
    const Eigen::MatrixXd cov = fit.postCov.block(block.offset, block.offset,
                                                  block.size, block.size);

    PartialEffect effect;
    effect.covariate = covariate;
    double slopeAccum = 0.0;
    double previous = 0.0;
    for (int i = 0; i < gridSize; ++i) {
        const double x = info->xMin + (info->xMax - info->xMin) *
                                          static_cast<double>(i) /
                                          static_cast<double>(gridSize - 1);
        const Eigen::VectorXd raw = bsplineRow(x, info->knots, info->basisDim);
        const Eigen::VectorXd constrained = info->transform.transpose() * raw;
        const double value = constrained.dot(coef);
        const double variance = constrained.dot(cov * constrained);
        effect.grid.push_back(x);
        effect.fitted.push_back(value);
        effect.se.push_back(std::sqrt(std::max(variance, 0.0)));
        if (i > 0) slopeAccum += value - previous;
        previous = value;
    }
    effect.slopeSign = slopeAccum > 0.0 ? 1 : (slopeAccum < 0.0 ? -1 : 0);
    return effect;
}

Eigen::VectorXd gamFittedValues(const GamFit& fit, const DesignMatrices& design) {
    Assembled a = assemble(design);
    if (a.c.cols() != fit.theta.size())
        fail("E_INVALID_ARG", "fit and design have different column layouts");
    return a.c * fit.theta;
}

}  // namespace durkit::stats
