#include "durkit/stats/lmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "durkit/common.hpp"

namespace durkit::stats {

namespace {

/// Cached cross products; every REML evaluation then works in the
/// low-dimensional (p + q) space through the Woodbury identity.
struct Workspace {
    Eigen::MatrixXd xtx, ztx, ztz;
    Eigen::VectorXd xty, zty;
    double yty = 0.0;
    std::vector<int> blockOffset, blockSize;
    std::size_t n = 0;
    int p = 0, q = 0;

    explicit Workspace(const DesignMatrices& d) {
        n = d.nRows;
        p = static_cast<int>(d.x.cols());
        q = 0;
        for (const auto& b : d.randomBlocks) {
            blockOffset.push_back(q);
            blockSize.push_back(static_cast<int>(b.z.cols()));
            q += static_cast<int>(b.z.cols());
        }
        Eigen::MatrixXd z(n, q);
        int at = 0;
        for (const auto& b : d.randomBlocks) {
            z.middleCols(at, static_cast<int>(b.z.cols())) = b.z;
            at += static_cast<int>(b.z.cols());
        }
        xtx = d.x.transpose() * d.x;
        xty = d.x.transpose() * d.y;
        yty = d.y.dot(d.y);
        if (q > 0) {
            ztx = z.transpose() * d.x;
            zty = z.transpose() * d.y;
            ztz = z.transpose() * z;
        }
    }

    Eigen::VectorXd sqrtGammaPerLevel(const std::vector<double>& gamma) const {
        Eigen::VectorXd s(q);
        for (std::size_t g = 0; g < gamma.size(); ++g)
            s.segment(blockOffset[g], blockSize[g])
                .setConstant(std::sqrt(std::max(gamma[g], 0.0)));
        return s;
    }
};

struct Evaluation {
    double criterion = 0.0;   // profiled -2 restricted log-likelihood
    double logDetW = 0.0;
    Eigen::MatrixXd xtWiX;
    Eigen::VectorXd xtWiY;
    double ytWiY = 0.0;
    Eigen::VectorXd beta;
    double sigma2 = 0.0;      // REML residual variance
};

Evaluation evaluateReml(const Workspace& ws, const std::vector<double>& gamma) {
    Evaluation ev;
    if (ws.q > 0) {
        const Eigen::VectorXd s = ws.sqrtGammaPerLevel(gamma);
        Eigen::MatrixXd core = s.asDiagonal() * ws.ztz * s.asDiagonal();
        core.diagonal().array() += 1.0;
        Eigen::LLT<Eigen::MatrixXd> llt(core);
        if (llt.info() != Eigen::Success)
            fail("E_SINGULAR", "random-effects system is not positive definite");
        ev.logDetW = 0.0;
        for (int i = 0; i < ws.q; ++i)
            ev.logDetW += 2.0 * std::log(llt.matrixL()(i, i));

        const Eigen::MatrixXd sZtX = s.asDiagonal() * ws.ztx;
        const Eigen::VectorXd sZtY = s.asDiagonal() * ws.zty;
        ev.xtWiX = ws.xtx - sZtX.transpose() * llt.solve(sZtX);
        ev.xtWiY = ws.xty - sZtX.transpose() * llt.solve(sZtY);
        ev.ytWiY = ws.yty - sZtY.dot(llt.solve(sZtY));
    } else {
        ev.logDetW = 0.0;
        ev.xtWiX = ws.xtx;
        ev.xtWiY = ws.xty;
        ev.ytWiY = ws.yty;
    }

    Eigen::LLT<Eigen::MatrixXd> fixedLlt(ev.xtWiX);
    if (fixedLlt.info() != Eigen::Success)
        fail("E_SINGULAR", "fixed-effects matrix is rank deficient");
    ev.beta = fixedLlt.solve(ev.xtWiY);
    double logDetXtWiX = 0.0;
    for (int i = 0; i < static_cast<int>(ev.xtWiX.rows()); ++i)
        logDetXtWiX += 2.0 * std::log(fixedLlt.matrixL()(i, i));

    const double nMinusP = static_cast<double>(ws.n) - static_cast<double>(ws.p);
    const double rssW = std::max(ev.ytWiY - ev.beta.dot(ev.xtWiY), 1e-300);
    ev.sigma2 = rssW / nMinusP;
    ev.criterion = nMinusP * std::log(ev.sigma2) + ev.logDetW + logDetXtWiX +
                   nMinusP * (1.0 + std::log(2.0 * M_PI));
    return ev;
}

/// Nelder-Mead on the log variance ratios.
struct Simplex {
    std::vector<std::vector<double>> points;
    std::vector<double> values;
};

std::vector<double> nelderMead(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> start, double tolerance,
                               int maxEvaluations, bool* converged) {
    const std::size_t d = start.size();
    *converged = true;
    if (d == 0) return start;

    Simplex s;
    s.points.push_back(start);
    for (std::size_t i = 0; i < d; ++i) {
        auto p = start;
        p[i] += 0.7;
        s.points.push_back(p);
    }
    int evals = 0;
    s.values.resize(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
        s.values[i] = f(s.points[i]);
        ++evals;
    }

    auto orderSimplex = [&]() {
        std::vector<std::size_t> idx(d + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
        Simplex t;
        for (std::size_t i : idx) {
            t.points.push_back(s.points[i]);
            t.values.push_back(s.values[i]);
        }
        s = std::move(t);
    };

    while (evals < maxEvaluations) {
        orderSimplex();
        double spread = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            spread = std::max(spread, std::abs(s.values[i] - s.values[0]));
        double width = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t c = 0; c < d; ++c)
                width = std::max(width, std::abs(s.points[i][c] - s.points[0][c]));
        if (spread < tolerance && width < 1e2 * tolerance) return s.points[0];

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t c = 0; c < d; ++c) centroid[c] += s.points[i][c] / static_cast<double>(d);

        auto blend = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t c = 0; c < d; ++c)
                p[c] = centroid[c] + t * (s.points[d][c] - centroid[c]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        ++evals;
        if (fr < s.values[0]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                s.points[d] = expanded;
                s.values[d] = fe;
            } else {
                s.points[d] = reflected;
                s.values[d] = fr;
            }
            continue;
        }
        if (fr < s.values[d - 1]) {
            s.points[d] = reflected;
            s.values[d] = fr;
            continue;
        }
        const auto contracted = blend(fr < s.values[d] ? -0.5 : 0.5);
        const double fc = f(contracted);
        ++evals;
        if (fc < std::min(fr, s.values[d])) {
            s.points[d] = contracted;
            s.values[d] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 1; i <= d; ++i) {
            for (std::size_t c = 0; c < d; ++c)
                s.points[i][c] = s.points[0][c] + 0.5 * (s.points[i][c] - s.points[0][c]);
            s.values[i] = f(s.points[i]);
            ++evals;
        }
    }
    orderSimplex();
    *converged = false;
    return s.points[0];
}

double mlLogLikFromWorkspace(const Workspace& ws, const std::vector<double>& gamma,
                             double sigma2e, const Eigen::VectorXd& beta) {
    Evaluation ev = evaluateReml(ws, gamma);
    const double rW =
        ev.ytWiY - 2.0 * beta.dot(ev.xtWiY) + beta.dot(ev.xtWiX * beta);
    const double n = static_cast<double>(ws.n);
    return -0.5 * (n * std::log(2.0 * M_PI * sigma2e) + ev.logDetW + rW / sigma2e);
}

}  // namespace

LmmFit fitLmmReml(const DesignMatrices& design, const LmmOptions& options) {
    Workspace ws(design);
    if (ws.n <= static_cast<std::size_t>(ws.p))
        fail("E_INVALID_ARG", "more fixed coefficients than rows");
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.x);
        if (qr.rank() < design.x.cols())
            fail("E_SINGULAR", "fixed-effects matrix is rank deficient");
    }

    const std::size_t nBlocks = design.randomBlocks.size();
    auto criterionOf = [&](const std::vector<double>& logGamma) {
        std::vector<double> gamma(logGamma.size());
        for (std::size_t i = 0; i < gamma.size(); ++i)
            gamma[i] = std::exp(std::min(std::max(logGamma[i], -40.0), 40.0));
        return evaluateReml(ws, gamma).criterion;
    };

    bool converged = true;
    std::vector<double> best(nBlocks, 0.0);
    if (nBlocks > 0) {
        best = nelderMead(criterionOf, best, options.tolerance, options.maxEvaluations,
                          &converged);
        if (!converged) {
            // one restart from a perturbed optimum
            auto start = best;
            for (auto& v : start) v += 0.31;
            bool secondTry = true;
            auto second = nelderMead(criterionOf, start, options.tolerance,
                                     options.maxEvaluations, &secondTry);
            if (criterionOf(second) < criterionOf(best)) best = second;
            converged = secondTry;
        }
    }

    std::vector<double> gamma(nBlocks);
    for (std::size_t i = 0; i < nBlocks; ++i)
        gamma[i] = std::exp(std::min(std::max(best[i], -40.0), 40.0));
    std::vector<bool> boundary(nBlocks, false);

    // a variance ratio whose removal does not worsen the criterion sits on
    // the zero boundary
    if (nBlocks > 0) {
        double current = evaluateReml(ws, gamma).criterion;
        bool pinned = false;
        for (std::size_t g = 0; g < nBlocks; ++g) {
            auto trial = gamma;
            trial[g] = 1e-12;
            const double c = evaluateReml(ws, trial).criterion;
            if (c <= current + 1e-8) {
                gamma = trial;
                current = c;
                boundary[g] = true;
                pinned = true;
            }
        }
        if (pinned) {
            // re-polish the remaining free ratios
            std::vector<std::size_t> free;
            for (std::size_t g = 0; g < nBlocks; ++g)
                if (!boundary[g]) free.push_back(g);
            if (!free.empty()) {
                auto sub = [&](const std::vector<double>& logSub) {
                    auto full = gamma;
                    for (std::size_t i = 0; i < free.size(); ++i)
                        full[free[i]] = std::exp(logSub[i]);
                    return evaluateReml(ws, full).criterion;
                };
                std::vector<double> start;
                for (std::size_t g : free) start.push_back(std::log(gamma[g]));
                bool polished = true;
                auto refined =
                    nelderMead(sub, start, options.tolerance, options.maxEvaluations, &polished);
                if (sub(refined) <= current) {
                    for (std::size_t i = 0; i < free.size(); ++i)
                        gamma[free[i]] = std::exp(refined[i]);
                }
            }
        }
    }

    if (!converged)
        fail("E_CONVERGENCE", "REML optimizer did not converge; final criterion " +
                                  formatShortest(evaluateReml(ws, gamma).criterion));

    const Evaluation ev = evaluateReml(ws, gamma);

    LmmFit fit;
    fit.fixedNames = design.fixedNames;
    fit.beta = ev.beta;
    fit.nRows = ws.n;
    fit.sigma2Residual = ev.sigma2;
    fit.remlCriterion = ev.criterion;
    fit.converged = true;

    Eigen::LLT<Eigen::MatrixXd> llt(ev.xtWiX);
    const Eigen::MatrixXd cov =
        ev.sigma2 * llt.solve(Eigen::MatrixXd::Identity(ws.p, ws.p));
    fit.seBeta.resize(ws.p);
    for (int i = 0; i < ws.p; ++i) fit.seBeta[i] = std::sqrt(cov(i, i));

    for (std::size_t g = 0; g < nBlocks; ++g) {
        VarianceComponent vc;
        vc.factor = design.randomBlocks[g].factor;
        vc.boundary = boundary[g];
        vc.sigma2 = boundary[g] ? 0.0 : gamma[g] * ev.sigma2;
        fit.components.push_back(vc);
    }

    // profile ML log-likelihood at the REML variance ratios: beta is the
    // GLS estimate and the residual variance re-profiles to rssW / n
    {
        const double n = static_cast<double>(ws.n);
        const double rssW = std::max(ev.ytWiY - ev.beta.dot(ev.xtWiY), 1e-300);
        fit.mlLogLik = -0.5 * (n * std::log(2.0 * M_PI * rssW / n) + ev.logDetW + n);
    }
    fit.df = static_cast<double>(ws.p) + static_cast<double>(nBlocks) + 1.0;
    fit.aic = 2.0 * fit.df - 2.0 * fit.mlLogLik;
    return fit;
}

std::vector<WaldRow> waldTests(const LmmFit& fit) {
    std::vector<WaldRow> rows;
    for (int i = 0; i < fit.beta.size(); ++i) {
        WaldRow row;
        row.name = fit.fixedNames[static_cast<std::size_t>(i)];
        row.estimate = fit.beta[i];
        row.se = fit.seBeta[i];
        row.t = row.se > 0.0 ? row.estimate / row.se : 0.0;
        row.p = 2.0 * (1.0 - normalCdf(std::abs(row.t)));
        rows.push_back(row);
    }
    return rows;
}

double mlLogLik(const DesignMatrices& design, const std::vector<double>& sigma2Group,
                double sigma2Residual, const Eigen::VectorXd& beta) {
    if (sigma2Residual <= 0.0)
        fail("E_INVALID_ARG", "residual variance must be positive");
    if (sigma2Group.size() != design.randomBlocks.size())
        fail("E_INVALID_ARG", "one group variance per random block is required");
    for (double v : sigma2Group)
        if (v < 0.0)
            fail("E_SINGULAR", "negative group variance makes the marginal covariance invalid");
    Workspace ws(design);
    std::vector<double> gamma(sigma2Group.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = sigma2Group[i] / sigma2Residual;
    return mlLogLikFromWorkspace(ws, gamma, sigma2Residual, beta);
}

}  // namespace durkit::stats
