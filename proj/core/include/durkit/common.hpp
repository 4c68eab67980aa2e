#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace durkit {

/// Error with a stable machine-parsable code plus human-readable text.
/// The CLI prints these as "error[CODE] text" and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

uint64_t mixSeed(uint64_t seed, uint64_t stream);

/// Deterministic random generator. The engine is mt19937_64 (sequence fixed
/// by the standard) and every distribution is derived arithmetically from
/// raw 64-bit draws, so results are identical across platforms and
/// independent of the thread schedule when each task forks its own stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t uniformIndex(std::size_t n);

    double normal(double mean = 0.0, double sd = 1.0);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = uniformIndex(i + 1);
            std::swap(v[i], v[j]);
        }
    }

    /// Independent generator for a parallel task or pipeline stage.
    Rng fork(uint64_t stream) const { return Rng(mixSeed(seedOrigin_, stream)); }

    static Rng seeded(uint64_t seed) {
        Rng r(mixSeed(seed, 0));
        r.seedOrigin_ = seed;
        return r;
    }

private:
    std::mt19937_64 engine_;
    uint64_t seedOrigin_ = 0;
    bool haveSpare_ = false;
    double spare_ = 0.0;
};

/// Runs body(i) for i in [0, count). Tasks must be independent; any
/// determinism they need comes from per-index forked generators, so the
/// result does not depend on threads.
void parallelFor(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

// ---- string helpers ----------------------------------------------------

std::vector<std::string> split(const std::string& line, char sep);
std::vector<std::string> splitWhitespace(const std::string& line);
std::string trim(const std::string& s);
std::string toLower(const std::string& s);
std::string joinStrings(const std::vector<std::string>& parts, const std::string& sep);

/// Parses a finite double; returns false on garbage or trailing junk.
bool tryParseDouble(const std::string& s, double& out);
bool tryParseLong(const std::string& s, long long& out);

std::string formatDouble(double v, int precision = 6);

/// Shortest decimal form that parses back to exactly the same double.
std::string formatShortest(double v);

// ---- numeric helpers ---------------------------------------------------

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be ascending and non-empty; q in [0, 1].
double quantileSorted(const std::vector<double>& sorted, double q);

double meanOf(const std::vector<double>& v);

/// Standard normal CDF.
double normalCdf(double z);

/// 64-bit FNV-1a, used for config hashing.
uint64_t fnv1a(const std::string& bytes);

}  // namespace durkit
