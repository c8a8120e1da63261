#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace uplift {

// ---------------------------------------------------------------------------
// Error taxonomy.  Everything thrown by the library derives from Error so the
// CLI can map failures onto exit codes (configuration errors -> 2, runtime
// failures -> 1).
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : Error { using Error::Error; };        // CSV header / column mapping problems
struct ParseError : Error { using Error::Error; };         // malformed cell values
struct ValidationError : Error { using Error::Error; };    // dataset-level contract violations
struct DistributionError : Error { using Error::Error; };  // zero-total-weight class distribution
struct SplitError : Error { using Error::Error; };         // split invalid on the given node data
struct FitError : Error { using Error::Error; };           // degenerate weights, empty ensembles
struct PredictError : Error { using Error::Error; };       // record does not conform to the schema
struct EvalError : Error { using Error::Error; };          // empty test groups, failed repetitions
struct ConfigError : Error { using Error::Error; };        // bad run configuration or flags
struct UsageError : Error { using Error::Error; };         // API misuse (e.g. scoring an empty ensemble)

// ---------------------------------------------------------------------------
// Deterministic random stream.  mt19937_64 is fully specified by the
// standard; the draws below are hand-rolled because the standard library
// distributions are implementation-defined, and seeded runs must reproduce
// bit-exactly.
// ---------------------------------------------------------------------------
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Independent stream seed for (seed, stream); splitmix64 finalizer.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // (0, 1); used where a draw of exactly zero must be impossible
    double uniform_open() { return (static_cast<double>(gen_() >> 12) + 0.5) * 0x1.0p-52; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential(rate 1); strictly positive
    double exponential() { return -std::log(uniform_open()); }

    bool bernoulli(double p) { return uniform01() < p; }

    // uniform index in [0, n)
    std::size_t index(std::size_t n) {
        const auto k = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace uplift
