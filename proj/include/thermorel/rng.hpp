#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "thermorel/common.hpp"

namespace thermorel {

/// Explicitly seeded generator with a fully specified algorithm so Monte Carlo
/// runs are bit-reproducible across platforms: the engine is std::mt19937_64
/// (exactly specified by the standard) and uniforms are formed as
/// (engine() >> 11) * 2^-53, i.e. 53 random bits in [0,1).
class SeededRng {
public:
    explicit SeededRng(uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection-free scaling (n well below 2^53).
    uint64_t below(uint64_t n) { return static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n; }

    /// Derive an independent stream for replication i (splitmix64 of seed, i).
    static uint64_t stream_seed(uint64_t seed, uint64_t index) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::string state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }
    void restore(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
        if (is.fail()) throw ValidationError("SeededRng::restore: malformed state string");
    }

private:
    std::mt19937_64 engine_;
};

/// Poisson draw by counting unit-exponential arrivals: K = #{k : sum E_i <= mean}
/// with E_i = -log(U_i). Exact for every mean and free of underflow.
inline int sample_poisson(SeededRng& rng, double mean) {
    if (mean < 0.0) throw ValidationError("sample_poisson: negative mean");
    if (mean == 0.0) return 0;
    int k = 0;
    double acc = 0.0;
    for (;;) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        acc += -std::log(u);
        if (acc > mean) return k;
        ++k;
    }
}

/// Draws indices with probability proportional to nonnegative weights
/// (cumulative table + binary search).
class DiscreteSampler {
public:
    explicit DiscreteSampler(std::span<const double> weights) {
        cum_.reserve(weights.size());
        double s = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ValidationError("DiscreteSampler: negative weight");
            s += w;
            cum_.push_back(s);
        }
        total_ = s;
    }

    double total() const { return total_; }

    int draw(SeededRng& rng) const {
        if (total_ <= 0.0) throw ValidationError("DiscreteSampler: all weights zero");
        const double u = rng.uniform() * total_;
        int lo = 0, hi = static_cast<int>(cum_.size()) - 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (cum_[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

private:
    std::vector<double> cum_;
    double total_ = 0.0;
};

}  // namespace thermorel
