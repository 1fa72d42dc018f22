#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynbd {

// Deterministic 64-bit generator (splitmix64). Used everywhere a seed
// matters so results do not depend on the platform's std::distribution
// implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be > 0");
        // Rejection sampling to avoid modulo bias.
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % n;
    }

private:
    uint64_t state_;
};

// Derives a stage seed from a global seed and a stream label. This is the
// single seed-splitting scheme used by the whole pipeline: every stage and
// every per-target job gets fork(global, stage_tag, index).
inline uint64_t fork_seed(uint64_t seed, uint64_t stream, uint64_t index = 0) {
    Rng r(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL));
    r.next();
    uint64_t s = r.next() ^ (index * 0xd1b54a32d192ed03ULL);
    Rng r2(s);
    return r2.next();
}

// Sample k distinct indices from [0,n), returned sorted ascending.
inline std::vector<int> sample_distinct(int n, int k, Rng& rng) {
    if (k > n) throw std::invalid_argument("sample_distinct: k > n");
    // Floyd's algorithm.
    std::vector<int> out;
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int j = n - k; j < n; ++j) {
        int t = static_cast<int>(rng.below(static_cast<uint64_t>(j) + 1));
        if (seen[static_cast<size_t>(t)]) t = j;
        seen[static_cast<size_t>(t)] = true;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline int ceil_ratio_count(double ratio, double base) {
    double raw = ratio * base;
    int c = static_cast<int>(raw);
    if (static_cast<double>(c) < raw) ++c;
    return c;
}

} // namespace dynbd
