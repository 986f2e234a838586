#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace qnmf {

// splitmix64 with explicit samplers, so seeded runs reproduce bit-for-bit
// regardless of standard-library distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_{seed} {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, one spare cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, n)
    uint64_t uniform_int(uint64_t n) { return next_u64() % n; }

private:
    uint64_t state_;
    double spare_{0.0};
    bool has_spare_{false};
};

// Exactly `count` distinct indices out of [0, total), by partial Fisher-Yates.
inline std::vector<size_t> sample_indices(size_t total, size_t count, Rng& rng) {
    std::vector<size_t> idx(total);
    std::iota(idx.begin(), idx.end(), size_t{0});
    if (count > total) count = total;
    for (size_t i = 0; i < count; ++i) {
        const size_t j = i + size_t(rng.uniform_int(total - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

} // namespace qnmf
