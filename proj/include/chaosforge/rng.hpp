#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace chaosforge {

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), h);
}

// Seeded generator with hand-rolled distributions. std::mt19937_64 has a
// standard-specified sequence, but the std distributions do not, so every
// draw here goes through our own mappings to keep artifacts reproducible
// across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : base_seed_(seed), eng_(seed) {}

    uint64_t base_seed() const { return base_seed_; }

    uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n), n > 0
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(eng_()) * n) >> 64);
    }

    // standard normal, Marsaglia polar with cached spare
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    // Fisher-Yates
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // draw an index proportional to nonnegative weights; all-zero falls back to uniform
    size_t categorical(const std::vector<double>& w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (total <= 0.0) return static_cast<size_t>(below(w.size()));
        double u = uniform01() * total;
        double cum = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            cum += w[i];
            if (u < cum) return i;
        }
        return w.size() - 1;
    }

    // independent child stream; derived from the base seed only, so the
    // parent's consumption history cannot shift it
    Rng fork(const std::string& label) const {
        uint64_t h = fnv1a64(&base_seed_, sizeof(base_seed_));
        h = fnv1a64(label, h);
        return Rng(h);
    }

private:
    uint64_t base_seed_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace chaosforge
