#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace treent {

// xoshiro256++ with splitmix64 seeding. We roll our own generator and
// bounded-draw helpers so that results are identical across standard
// libraries and platforms (std::uniform_int_distribution is not portable).
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    // Independent stream for task `index` of a seeded run.
    static Rng stream(uint64_t master_seed, uint64_t index) {
        uint64_t x = master_seed;
        uint64_t a = splitmix64(x);
        uint64_t y = index + 0x9e3779b97f4a7c15ULL;
        uint64_t b = splitmix64(y);
        return Rng(a ^ (b + 0x632be59bd9b4e019ULL));
    }

    uint64_t next() {
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, n), n >= 1. Lemire rejection, unbiased.
    uint64_t below(uint64_t n) {
        uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        uint64_t l = static_cast<uint64_t>(m);
        if (l < n) {
            uint64_t t = (0 - n) % n;
            while (l < t) {
                x = next();
                m = static_cast<__uint128_t>(x) * n;
                l = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    int below_int(int n) { return static_cast<int>(below(static_cast<uint64_t>(n))); }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Exp(1) variate (for Dirichlet draws).
    double exponential() {
        double u = uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        return -std::log(u);
    }

    // Draw an index from a normalized probability vector.
    int categorical(const std::vector<double>& probs) {
        double u = uniform();
        double acc = 0.0;
        for (size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t s_[4];
};

}  // namespace treent
