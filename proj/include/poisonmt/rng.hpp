#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

namespace poisonmt {

// splitmix64 step; the backbone of every random draw in the toolkit.
// Deterministic across platforms, unlike <random> distributions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// FNV-1a over bytes.
inline std::uint64_t hash_bytes(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Warm up so adjacent seeds decorrelate immediately.
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Unbiased integer in [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // Uniform in [0, 1) with 53 bits of precision.
    double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), in ascending order (Floyd's algorithm).
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::uint64_t state_;
};

inline std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> picked;
    if (k == 0 || n == 0) return picked;
    if (k >= n) {
        picked.resize(n);
        std::iota(picked.begin(), picked.end(), std::size_t{0});
        return picked;
    }
    std::vector<bool> in(n, false);
    picked.reserve(k);
    for (std::size_t i = n - k; i < n; ++i) {
        std::size_t j = index(i + 1);
        if (in[j]) j = i;
        in[j] = true;
        picked.push_back(j);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

// Per-record stream derivation: randomness for record i depends only on
// (seed, i), never on processing order or thread count.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t record_index) {
    return Rng(hash_combine(seed, record_index));
}

// Per-stage stream for the CLI: stage name hashed into the global seed.
inline std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
    return hash_combine(seed, hash_bytes(stage));
}

} // namespace poisonmt
