#pragma once
// Deterministic RNG helpers. The standard distributions are
// implementation-defined, so bounded draws are mapped here by hand to keep
// generated corpora and evaluations byte-identical across platforms.

#include <cstdint>
#include <random>
#include <vector>

namespace w5h {

inline uint64_t splitmix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n); n must be positive.
    size_t index(size_t n)
    {
        // Rejection sampling keeps the draw unbiased.
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return static_cast<size_t>(x % n);
    }

    // Uniform integer in [lo, hi] inclusive.
    int range(int lo, int hi)
    {
        return lo + static_cast<int>(index(static_cast<size_t>(hi - lo + 1)));
    }

    // Uniform in [0, 1).
    double real()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return real() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& v)
    {
        return v[index(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    // First k elements of a shuffle; distinct positions.
    template <typename T>
    std::vector<T> sample(const std::vector<T>& v, size_t k)
    {
        std::vector<size_t> idx(v.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        shuffle(idx);
        if (k > v.size()) k = v.size();
        std::vector<T> out;
        out.reserve(k);
        for (size_t i = 0; i < k; ++i) out.push_back(v[idx[i]]);
        return out;
    }

    // Index drawn proportionally to the given non-negative weights.
    size_t weighted(const std::vector<double>& weights)
    {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = real() * total;
        for (size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace w5h
