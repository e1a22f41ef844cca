#ifndef FGL_RNG_HPP
#define FGL_RNG_HPP

#include <cstdint>
#include <random>
#include <utility>

namespace fgl {

/// splitmix64 finalizer, used to mix seeds and derive child streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Combine a base seed with a child index into an independent stream seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t child_id) {
    return mix64(base ^ mix64(child_id));
}

/// Deterministic RNG. mt19937_64 is fully specified by the standard; the
/// float/int mappings below are hand-rolled because std distributions are
/// implementation-defined and would break the bit-identical reruns contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    float uniform_f(float lo, float hi) {
        return static_cast<float>(uniform(static_cast<double>(lo), static_cast<double>(hi)));
    }

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Fisher-Yates shuffle with this engine.
    template <typename Vec>
    void shuffle(Vec& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fgl

#endif
