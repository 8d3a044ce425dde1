#pragma once
#include <cstdint>

#include "fp.hpp"

namespace koszul {

/// Counter-based keyed generator: the stream for (seed, index) is addressable
/// without replaying anything, so search records can be re-derived standalone.
class CounterRng {
  public:
    CounterRng(uint64_t seed, uint64_t index)
        : state_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(index + 0xD1B54A32D192ED03ull))) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform in [0, n) by rejection (exact, no modulo bias).
    uint64_t below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    uint64_t state_;
};

/// Uniformly random r-dimensional subspace of F_p^ambient: random r x ambient
/// matrices conditioned on full rank have uniformly distributed row spans.
inline Subspace random_subspace(PrimeField p, size_t ambient, size_t r, CounterRng& rng) {
    if (r > ambient) throw dimension_mismatch("subspace dimension exceeds ambient");
    for (;;) {
        FpMatrix m(p, r, ambient);
        for (size_t i = 0; i < r; ++i)
            for (size_t c = 0; c < ambient; ++c)
                m.at(i, c) = static_cast<uint32_t>(rng.below(p.p()));
        if (m.rank() == r) return Subspace::from_span(m);
    }
}

}  // namespace koszul
