// Counter-based deterministic PRNG (splitmix64 finalizer). Stateless: the
// draw for (seed, a, b) is a pure function, identical on every platform and
// independent of evaluation order.
#pragma once

#include <cstdint>

namespace resparc {

inline uint64_t splitmix64(uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t a, uint64_t b = 0)
{
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

// Uniform double in [0, 1).
inline double unit_draw(uint64_t seed, uint64_t a, uint64_t b = 0)
{
    return static_cast<double>(counter_hash(seed, a, b) >> 11) * 0x1.0p-53;
}

// Uniform double in [-1, 1).
inline double symmetric_draw(uint64_t seed, uint64_t a, uint64_t b = 0)
{
    return 2.0 * unit_draw(seed, a, b) - 1.0;
}

} // namespace resparc
