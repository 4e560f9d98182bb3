#include "marn/random.hpp"

#include <cmath>

namespace marn {

namespace {
// splitmix64 finalizer; scrambles (seed, substream) into independent state words.
uint64_t mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace

RandomStream::RandomStream(uint64_t seed, uint64_t substream) {
    uint64_t s = mix(seed ^ mix(substream));
    std::seed_seq seq{
        static_cast<uint32_t>(s), static_cast<uint32_t>(s >> 32),
        static_cast<uint32_t>(s = mix(s)), static_cast<uint32_t>(s >> 32),
        static_cast<uint32_t>(s = mix(s)), static_cast<uint32_t>(s >> 32),
        static_cast<uint32_t>(s = mix(s)), static_cast<uint32_t>(s >> 32)};
    eng_.seed(seq);
}

double RandomStream::gaussian() {
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
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

uint64_t RandomStream::uniform_int(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

}  // namespace marn
