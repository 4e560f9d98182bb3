#pragma once

#include <cstdint>
#include <random>

#include "marn/numerics.hpp"

namespace marn {

// Reproducible random stream keyed by (seed, substream).  Trials derive
// disjoint substreams from their trial index, so results are independent of
// how trials are distributed across workers.  Never share one stream between
// threads.
class RandomStream {
  public:
    RandomStream(uint64_t seed, uint64_t substream);

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0,1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method (pairs are cached).
    double gaussian();

    // CN(0,1): (x + jy)/sqrt(2) with x,y independent standard normals.
    cplx cgaussian() {
        const double x = gaussian();
        const double y = gaussian();
        return {x * 0.70710678118654752440, y * 0.70710678118654752440};
    }

    // Uniform integer in [0, n), unbiased (rejection).
    uint64_t uniform_int(uint64_t n);

    int bit() { return static_cast<int>(eng_() >> 63); }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace marn
