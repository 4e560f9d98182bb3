#pragma once

#include <optional>
#include <vector>

#include "marn/numerics.hpp"
#include "marn/random.hpp"

namespace marn {

// Flow profile for multi-destination runs: sources[d] lists the 0-based
// source indices destination d wants.
struct FlowProfile {
    std::vector<std::vector<int>> sources;
};

struct NetworkConfig {
    int J = 2;    // sources
    int Ja = 2;   // antennas per source
    int Ra = 2;   // relay antennas
    int M = 1;    // antennas per destination
    double P = 10.0;  // average transmit power; noise is unit, so P is SNR
    std::optional<FlowProfile> flows;

    // Frame geometry: codewords are padded to width 2^n when Ja is not a
    // power of two (one frame always carries 2^n symbols per source).
    int n() const {
        int v = 1;
        while ((1 << v) < Ja) ++v;
        return v;
    }
    int pad() const { return 1 << n(); }
    int L() const { return 1 << (n() - 1); }  // Alamouti subsystems per frame

    int destinations() const {
        return flows ? static_cast<int>(flows->sources.size()) : 1;
    }

    void validate() const;
};

// One coherence block's fading.  F[j] is pad x Ra with rows >= Ja exactly
// zero; G[d] is Ra x M for destination d.  All live entries i.i.d. CN(0,1).
struct ChannelRealization {
    std::vector<CMat> F;
    std::vector<CMat> G;
};

ChannelRealization draw_channel(const NetworkConfig& cfg, RandomStream& rng);

// len x 1 vector of i.i.d. CN(0,1) noise.
CMat awgn(int len, RandomStream& rng);

// Squared Frobenius norm of the relay->destination matrix.
double gamma_g(const CMat& G);

}  // namespace marn
