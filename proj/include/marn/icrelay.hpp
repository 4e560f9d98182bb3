#pragma once

#include <vector>

#include "marn/channel.hpp"
#include "marn/constellation.hpp"
#include "marn/numerics.hpp"
#include "marn/stbc.hpp"

namespace marn {

// One Alamouti subsystem after Hadamard separation of the first hop.
struct AlamoutiSubsystem {
    int l = 0;                 // 0-based subsystem index
    std::vector<double> h;     // +-1 Hadamard row, length 2^{n-1}
    CMat rhat;                 // stacked (r1, -conj(r2)) per relay antenna, 2Ra x 1
    std::vector<CMat> Fblk;    // per source: stacked 2x2 Alamouti channels, 2Ra x 2
};

// First-hop reception: r_i = sum_j sqrt(P/Ja) S^(j) f_i^(j) + v_i.
// Codewords are the padded 2^n x 2^n blocks; rows of F beyond Ja are zero,
// which is equivalent to transmitting only the first Ja columns.
std::vector<CMat> phase1_receive(const NetworkConfig& cfg, const ChannelRealization& ch,
                                 const std::vector<CMat>& codewords, double P,
                                 RandomStream* rng);

std::vector<AlamoutiSubsystem> separate_subsystems(const NetworkConfig& cfg,
                                                   const std::vector<CMat>& r,
                                                   const ChannelRealization& ch);

// Output of the iterative canceller for one (subsystem, kept source) pair.
struct IcResult {
    CMat r;          // residual signal, 2(Ra-J+1) x 1
    CMat canceller;  // accumulated canceller, 2(Ra-J+1) x 2Ra
    CMat Fkeep;      // kept source's stacked channel, 2Ra x 2
    int source = 0;  // kept source index
    int l = 0;       // subsystem index
};

// Optional per-iteration observability for tests.
struct IcTrace {
    std::vector<CMat> ic_matrices;  // canceller applied at each iteration
    std::vector<CMat> F_after;      // evolving 2(Ra-i-1) x 2J channel
};

// Zero-forces every source except keep_source (0-based).  Sources are
// relabeled so the kept one takes the lead position; the loop then cancels
// the trailing block-column each iteration.  Throws DegenerateChannel when a
// denominator block norm underflows.
IcResult cancel_interference(const NetworkConfig& cfg, const AlamoutiSubsystem& sub,
                             int keep_source, IcTrace* trace = nullptr);

struct SoftEstimateBlock {
    cplx odd;        // soft estimate of the subsystem's odd combination
    cplx even;
    double gamma_l = 0.0;
    int source = 0;
    int l = 0;
};

// SNR-maximizing combine of the residual observations.  The result is
// unbiased: stilde = sqrt(P/Ja) shat + noise with covariance
// (2^{n-1}/gamma_l) I_2.
SoftEstimateBlock mrc_combine(const IcResult& ic);

// Relay power normalization for the amplify-and-forward second hop.
double relay_norm_c(double P, int T2, int Ra, int K, int J);

struct RelayFrame {
    CMat T;       // T2 x Ra transmit block (column i feeds relay antenna i)
    double c = 0.0;
};

RelayFrame forward_encode(const std::vector<cplx>& soft, const OrthogonalDesign& design,
                          double P, int J);

// Weighted nearest-codeword search shared by the relay and destination ML
// decoders: minimizes sum_l |x_l - amp (H s)_l|^2 / sigma_l over one point
// per bank set.  Ties resolve to the lowest labels (set 0 varies fastest).
std::vector<int> weighted_grid_argmin(const std::vector<cplx>& x,
                                      const std::vector<double>& sigma, double amp,
                                      const CMat& H, const ConstellationBank& bank);

// Decode-and-forward support: hard ML decisions on one source's subsystem
// estimates, weighted by gamma_l (the destination metric with the second hop
// removed).  Returns the frame's 2^n symbols in position order (2u + parity).
std::vector<cplx> relay_decode_after_ic(const NetworkConfig& cfg,
                                        const std::vector<SoftEstimateBlock>& blocks,
                                        const ConstellationBank& bank, double P);

// Joint ML over all sources' frames straight from the first-hop observation
// (no cancellation).  For single-antenna sources the slots decouple and each
// slot is decoded jointly over the J sources; otherwise the whole frame is
// enumerated.  Guarded by HypothesisSpaceTooLarge at 2^20 candidates.
std::vector<std::vector<cplx>> relay_joint_decode(const NetworkConfig& cfg,
                                                  const std::vector<CMat>& r,
                                                  const ChannelRealization& ch,
                                                  const ConstellationBank& bank, double P);

}  // namespace marn
