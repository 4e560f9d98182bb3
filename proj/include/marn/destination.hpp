#pragma once

#include <utility>
#include <vector>

#include "marn/channel.hpp"
#include "marn/constellation.hpp"
#include "marn/icrelay.hpp"
#include "marn/numerics.hpp"
#include "marn/stbc.hpp"

namespace marn {

// Second-hop reception: x_m = sum_i t_i g_im + w_m for each destination
// antenna.  Returns one T2 x 1 vector per antenna.
std::vector<CMat> phase2_receive(const CMat& frame, const CMat& G, RandomStream* rng);

// Real-valued stacking of the phase-2 observation.  Column 2k of Gt is
// A_k gtilde, column 2k+1 is B_k gtilde, with per-antenna row blocks;
// Gt' * Gt = ||G||^2 I because the forwarding code is orthogonal.
struct StackedObservation {
    CMat xt;  // 2*T2*M x 1
    CMat Gt;  // 2*T2*M x 2K
};

StackedObservation stack_real(const std::vector<CMat>& x, const CMat& G,
                              const RealExpansion& rex);

// Matched filter per design symbol: x_k = c sqrt(P/Ja) stilde_k + c vtilde_k
// + w_k / ||G||, with the w_k independent across k.
std::vector<cplx> matched_filter(const std::vector<CMat>& x, const CMat& G,
                                 const RealExpansion& rex);
std::vector<cplx> matched_filter(const std::vector<CMat>& x, const CMat& G,
                                 const OrthogonalDesign& design);

// One parity's equivalent system for one source: soft values per subsystem
// plus everything the whitened metric needs.
struct EquivalentSystem {
    std::vector<cplx> x;          // length L
    std::vector<double> gamma_l;  // first-hop combining gains, length L
    double gamma_gv = 0.0;        // ||G||^2
    double c = 0.0;               // relay scaling
    double P = 0.0;
    int Ja = 1;

    int L() const { return static_cast<int>(x.size()); }
    // Equivalent-noise variances: L c^2 / gamma_l + 1 / gamma_g.
    std::vector<double> sigma_u() const;
};

// Whitened exhaustive ML over one point per bank set:
//   argmin_s sum_l |x_l - c sqrt(P/Ja) (H s)_l|^2 / sigma_l.
// Ties (measure zero) resolve to the lowest labels.  Returns labels.
std::vector<int> ml_decode(const EquivalentSystem& sys, const ConstellationBank& bank);

// Instantaneous normalized receive SNR: sum_l 1 / sigma_l.
double normalized_receive_snr(const EquivalentSystem& sys);

// Simplified single-subsystem path for the two-source, two-antenna,
// two-relay-antenna, single-destination-antenna network.  xhat stacks the raw
// destination samples as (x_1, -conj(x_2)); the Alamouti matched filter then
// decouples the two symbols and each is sliced against its scaled
// constellation.  The common noise factor is dropped from the metric.
std::pair<int, int> decode_2221_fast(const CMat& xhat, cplx g1, cplx g2, double gamma_f,
                                     double c, double P, const ConstellationBank& bank);

// Equivalent-noise variance seen by the fast path: c^2 gamma_f (|g1|^2+|g2|^2) + 1.
double fast_noise_sigma(double c, double gamma_f, cplx g1, cplx g2);

}  // namespace marn
