#pragma once

#include <string>
#include <vector>

#include "marn/channel.hpp"
#include "marn/constellation.hpp"
#include "marn/destination.hpp"
#include "marn/icrelay.hpp"
#include "marn/numerics.hpp"
#include "marn/stbc.hpp"

namespace marn {

enum class SchemeId {
    ic_relay_tdma,     // scheme 1: concurrent first hop, IC at relay, AF forwarding
    full_tdma_dstc,    // scheme 3: everything TDMA, distributed STBC at relay
    dstc_joint_ml,     // scheme 5: concurrent both hops, joint ML at destination
    ic_relay_tdma_df,  // scheme 6: scheme 1 with decode-and-forward relay
    joint_df_tdma,     // scheme 7: joint decoding at relay, per-source DF forwarding
};

SchemeId parse_scheme(const std::string& name);
std::string scheme_name(SchemeId id);

// Whether the relay processing is linear in its received signal (the relay
// never needs the sources' constellations).
bool satisfies_linear_constraints(SchemeId id);

// Exact rational arithmetic for symbol-rate accounting.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1);

    Rational operator+(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    std::string str() const;
};

// Symbols per user per channel use across both phases, as a function of the
// forwarding design rate R_o.
Rational symbol_rate(SchemeId id, int J, Rational Ro);

// min{Ja(Ra-J+1), Ra*M}; the condition says the min is attained by the
// second hop, i.e. interference costs nothing.
int theoretical_diversity(const NetworkConfig& cfg);
bool int_free_condition(const NetworkConfig& cfg);

// A scheme bound to a network: modulation bank, forwarding design and all
// derived per-trial constants.
struct Scheme {
    SchemeId id = SchemeId::ic_relay_tdma;
    OrthogonalDesign design;  // phase-2 design (unused by the schemes 3/5 DSTC)
    RealExpansion rex;
    ConstellationBank bank;
    int frames = 1;           // first-hop frames per source per trial
    int words = 1;            // phase-2 design words per source per trial
    int bits_per_source = 0;  // information bits per source per trial
    double c = 0.0;           // relay power scaling
};

// design_name "" picks the design matching Ra (alamouti_2 for Ra=2,
// rate34_4 for Ra=4).  mod_order 0 picks the §-comparison default for the
// scheme (1 bit per user per channel use).
Scheme make_scheme(SchemeId id, const NetworkConfig& cfg, int mod_order = 0,
                   const std::string& design_name = "");

// Observability for tests: what the relay actually transmitted.
struct RelayTap {
    std::vector<CMat> frames;          // every phase-2 block, transmit order
    std::vector<std::vector<double>> gamma_l;  // per source, per subsystem
    double c = 0.0;
};

// One Monte Carlo trial: bits[j] holds scheme.bits_per_source fresh bits for
// source j; returns the decoded bits in the same layout.  rng == nullptr
// runs both hops noiseless.  Throws DegenerateChannel on unusable draws
// (caller discards the trial).
std::vector<std::vector<int>> run_ic_relay_tdma(const Scheme& scheme, const NetworkConfig& cfg,
                                                const ChannelRealization& ch,
                                                const std::vector<std::vector<int>>& bits,
                                                RandomStream* rng, RelayTap* tap = nullptr);
std::vector<std::vector<int>> run_full_tdma_dstc(const Scheme& scheme, const NetworkConfig& cfg,
                                                 const ChannelRealization& ch,
                                                 const std::vector<std::vector<int>>& bits,
                                                 RandomStream* rng);
std::vector<std::vector<int>> run_dstc_joint_ml(const Scheme& scheme, const NetworkConfig& cfg,
                                                const ChannelRealization& ch,
                                                const std::vector<std::vector<int>>& bits,
                                                RandomStream* rng);
std::vector<std::vector<int>> run_ic_relay_tdma_df(const Scheme& scheme,
                                                   const NetworkConfig& cfg,
                                                   const ChannelRealization& ch,
                                                   const std::vector<std::vector<int>>& bits,
                                                   RandomStream* rng);
std::vector<std::vector<int>> run_joint_df_tdma(const Scheme& scheme, const NetworkConfig& cfg,
                                                const ChannelRealization& ch,
                                                const std::vector<std::vector<int>>& bits,
                                                RandomStream* rng);

// Dispatch on scheme.id.  Rejects flow-profile configs (use run_flow_profile).
std::vector<std::vector<int>> run_scheme_trial(const Scheme& scheme, const NetworkConfig& cfg,
                                               const ChannelRealization& ch,
                                               const std::vector<std::vector<int>>& bits,
                                               RandomStream* rng);

// Multi-destination variant of scheme 1: the relay side runs once, every
// destination decodes with its own G and keeps only the sources its flow
// profile lists (others come back empty).  out[d][j] = bits for source j.
std::vector<std::vector<std::vector<int>>> run_flow_profile(
    const Scheme& scheme, const NetworkConfig& cfg, const ChannelRealization& ch,
    const std::vector<std::vector<int>>& bits, RandomStream* rng, RelayTap* tap = nullptr);

}  // namespace marn
