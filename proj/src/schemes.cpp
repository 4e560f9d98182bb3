#include "marn/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace marn {

SchemeId parse_scheme(const std::string& name) {
    if (name == "ic-relay-tdma") return SchemeId::ic_relay_tdma;
    if (name == "full-tdma-dstc") return SchemeId::full_tdma_dstc;
    if (name == "dstc-joint-ml") return SchemeId::dstc_joint_ml;
    if (name == "ic-relay-tdma-df") return SchemeId::ic_relay_tdma_df;
    if (name == "joint-df-tdma") return SchemeId::joint_df_tdma;
    throw ConfigError("unknown scheme '" + name + "'");
}

std::string scheme_name(SchemeId id) {
    switch (id) {
        case SchemeId::ic_relay_tdma: return "ic-relay-tdma";
        case SchemeId::full_tdma_dstc: return "full-tdma-dstc";
        case SchemeId::dstc_joint_ml: return "dstc-joint-ml";
        case SchemeId::ic_relay_tdma_df: return "ic-relay-tdma-df";
        case SchemeId::joint_df_tdma: return "joint-df-tdma";
    }
    return "?";
}

bool satisfies_linear_constraints(SchemeId id) {
    return id == SchemeId::ic_relay_tdma || id == SchemeId::full_tdma_dstc;
}

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw ConfigError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::operator+(const Rational& o) const {
    return {num * o.den + o.num * den, den * o.den};
}
Rational Rational::operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw ConfigError("rational division by zero");
    return {num * o.den, den * o.num};
}
std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational symbol_rate(SchemeId id, int J, Rational Ro) {
    switch (id) {
        case SchemeId::ic_relay_tdma:
        case SchemeId::ic_relay_tdma_df:
        case SchemeId::joint_df_tdma:
            // J first-hop slots plus R_o^-1 forwarding slots per symbol
            return Ro / (Ro + Rational(J));
        case SchemeId::full_tdma_dstc:
            return Ro / (Rational(J) * (Rational(1) + Ro));
        case SchemeId::dstc_joint_ml:
            return {1, 2};  // both hops concurrent, two phases
    }
    throw ConfigError("symbol_rate: bad scheme");
}

int theoretical_diversity(const NetworkConfig& cfg) {
    return std::min(cfg.Ja * (cfg.Ra - cfg.J + 1), cfg.Ra * cfg.M);
}

bool int_free_condition(const NetworkConfig& cfg) {
    return cfg.Ra * cfg.M <= cfg.Ja * (cfg.Ra - cfg.J + 1);
}

Scheme make_scheme(SchemeId id, const NetworkConfig& cfg, int mod_order,
                   const std::string& design_name) {
    cfg.validate();
    Scheme sc;
    sc.id = id;

    if (mod_order == 0) {
        // §-comparison defaults: 1 bit per user per channel use for each rate
        switch (id) {
            case SchemeId::full_tdma_dstc: mod_order = 16; break;
            case SchemeId::dstc_joint_ml: mod_order = 4; break;
            default: mod_order = 8; break;
        }
    }

    const bool dstc = (id == SchemeId::full_tdma_dstc || id == SchemeId::dstc_joint_ml);
    if (dstc) {
        if (cfg.Ra != 2 || cfg.Ja > 2)
            throw ConfigError(scheme_name(id) +
                              ": distributed forwarding is built for Ra=2, Ja<=2");
        sc.design = make_design("alamouti_2");  // rate accounting only
        sc.bank = make_bank(mod_order, 1);
        sc.frames = 1;
        sc.words = 1;
        sc.bits_per_source = 2 * sc.bank.bits_per_symbol();
        const double p = cfg.P;
        const double load = (id == SchemeId::full_tdma_dstc) ? p : cfg.J * p;
        sc.c = std::sqrt(p / (cfg.Ra * (load + 1.0)));
        return sc;
    }

    std::string dn = design_name;
    if (dn.empty()) {
        if (cfg.Ra == 2) dn = "alamouti_2";
        else if (cfg.Ra == 4) dn = "rate34_4";
        else throw ConfigError("no built-in forwarding design for Ra=" + std::to_string(cfg.Ra));
    }
    sc.design = make_design(dn);
    if (sc.design.Ra != cfg.Ra)
        throw ConfigError("design '" + dn + "' does not fit Ra=" + std::to_string(cfg.Ra));
    sc.rex = real_expand(sc.design);

    const int pad = cfg.pad();
    sc.frames = std::lcm(pad, sc.design.K) / pad;
    sc.words = sc.frames * pad / sc.design.K;
    sc.bank = make_bank(mod_order, cfg.L());
    sc.bits_per_source = sc.frames * pad * sc.bank.bits_per_symbol();

    switch (id) {
        case SchemeId::ic_relay_tdma:
            sc.c = relay_norm_c(cfg.P, sc.design.T2, cfg.Ra, sc.design.K, cfg.J);
            break;
        case SchemeId::ic_relay_tdma_df:
            // forwarded values are Hadamard combinations of L unit symbols
            sc.c = std::sqrt(cfg.P * sc.design.T2 / (cfg.Ra * sc.design.K * cfg.L()));
            break;
        case SchemeId::joint_df_tdma:
            sc.c = std::sqrt(cfg.P * sc.design.T2 / (cfg.Ra * sc.design.K));
            break;
        default: break;
    }
    return sc;
}

namespace {

void label_to_bits(int label, int b, std::vector<int>& out, size_t at) {
    for (int i = 0; i < b; ++i) out[at + i] = (label >> (b - 1 - i)) & 1;
}

// Codeword for one source frame: padded quasi-orthogonal block over the
// frame's 2^n symbols (rows beyond Ja of the channel are zero, so the padded
// block is what effectively goes over the air).
CMat frame_codeword(const NetworkConfig& cfg, const std::vector<cplx>& symbols) {
    return abba_encode(cfg.n(), symbols);
}

enum class RelayMode { af_soft, df_combos, df_symbols };

// Shared pipeline for the TDMA-forwarding schemes (1, 6, 7): first hop per
// frame, relay processing per mode, per-source phase-2 forwarding, and
// per-destination decoding.  wanted[d] lists the sources destination d
// decodes.  Output: [destination][source] decoded bits (empty if unwanted).
std::vector<std::vector<std::vector<int>>> relay_tdma_core(
    const Scheme& sc, const NetworkConfig& cfg, const ChannelRealization& ch,
    const std::vector<std::vector<int>>& bits, RandomStream* rng, RelayTap* tap,
    RelayMode mode, const std::vector<std::vector<int>>& wanted) {
    const int pad = cfg.pad();
    const int L = cfg.L();
    const int b = sc.bank.bits_per_symbol();
    const int nd = static_cast<int>(wanted.size());
    const int seq_len = sc.frames * pad;
    const CMat H = hadamard(cfg.n() - 1);

    // ---- first hop ----
    // soft[j] collects, frame by frame, the per-subsystem (odd, even) pairs
    // the relay will forward for source j; gamma[j][l] the combining gains.
    std::vector<std::vector<cplx>> fwd(cfg.J, std::vector<cplx>(seq_len));
    std::vector<std::vector<double>> gamma(cfg.J, std::vector<double>(L, 0.0));

    for (int fr = 0; fr < sc.frames; ++fr) {
        std::vector<CMat> codes(cfg.J);
        for (int j = 0; j < cfg.J; ++j) {
            const auto first = bits[j].begin() + static_cast<long>(fr) * pad * b;
            codes[j] = frame_codeword(cfg, map_bits(sc.bank, {first, first + pad * b}));
        }
        const std::vector<CMat> r = phase1_receive(cfg, ch, codes, cfg.P, rng);

        if (mode == RelayMode::df_symbols) {
            const auto hard = relay_joint_decode(cfg, r, ch, sc.bank, cfg.P);
            for (int j = 0; j < cfg.J; ++j)
                for (int pos = 0; pos < pad; ++pos) fwd[j][fr * pad + pos] = hard[j][pos];
            continue;
        }

        const auto subs = separate_subsystems(cfg, r, ch);
        for (int j = 0; j < cfg.J; ++j) {
            std::vector<SoftEstimateBlock> blocks(L);
            for (int l = 0; l < L; ++l) {
                blocks[l] = mrc_combine(cancel_interference(cfg, subs[l], j));
                blocks[l].source = j;
                blocks[l].l = l;
                gamma[j][l] = blocks[l].gamma_l;
            }
            if (mode == RelayMode::af_soft) {
                for (int l = 0; l < L; ++l) {
                    fwd[j][fr * pad + 2 * l] = blocks[l].odd;
                    fwd[j][fr * pad + 2 * l + 1] = blocks[l].even;
                }
            } else {  // df_combos: decode, then re-mix the hard symbols
                const auto hard = relay_decode_after_ic(cfg, blocks, sc.bank, cfg.P);
                for (int l = 0; l < L; ++l) {
                    cplx odd = 0.0, even = 0.0;
                    for (int u = 0; u < L; ++u) {
                        odd += H(l, u) * hard[2 * u];
                        even += H(l, u) * hard[2 * u + 1];
                    }
                    fwd[j][fr * pad + 2 * l] = odd;
                    fwd[j][fr * pad + 2 * l + 1] = even;
                }
            }
        }
    }
    if (tap) {
        tap->gamma_l = gamma;
        tap->c = sc.c;
    }

    // ---- second hop: TDMA rounds, one design word at a time ----
    const int K = sc.design.K;
    std::vector<std::vector<std::vector<cplx>>> xhat(
        nd, std::vector<std::vector<cplx>>(cfg.J, std::vector<cplx>(seq_len)));
    for (int j = 0; j < cfg.J; ++j) {
        for (int w = 0; w < sc.words; ++w) {
            const std::vector<cplx> word(fwd[j].begin() + static_cast<long>(w) * K,
                                         fwd[j].begin() + static_cast<long>(w + 1) * K);
            CMat frame = od_codeword(sc.design, word) * cplx(sc.c, 0.0);
            if (tap) tap->frames.push_back(frame);
            for (int d = 0; d < nd; ++d) {
                const auto x = phase2_receive(frame, ch.G[d], rng);
                const auto soft = matched_filter(x, ch.G[d], sc.rex);
                for (int k = 0; k < K; ++k) xhat[d][j][w * K + k] = soft[k];
            }
        }
    }

    // ---- destination decoding ----
    std::vector<std::vector<std::vector<int>>> out(nd,
                                                   std::vector<std::vector<int>>(cfg.J));
    for (int d = 0; d < nd; ++d) {
        const double gg = gamma_g(ch.G[d]);
        for (int j : wanted[d]) {
            std::vector<int>& ob = out[d][j];
            ob.assign(sc.bits_per_source, 0);
            if (mode == RelayMode::df_symbols) {
                // relay forwarded raw hard symbols: symbol-wise slicing
                for (int pos = 0; pos < seq_len; ++pos) {
                    const auto& set = sc.bank.sets[(pos % pad) / 2];
                    int best = 0;
                    double bestd = std::numeric_limits<double>::infinity();
                    for (int lab = 0; lab < set.order(); ++lab) {
                        const double dd = std::norm(xhat[d][j][pos] - sc.c * set.points[lab]);
                        if (dd < bestd) {
                            bestd = dd;
                            best = lab;
                        }
                    }
                    label_to_bits(best, b, ob, static_cast<size_t>(pos) * b);
                }
                continue;
            }
            for (int fr = 0; fr < sc.frames; ++fr)
                for (int parity = 0; parity < 2; ++parity) {
                    EquivalentSystem sys;
                    sys.x.resize(L);
                    sys.gamma_l.resize(L);
                    sys.gamma_gv = gg;
                    sys.c = sc.c;
                    if (mode == RelayMode::af_soft) {
                        sys.P = cfg.P;
                        sys.Ja = cfg.Ja;
                    } else {
                        // re-modulated combos carry unit amplitude
                        sys.P = 1.0;
                        sys.Ja = 1;
                    }
                    for (int l = 0; l < L; ++l) {
                        sys.x[l] = xhat[d][j][fr * pad + 2 * l + parity];
                        sys.gamma_l[l] = (mode == RelayMode::af_soft)
                                             ? gamma[j][l]
                                             : std::numeric_limits<double>::infinity();
                    }
                    const std::vector<int> labels = ml_decode(sys, sc.bank);
                    for (int u = 0; u < L; ++u)
                        label_to_bits(labels[u], b, ob,
                                      (static_cast<size_t>(fr) * pad + 2 * u + parity) * b);
                }
        }
    }
    return out;
}

std::vector<std::vector<int>> all_sources(int J) {
    std::vector<int> s(J);
    for (int j = 0; j < J; ++j) s[j] = j;
    return {s};
}

// ---- distributed forwarding (schemes 3 and 5) ----

// Relay transmit block for Ra=2: antenna 1 repeats the amplified signal,
// antenna 2 a unitary dispersion of its conjugate — distributed Alamouti.
CMat dstc_relay(const std::vector<CMat>& r, double c) {
    CMat T(2, 2);
    T(0, 0) = c * r[0](0, 0);
    T(1, 0) = c * r[0](1, 0);
    T(0, 1) = -c * std::conj(r[1](1, 0));
    T(1, 1) = c * std::conj(r[1](0, 0));
    return T;
}

// Per-slot covariance of the forwarded-noise-plus-local-noise at the
// destination: C = c^2 (G^H G)^T + I_M.
CMat dstc_noise_cov(const CMat& G, double c) {
    const int M = G.cols();
    CMat C = (G.herm() * G).transpose() * cplx(c * c, 0.0);
    for (int m = 0; m < M; ++m) C(m, m) += 1.0;
    return C;
}

double whitened_slot_metric(const std::vector<CMat>& x, const CMat& mu, const CMat& Ci) {
    const int T2 = mu.rows();
    const int M = static_cast<int>(x.size());
    double metric = 0.0;
    for (int t = 0; t < T2; ++t) {
        // e = x_t - mu_t across antennas; metric += e^H Ci e
        for (int m = 0; m < M; ++m) {
            const cplx em = x[m](t, 0) - mu(t, m);
            for (int m2 = 0; m2 < M; ++m2) {
                const cplx e2 = x[m2](t, 0) - mu(t, m2);
                metric += std::real(std::conj(em) * Ci(m, m2) * e2);
            }
        }
    }
    return metric;
}

}  // namespace

std::vector<std::vector<int>> run_ic_relay_tdma(const Scheme& scheme, const NetworkConfig& cfg,
                                                const ChannelRealization& ch,
                                                const std::vector<std::vector<int>>& bits,
                                                RandomStream* rng, RelayTap* tap) {
    return relay_tdma_core(scheme, cfg, ch, bits, rng, tap, RelayMode::af_soft,
                           all_sources(cfg.J))[0];
}

std::vector<std::vector<int>> run_ic_relay_tdma_df(const Scheme& scheme,
                                                   const NetworkConfig& cfg,
                                                   const ChannelRealization& ch,
                                                   const std::vector<std::vector<int>>& bits,
                                                   RandomStream* rng) {
    return relay_tdma_core(scheme, cfg, ch, bits, rng, nullptr, RelayMode::df_combos,
                           all_sources(cfg.J))[0];
}

std::vector<std::vector<int>> run_joint_df_tdma(const Scheme& scheme, const NetworkConfig& cfg,
                                                const ChannelRealization& ch,
                                                const std::vector<std::vector<int>>& bits,
                                                RandomStream* rng) {
    return relay_tdma_core(scheme, cfg, ch, bits, rng, nullptr, RelayMode::df_symbols,
                           all_sources(cfg.J))[0];
}

std::vector<std::vector<int>> run_full_tdma_dstc(const Scheme& scheme, const NetworkConfig& cfg,
                                                 const ChannelRealization& ch,
                                                 const std::vector<std::vector<int>>& bits,
                                                 RandomStream* rng) {
    const int b = scheme.bank.bits_per_symbol();
    const double amp = std::sqrt(cfg.P / cfg.Ja);
    const CMat Ci = invert_hermitian(dstc_noise_cov(ch.G[0], scheme.c));
    const Constellation& set = scheme.bank.sets[0];
    const int order = set.order();

    std::vector<std::vector<int>> out(cfg.J, std::vector<int>(scheme.bits_per_source, 0));
    for (int j = 0; j < cfg.J; ++j) {  // one full TDMA round per source
        const auto first = bits[j].begin();
        const CMat code = truncate_columns(
            frame_codeword(cfg, map_bits(scheme.bank, {first, first + 2 * b})), cfg.Ja);

        std::vector<CMat> r(cfg.Ra);
        for (int i = 0; i < cfg.Ra; ++i) {
            CMat ri = CMat::zeros(2, 1);
            for (int t = 0; t < 2; ++t) {
                cplx acc = 0.0;
                for (int k = 0; k < cfg.Ja; ++k) acc += code(t, k) * ch.F[j](k, i);
                ri(t, 0) = amp * acc;
            }
            if (rng) ri += awgn(2, *rng);
            r[i] = std::move(ri);
        }
        const CMat T = dstc_relay(r, scheme.c);
        const auto x = phase2_receive(T, ch.G[0], rng);

        // joint ML over the source's two symbols against the known channels
        int best0 = 0, best1 = 0;
        double bestm = std::numeric_limits<double>::infinity();
        for (int l1 = 0; l1 < order; ++l1)
            for (int l0 = 0; l0 < order; ++l0) {
                const CMat cand = truncate_columns(
                    frame_codeword(cfg, {set.points[l0], set.points[l1]}), cfg.Ja);
                std::vector<CMat> r0(cfg.Ra);
                for (int i = 0; i < cfg.Ra; ++i) {
                    CMat ri = CMat::zeros(2, 1);
                    for (int t = 0; t < 2; ++t) {
                        cplx acc = 0.0;
                        for (int k = 0; k < cfg.Ja; ++k) acc += cand(t, k) * ch.F[j](k, i);
                        ri(t, 0) = amp * acc;
                    }
                    r0[i] = std::move(ri);
                }
                const CMat mu = dstc_relay(r0, scheme.c) * ch.G[0];
                const double metric = whitened_slot_metric(x, mu, Ci);
                if (metric < bestm) {
                    bestm = metric;
                    best0 = l0;
                    best1 = l1;
                }
            }
        label_to_bits(best0, b, out[j], 0);
        label_to_bits(best1, b, out[j], b);
    }
    return out;
}

std::vector<std::vector<int>> run_dstc_joint_ml(const Scheme& scheme, const NetworkConfig& cfg,
                                                const ChannelRealization& ch,
                                                const std::vector<std::vector<int>>& bits,
                                                RandomStream* rng) {
    const int b = scheme.bank.bits_per_symbol();
    const int pad = cfg.pad();
    const Constellation& set = scheme.bank.sets[0];
    const int order = set.order();

    uint64_t total = 1;
    for (int e = 0; e < cfg.J * pad; ++e) {
        total *= static_cast<uint64_t>(order);
        if (total > (1u << 20)) throw HypothesisSpaceTooLarge("joint destination ML too large");
    }

    // concurrent first hop, then the same distributed forwarding
    std::vector<CMat> codes(cfg.J);
    for (int j = 0; j < cfg.J; ++j) {
        const auto first = bits[j].begin();
        codes[j] = frame_codeword(cfg, map_bits(scheme.bank, {first, first + 2 * b}));
    }
    const std::vector<CMat> r = phase1_receive(cfg, ch, codes, cfg.P, rng);
    const CMat T = dstc_relay(r, scheme.c);
    const auto x = phase2_receive(T, ch.G[0], rng);
    const CMat Ci = invert_hermitian(dstc_noise_cov(ch.G[0], scheme.c));

    // destination means are linear in the per-source noiseless images
    const double amp = std::sqrt(cfg.P / cfg.Ja);
    const uint64_t per_source = static_cast<uint64_t>(order) * order;
    std::vector<std::vector<CMat>> mu(cfg.J, std::vector<CMat>(per_source));
    for (int j = 0; j < cfg.J; ++j)
        for (uint64_t cnd = 0; cnd < per_source; ++cnd) {
            const cplx s0 = set.points[cnd % order];
            const cplx s1 = set.points[cnd / order];
            const CMat code = frame_codeword(cfg, {s0, s1});
            std::vector<CMat> r0(cfg.Ra);
            for (int i = 0; i < cfg.Ra; ++i) {
                CMat ri = CMat::zeros(pad, 1);
                for (int t = 0; t < pad; ++t) {
                    cplx acc = 0.0;
                    for (int k = 0; k < cfg.Ja; ++k) acc += code(t, k) * ch.F[j](k, i);
                    ri(t, 0) = amp * acc;
                }
                r0[i] = std::move(ri);
            }
            mu[j][cnd] = dstc_relay(r0, scheme.c) * ch.G[0];
        }

    std::vector<uint64_t> best(cfg.J, 0), idx(cfg.J, 0);
    double bestm = std::numeric_limits<double>::infinity();
    for (uint64_t cand = 0; cand < total; ++cand) {
        uint64_t rem = cand;
        CMat m = CMat::zeros(2, cfg.M);
        for (int j = 0; j < cfg.J; ++j) {
            idx[j] = rem % per_source;
            rem /= per_source;
            m += mu[j][idx[j]];
        }
        const double metric = whitened_slot_metric(x, m, Ci);
        if (metric < bestm) {
            bestm = metric;
            best = idx;
        }
    }

    std::vector<std::vector<int>> out(cfg.J, std::vector<int>(scheme.bits_per_source, 0));
    for (int j = 0; j < cfg.J; ++j) {
        label_to_bits(static_cast<int>(best[j] % order), b, out[j], 0);
        label_to_bits(static_cast<int>(best[j] / order), b, out[j], b);
    }
    return out;
}

std::vector<std::vector<int>> run_scheme_trial(const Scheme& scheme, const NetworkConfig& cfg,
                                               const ChannelRealization& ch,
                                               const std::vector<std::vector<int>>& bits,
                                               RandomStream* rng) {
    if (cfg.flows)
        throw ConfigError("run_scheme_trial: flow profiles go through run_flow_profile");
    switch (scheme.id) {
        case SchemeId::ic_relay_tdma: return run_ic_relay_tdma(scheme, cfg, ch, bits, rng);
        case SchemeId::full_tdma_dstc: return run_full_tdma_dstc(scheme, cfg, ch, bits, rng);
        case SchemeId::dstc_joint_ml: return run_dstc_joint_ml(scheme, cfg, ch, bits, rng);
        case SchemeId::ic_relay_tdma_df:
            return run_ic_relay_tdma_df(scheme, cfg, ch, bits, rng);
        case SchemeId::joint_df_tdma: return run_joint_df_tdma(scheme, cfg, ch, bits, rng);
    }
    throw ConfigError("run_scheme_trial: bad scheme");
}

std::vector<std::vector<std::vector<int>>> run_flow_profile(
    const Scheme& scheme, const NetworkConfig& cfg, const ChannelRealization& ch,
    const std::vector<std::vector<int>>& bits, RandomStream* rng, RelayTap* tap) {
    if (scheme.id != SchemeId::ic_relay_tdma)
        throw ConfigError("flow profiles are defined for the IC-relay pipeline");
    const std::vector<std::vector<int>> wanted =
        cfg.flows ? cfg.flows->sources : all_sources(cfg.J);
    return relay_tdma_core(scheme, cfg, ch, bits, rng, tap, RelayMode::af_soft, wanted);
}

}  // namespace marn
