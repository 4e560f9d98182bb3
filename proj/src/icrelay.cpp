#include "marn/icrelay.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace marn {

std::vector<CMat> phase1_receive(const NetworkConfig& cfg, const ChannelRealization& ch,
                                 const std::vector<CMat>& codewords, double P,
                                 RandomStream* rng) {
    const int pad = cfg.pad();
    const double amp = std::sqrt(P / cfg.Ja);
    std::vector<CMat> r(cfg.Ra);
    for (int i = 0; i < cfg.Ra; ++i) {
        CMat ri = CMat::zeros(pad, 1);
        for (int j = 0; j < cfg.J; ++j) {
            const CMat& S = codewords[j];
            const CMat& F = ch.F[j];
            for (int t = 0; t < pad; ++t) {
                cplx acc = 0.0;
                for (int k = 0; k < cfg.Ja; ++k) acc += S(t, k) * F(k, i);
                ri(t, 0) += amp * acc;
            }
        }
        if (rng) ri += awgn(pad, *rng);
        r[i] = std::move(ri);
    }
    return r;
}

std::vector<AlamoutiSubsystem> separate_subsystems(const NetworkConfig& cfg,
                                                   const std::vector<CMat>& r,
                                                   const ChannelRealization& ch) {
    const int L = cfg.L();
    const CMat H = hadamard(cfg.n() - 1);
    std::vector<AlamoutiSubsystem> subs(L);
    for (int l = 0; l < L; ++l) {
        AlamoutiSubsystem& sub = subs[l];
        sub.l = l;
        sub.h.resize(L);
        for (int b = 0; b < L; ++b) sub.h[b] = H(l, b).real();

        sub.rhat = CMat::zeros(2 * cfg.Ra, 1);
        for (int i = 0; i < cfg.Ra; ++i) {
            cplx odd = 0.0, even = 0.0;
            for (int b = 0; b < L; ++b) {
                odd += sub.h[b] * r[i](2 * b, 0);
                even += sub.h[b] * r[i](2 * b + 1, 0);
            }
            sub.rhat(2 * i, 0) = odd;
            sub.rhat(2 * i + 1, 0) = -std::conj(even);
        }

        sub.Fblk.resize(cfg.J);
        for (int j = 0; j < cfg.J; ++j) {
            CMat blk(2 * cfg.Ra, 2);
            for (int i = 0; i < cfg.Ra; ++i) {
                cplx fo = 0.0, fe = 0.0;
                for (int b = 0; b < L; ++b) {
                    fo += sub.h[b] * ch.F[j](2 * b, i);
                    fe += sub.h[b] * ch.F[j](2 * b + 1, i);
                }
                blk.set_block(2 * i, 0, alamouti(fo, fe));
            }
            sub.Fblk[j] = std::move(blk);
        }
    }
    return subs;
}

IcResult cancel_interference(const NetworkConfig& cfg, const AlamoutiSubsystem& sub,
                             int keep_source, IcTrace* trace) {
    // Relabel so the kept source leads; the loop strips the trailing
    // block-column each round.
    std::vector<int> order;
    order.push_back(keep_source);
    for (int j = 0; j < cfg.J; ++j)
        if (j != keep_source) order.push_back(j);

    CMat F(2 * cfg.Ra, 2 * cfg.J);
    for (int p = 0; p < cfg.J; ++p) F.set_block(0, 2 * p, sub.Fblk[order[p]]);
    CMat r = sub.rhat;
    CMat acc = CMat::identity(2 * cfg.Ra);

    for (int i = 0; i < cfg.J - 1; ++i) {
        const int pos = cfg.J - 1 - i;  // trailing block-column
        const int nb = cfg.Ra - i;      // current block-rows
        CMat ic = CMat::zeros(2 * (nb - 1), 2 * nb);
        const CMat d0 = F.block(0, 2 * pos, 2, 2);
        const double n0 = d0.norm2();
        if (n0 <= 1e-24) throw DegenerateChannel("vanishing block in canceller");
        const CMat lead = d0.herm() * cplx(-2.0 / n0, 0.0);
        for (int p = 0; p + 1 < nb; ++p) {
            const CMat dp = F.block(2 * (p + 1), 2 * pos, 2, 2);
            const double np = dp.norm2();
            if (np <= 1e-24) throw DegenerateChannel("vanishing block in canceller");
            ic.set_block(2 * p, 0, lead);
            ic.set_block(2 * p, 2 * (p + 1), dp.herm() * cplx(2.0 / np, 0.0));
        }
        F = (ic * F).block(0, 0, 2 * (nb - 1), 2 * pos);  // drop the dead column
        r = ic * r;
        acc = ic * acc;
        if (trace) {
            trace->ic_matrices.push_back(ic);
            trace->F_after.push_back(F);
        }
    }

    IcResult out;
    out.r = std::move(r);
    out.canceller = std::move(acc);
    out.Fkeep = sub.Fblk[keep_source];
    out.source = keep_source;
    out.l = sub.l;
    return out;
}

SoftEstimateBlock mrc_combine(const IcResult& ic) {
    const CMat W = invert_hermitian(ic.canceller * ic.canceller.herm());
    const CMat G = ic.canceller * ic.Fkeep;   // 2m x 2
    const CMat A = G.herm() * W;              // 2 x 2m
    const double tr = (A * G).trace().real();
    if (tr <= 1e-24) throw DegenerateChannel("vanishing combiner gain");
    const CMat st = (A * ic.r) * cplx(2.0 / tr, 0.0);

    SoftEstimateBlock out;
    out.odd = st(0, 0);
    out.even = st(1, 0);
    out.gamma_l = tr / 2.0;
    out.source = ic.source;
    out.l = ic.l;
    return out;
}

double relay_norm_c(double P, int T2, int Ra, int K, int J) {
    const int dof = 2 * Ra - 2 * J + 1;
    return std::sqrt(P * T2 / (Ra * K * (P / 2.0 + 1.0 / dof)));
}

RelayFrame forward_encode(const std::vector<cplx>& soft, const OrthogonalDesign& design,
                          double P, int J) {
    if (static_cast<int>(soft.size()) != design.K)
        throw ConfigError("forward_encode: symbol count does not match design");
    RelayFrame out;
    out.c = relay_norm_c(P, design.T2, design.Ra, design.K, J);
    out.T = od_codeword(design, soft) * cplx(out.c, 0.0);
    return out;
}

std::vector<int> weighted_grid_argmin(const std::vector<cplx>& x,
                                      const std::vector<double>& sigma, double amp,
                                      const CMat& H, const ConstellationBank& bank) {
    const int L = static_cast<int>(x.size());
    const int m = static_cast<int>(bank.sets.size());
    if (m != H.cols() || L != H.rows() || sigma.size() != x.size())
        throw ConfigError("weighted_grid_argmin: inconsistent grid dimensions");
    uint64_t total = 1;
    for (const auto& set : bank.sets) {
        total *= static_cast<uint64_t>(set.order());
        if (total > (1u << 20)) throw HypothesisSpaceTooLarge("symbol grid too large");
    }

    std::vector<int> labels(m, 0), best(m, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    for (uint64_t cand = 0; cand < total; ++cand) {
        uint64_t rem = cand;
        for (int u = 0; u < m; ++u) {
            labels[u] = static_cast<int>(rem % bank.sets[u].order());
            rem /= bank.sets[u].order();
        }
        double metric = 0.0;
        for (int l = 0; l < L; ++l) {
            cplx mix = 0.0;
            for (int u = 0; u < m; ++u) mix += H(l, u) * bank.sets[u].points[labels[u]];
            metric += std::norm(x[l] - amp * mix) / sigma[l];
        }
        if (metric < best_metric) {
            best_metric = metric;
            best = labels;
        }
    }
    return best;
}

std::vector<cplx> relay_decode_after_ic(const NetworkConfig& cfg,
                                        const std::vector<SoftEstimateBlock>& blocks,
                                        const ConstellationBank& bank, double P) {
    const int L = cfg.L();
    if (static_cast<int>(blocks.size()) != L)
        throw ConfigError("relay_decode_after_ic: expected one block per subsystem");
    const CMat H = hadamard(cfg.n() - 1);
    const double amp = std::sqrt(P / cfg.Ja);

    std::vector<double> sigma(L);
    std::vector<cplx> odd(L), even(L);
    for (int l = 0; l < L; ++l) {
        sigma[l] = L / blocks[l].gamma_l;
        odd[l] = blocks[l].odd;
        even[l] = blocks[l].even;
    }
    const std::vector<int> lo = weighted_grid_argmin(odd, sigma, amp, H, bank);
    const std::vector<int> le = weighted_grid_argmin(even, sigma, amp, H, bank);

    std::vector<cplx> symbols(cfg.pad());
    for (int u = 0; u < L; ++u) {
        symbols[2 * u] = bank.sets[u].points[lo[u]];
        symbols[2 * u + 1] = bank.sets[u].points[le[u]];
    }
    return symbols;
}

namespace {

// Noiseless first-hop image of one source's frame, stacked over (antenna, slot).
std::vector<cplx> frame_image(const NetworkConfig& cfg, const CMat& code, const CMat& F,
                              double amp) {
    const int pad = cfg.pad();
    std::vector<cplx> img(static_cast<size_t>(cfg.Ra) * pad);
    for (int i = 0; i < cfg.Ra; ++i)
        for (int t = 0; t < pad; ++t) {
            cplx acc = 0.0;
            for (int k = 0; k < cfg.Ja; ++k) acc += code(t, k) * F(k, i);
            img[static_cast<size_t>(i) * pad + t] = amp * acc;
        }
    return img;
}

}  // namespace

std::vector<std::vector<cplx>> relay_joint_decode(const NetworkConfig& cfg,
                                                  const std::vector<CMat>& r,
                                                  const ChannelRealization& ch,
                                                  const ConstellationBank& bank, double P) {
    const int pad = cfg.pad();
    const double amp = std::sqrt(P / cfg.Ja);
    std::vector<std::vector<cplx>> out(cfg.J, std::vector<cplx>(pad));

    if (cfg.Ja == 1) {
        // Single-antenna sources: slot 0 carries the odd symbols, slot 1 the
        // conjugated even symbols, so each slot is decoded jointly over the
        // J sources on its own.
        const Constellation& set = bank.sets[0];
        const int order = set.order();
        uint64_t total = 1;
        for (int j = 0; j < cfg.J; ++j) {
            total *= static_cast<uint64_t>(order);
            if (total > (1u << 20)) throw HypothesisSpaceTooLarge("joint slot decode too large");
        }
        for (int t = 0; t < pad; ++t) {
            std::vector<int> best(cfg.J, 0);
            double best_metric = std::numeric_limits<double>::infinity();
            std::vector<int> labels(cfg.J, 0);
            for (uint64_t cand = 0; cand < total; ++cand) {
                uint64_t rem = cand;
                for (int j = 0; j < cfg.J; ++j) {
                    labels[j] = static_cast<int>(rem % order);
                    rem /= order;
                }
                double metric = 0.0;
                for (int i = 0; i < cfg.Ra; ++i) {
                    cplx mix = 0.0;
                    for (int j = 0; j < cfg.J; ++j) {
                        const cplx s = set.points[labels[j]];
                        mix += (t == 0 ? s : -std::conj(s)) * ch.F[j](0, i);
                    }
                    metric += std::norm(r[i](t, 0) - amp * mix);
                }
                if (metric < best_metric) {
                    best_metric = metric;
                    best = labels;
                }
            }
            for (int j = 0; j < cfg.J; ++j) out[j][t] = set.points[best[j]];
        }
        return out;
    }

    // Multi-antenna sources couple all slots; enumerate whole frames.  The
    // per-source images are precomputed so the joint sweep only adds vectors.
    uint64_t per_source = 1;
    for (int pos = 0; pos < pad; ++pos) {
        per_source *= static_cast<uint64_t>(bank.sets[pos / 2].order());
        if (per_source > (1u << 20)) throw HypothesisSpaceTooLarge("joint frame decode too large");
    }
    uint64_t total = 1;
    for (int j = 0; j < cfg.J; ++j) {
        if (total > (1u << 20) / per_source + 1)
            throw HypothesisSpaceTooLarge("joint frame decode too large");
        total *= per_source;
    }
    if (total > (1u << 20)) throw HypothesisSpaceTooLarge("joint frame decode too large");

    std::vector<std::vector<cplx>> cand_syms(per_source, std::vector<cplx>(pad));
    std::vector<std::vector<std::vector<cplx>>> images(cfg.J);
    for (uint64_t c = 0; c < per_source; ++c) {
        uint64_t rem = c;
        for (int pos = 0; pos < pad; ++pos) {
            const Constellation& set = bank.sets[pos / 2];
            cand_syms[c][pos] = set.points[rem % set.order()];
            rem /= set.order();
        }
    }
    for (int j = 0; j < cfg.J; ++j) {
        images[j].resize(per_source);
        for (uint64_t c = 0; c < per_source; ++c) {
            const CMat code = abba_encode(cfg.n(), cand_syms[c]);
            images[j][c] = frame_image(cfg, code, ch.F[j], amp);
        }
    }

    std::vector<cplx> obs(static_cast<size_t>(cfg.Ra) * pad);
    for (int i = 0; i < cfg.Ra; ++i)
        for (int t = 0; t < pad; ++t) obs[static_cast<size_t>(i) * pad + t] = r[i](t, 0);

    std::vector<uint64_t> best(cfg.J, 0), idx(cfg.J, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    std::vector<cplx> sum(obs.size());
    for (uint64_t cand = 0; cand < total; ++cand) {
        uint64_t rem = cand;
        for (int j = 0; j < cfg.J; ++j) {
            idx[j] = rem % per_source;
            rem /= per_source;
        }
        double metric = 0.0;
        for (size_t e = 0; e < obs.size(); ++e) {
            cplx mix = 0.0;
            for (int j = 0; j < cfg.J; ++j) mix += images[j][idx[j]][e];
            metric += std::norm(obs[e] - mix);
        }
        if (metric < best_metric) {
            best_metric = metric;
            best = idx;
        }
    }
    for (int j = 0; j < cfg.J; ++j) out[j] = cand_syms[best[j]];
    return out;
}

}  // namespace marn
