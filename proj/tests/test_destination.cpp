#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "marn/destination.hpp"

using namespace marn;

namespace {

CMat random_g(int Ra, int M, RandomStream& rng) {
    CMat g(Ra, M);
    for (int i = 0; i < Ra; ++i)
        for (int m = 0; m < M; ++m) g(i, m) = rng.cgaussian();
    return g;
}

std::vector<cplx> random_soft(int K, RandomStream& rng) {
    std::vector<cplx> s(K);
    for (cplx& v : s) v = rng.cgaussian();
    return s;
}

}  // namespace

TEST_CASE("second hop applies the relay-destination channel per antenna") {
    const OrthogonalDesign d = make_design("rate34_4");
    RandomStream rng(41, 0);
    const CMat g = random_g(4, 2, rng);
    const CMat frame = od_codeword(d, random_soft(d.K, rng));
    const auto x = phase2_receive(frame, g, nullptr);
    REQUIRE(x.size() == 2);
    for (int m = 0; m < 2; ++m) {
        REQUIRE(x[m].rows() == d.T2);
        for (int t = 0; t < d.T2; ++t) {
            cplx want = 0.0;
            for (int i = 0; i < d.Ra; ++i) want += frame(t, i) * g(i, m);
            CHECK(std::abs(x[m](t, 0) - want) < 1e-12);
        }
    }
    RandomStream nrng(41, 1);
    const auto xn = phase2_receive(frame, g, &nrng);
    CHECK((xn[0] - x[0]).norm() > 1e-6);
}

TEST_CASE("real stacking is orthogonal: Gt' Gt = ||G||^2 I") {
    RandomStream rng(42, 0);
    for (const char* name : {"alamouti_2", "rate34_4"}) {
        const OrthogonalDesign d = make_design(name);
        const RealExpansion rex = real_expand(d);
        for (int M : {1, 2}) {
            for (int t = 0; t < 100; ++t) {
                const CMat g = random_g(d.Ra, M, rng);
                const auto x = phase2_receive(od_codeword(d, random_soft(d.K, rng)), g, nullptr);
                const StackedObservation so = stack_real(x, g, rex);
                REQUIRE(so.Gt.rows() == 2 * d.T2 * M);
                REQUIRE(so.Gt.cols() == 2 * d.K);
                const CMat gram = so.Gt.transpose() * so.Gt;
                const double e = gamma_g(g);
                for (int r = 0; r < gram.rows(); ++r)
                    for (int c = 0; c < gram.cols(); ++c)
                        CHECK(std::abs(gram(r, c) - (r == c ? e : 0.0)) < 1e-10);
            }
        }
    }
}

TEST_CASE("matched filter inverts a clean forwarded word") {
    RandomStream rng(43, 0);
    for (const char* name : {"alamouti_2", "rate34_4"}) {
        const OrthogonalDesign d = make_design(name);
        const RealExpansion rex = real_expand(d);
        for (int t = 0; t < 50; ++t) {
            const CMat g = random_g(d.Ra, 2, rng);
            const auto soft = random_soft(d.K, rng);
            const double c = 0.8;
            const auto x = phase2_receive(od_codeword(d, soft) * cplx(c), g, nullptr);
            const auto mf = matched_filter(x, g, rex);
            const auto mf2 = matched_filter(x, g, d);
            REQUIRE(mf.size() == static_cast<size_t>(d.K));
            for (int k = 0; k < d.K; ++k) {
                CHECK(std::abs(mf[k] - c * soft[k]) < 1e-10);
                CHECK(std::abs(mf[k] - mf2[k]) < 1e-14);
            }
        }
    }
}

TEST_CASE("equivalent noise variances and receive SNR") {
    EquivalentSystem sys;
    sys.x = {0.1, -0.2};
    sys.gamma_l = {4.0, 8.0};
    sys.gamma_gv = 5.0;
    sys.c = 0.9;
    sys.P = 10.0;
    sys.Ja = 4;
    const auto s = sys.sigma_u();
    REQUIRE(s.size() == 2);
    CHECK(s[0] == doctest::Approx(2.0 * 0.81 / 4.0 + 0.2));
    CHECK(s[1] == doctest::Approx(2.0 * 0.81 / 8.0 + 0.2));
    CHECK(normalized_receive_snr(sys) == doctest::Approx(1.0 / s[0] + 1.0 / s[1]));
}

TEST_CASE("fast-path noise variance equals the general formula") {
    RandomStream rng(44, 0);
    const double c = relay_norm_c(1.0, 2, 2, 2, 2);
    for (int t = 0; t < 2000; ++t) {
        const cplx g1 = rng.cgaussian(), g2 = rng.cgaussian();
        const double gamma1 = 0.05 + 3.0 * rng.uniform01();
        EquivalentSystem sys;
        sys.x = {0.0};
        sys.gamma_l = {gamma1};
        sys.gamma_gv = std::norm(g1) + std::norm(g2);
        sys.c = c;
        sys.P = 1.0;
        sys.Ja = 2;
        const double general = sys.sigma_u()[0];
        const double fast = fast_noise_sigma(c, 1.0 / gamma1, g1, g2) / sys.gamma_gv;
        CHECK(std::abs(general - fast) <= 1e-12 * std::max(1.0, general));
    }
}

TEST_CASE("whitened ML equals exhaustive enumeration") {
    RandomStream rng(45, 0);
    for (int t = 0; t < 300; ++t) {
        const int L = 1 << rng.uniform_int(2);
        const int order = 2 << rng.uniform_int(2);
        const ConstellationBank bank = make_bank(order, L);
        EquivalentSystem sys;
        sys.c = 0.5 + rng.uniform01();
        sys.P = 1.0 + 10.0 * rng.uniform01();
        sys.Ja = 2 * L;
        sys.gamma_gv = 0.2 + 3.0 * rng.uniform01();
        const CMat H = hadamard(L == 1 ? 0 : 1);
        const double amp = sys.c * std::sqrt(sys.P / sys.Ja);
        std::vector<cplx> truth(L);
        for (int l = 0; l < L; ++l) {
            truth[l] = bank.sets[l].points[rng.uniform_int(order)];
            sys.gamma_l.push_back(0.1 + 2.0 * rng.uniform01());
        }
        sys.x.assign(L, 0.0);
        for (int l = 0; l < L; ++l) {
            cplx mix = 0.0;
            for (int u = 0; u < L; ++u) mix += H(l, u) * truth[u];
            sys.x[l] = amp * mix + 0.3 * rng.cgaussian();
        }
        const auto got = ml_decode(sys, bank);

        const auto sig = sys.sigma_u();
        std::vector<int> best(L, 0), labels(L, 0);
        double bestm = 1e300;
        while (true) {
            double m = 0.0;
            for (int l = 0; l < L; ++l) {
                cplx mix = 0.0;
                for (int u = 0; u < L; ++u) mix += H(l, u) * bank.sets[u].points[labels[u]];
                m += std::norm(sys.x[l] - amp * mix) / sig[l];
            }
            if (m < bestm) {
                bestm = m;
                best = labels;
            }
            int pos = 0;
            while (pos < L && ++labels[pos] == order) labels[pos++] = 0;
            if (pos == L) break;
        }
        CHECK(got == best);
    }
}

TEST_CASE("fast and general decoders agree decision-for-decision") {
    NetworkConfig cfg;
    cfg.J = 2;
    cfg.Ja = 2;
    cfg.Ra = 2;
    cfg.M = 1;
    cfg.P = 10.0;
    cfg.validate();
    const ConstellationBank bank = make_bank(8, 1);
    const OrthogonalDesign d = make_design("alamouti_2");
    const double c = relay_norm_c(cfg.P, d.T2, d.Ra, d.K, cfg.J);
    int compared = 0, errors_seen = 0;
    for (int t = 0; t < 2000; ++t) {
        RandomStream rng(46, t);
        const ChannelRealization ch = draw_channel(cfg, rng);
        std::vector<std::vector<cplx>> sym(2);
        std::vector<CMat> cw;
        for (int j = 0; j < 2; ++j) {
            sym[j] = {bank.sets[0].points[rng.uniform_int(8)],
                      bank.sets[0].points[rng.uniform_int(8)]};
            cw.push_back(abba_encode(1, sym[j]));
        }
        const auto r = phase1_receive(cfg, ch, cw, cfg.P, &rng);
        const auto subs = separate_subsystems(cfg, r, ch);
        SoftEstimateBlock soft;
        try {
            soft = mrc_combine(cancel_interference(cfg, subs[0], 0));
        } catch (const DegenerateChannel&) {
            continue;
        }
        const RelayFrame f = forward_encode({soft.odd, soft.even}, d, cfg.P, cfg.J);
        const auto x = phase2_receive(f.T, ch.G[0], &rng);
        const auto mf = matched_filter(x, ch.G[0], d);

        std::vector<int> general(2);
        for (int parity = 0; parity < 2; ++parity) {
            EquivalentSystem sys;
            sys.x = {mf[parity]};
            sys.gamma_l = {soft.gamma_l};
            sys.gamma_gv = gamma_g(ch.G[0]);
            sys.c = c;
            sys.P = cfg.P;
            sys.Ja = cfg.Ja;
            general[parity] = ml_decode(sys, bank)[0];
        }

        CMat xhat(2, 1);
        xhat(0, 0) = x[0](0, 0);
        xhat(1, 0) = -std::conj(x[0](1, 0));
        const auto fast = decode_2221_fast(xhat, ch.G[0](0, 0), ch.G[0](1, 0),
                                           1.0 / soft.gamma_l, c, cfg.P, bank);
        CHECK(general[0] == fast.first);
        CHECK(general[1] == fast.second);
        ++compared;
        const int sent_odd = static_cast<int>(std::find_if(bank.sets[0].points.begin(),
                                                           bank.sets[0].points.end(),
                                                           [&](cplx p) {
                                                               return std::abs(p - sym[0][0]) < 1e-12;
                                                           }) -
                                              bank.sets[0].points.begin());
        if (fast.first != sent_odd) ++errors_seen;
    }
    CHECK(compared > 1900);
    CHECK(errors_seen > 0);  // the agreement is meaningful only if errors occur
}

TEST_CASE("fast decoder validates its inputs") {
    const ConstellationBank bank = make_bank(8, 1);
    const ConstellationBank two = make_bank(4, 2);
    CMat ok(2, 1);
    CHECK_THROWS_AS(decode_2221_fast(CMat(3, 1), 1.0, 1.0, 1.0, 1.0, 10.0, bank), ConfigError);
    CHECK_THROWS_AS(decode_2221_fast(ok, 1.0, 1.0, 1.0, 1.0, 10.0, two), ConfigError);
}
