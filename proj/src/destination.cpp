#include "marn/destination.hpp"

#include <cmath>
#include <limits>

namespace marn {

std::vector<CMat> phase2_receive(const CMat& frame, const CMat& G, RandomStream* rng) {
    const int T2 = frame.rows();
    const int Ra = frame.cols();
    const int M = G.cols();
    std::vector<CMat> x(M);
    for (int m = 0; m < M; ++m) {
        CMat xm = CMat::zeros(T2, 1);
        for (int t = 0; t < T2; ++t) {
            cplx acc = 0.0;
            for (int i = 0; i < Ra; ++i) acc += frame(t, i) * G(i, m);
            xm(t, 0) = acc;
        }
        if (rng) xm += awgn(T2, *rng);
        x[m] = std::move(xm);
    }
    return x;
}

StackedObservation stack_real(const std::vector<CMat>& x, const CMat& G,
                              const RealExpansion& rex) {
    const int M = static_cast<int>(x.size());
    const int T2 = x[0].rows();
    const int Ra = G.rows();
    const int K = static_cast<int>(rex.A.size());

    StackedObservation out;
    out.xt = CMat::zeros(2 * T2 * M, 1);
    out.Gt = CMat::zeros(2 * T2 * M, 2 * K);
    for (int m = 0; m < M; ++m) {
        CMat gt(2 * Ra, 1);
        for (int i = 0; i < Ra; ++i) {
            gt(i, 0) = G(i, m).real();
            gt(Ra + i, 0) = G(i, m).imag();
        }
        const int row0 = 2 * T2 * m;
        for (int t = 0; t < T2; ++t) {
            out.xt(row0 + t, 0) = x[m](t, 0).real();
            out.xt(row0 + T2 + t, 0) = x[m](t, 0).imag();
        }
        for (int k = 0; k < K; ++k) {
            out.Gt.set_block(row0, 2 * k, rex.A[k] * gt);
            out.Gt.set_block(row0, 2 * k + 1, rex.B[k] * gt);
        }
    }
    return out;
}

std::vector<cplx> matched_filter(const std::vector<CMat>& x, const CMat& G,
                                 const RealExpansion& rex) {
    const double g2 = G.norm2();
    if (g2 <= 1e-24) throw DegenerateChannel("vanishing destination channel");
    const StackedObservation so = stack_real(x, G, rex);
    const int K = static_cast<int>(rex.A.size());
    std::vector<cplx> out(K);
    for (int k = 0; k < K; ++k) {
        double re = 0.0, im = 0.0;
        for (int r = 0; r < so.xt.rows(); ++r) {
            const double v = so.xt(r, 0).real();
            re += so.Gt(r, 2 * k).real() * v;
            im += so.Gt(r, 2 * k + 1).real() * v;
        }
        out[k] = cplx(re / g2, im / g2);
    }
    return out;
}

std::vector<cplx> matched_filter(const std::vector<CMat>& x, const CMat& G,
                                 const OrthogonalDesign& design) {
    return matched_filter(x, G, real_expand(design));
}

std::vector<double> EquivalentSystem::sigma_u() const {
    std::vector<double> s(x.size());
    for (size_t l = 0; l < x.size(); ++l)
        s[l] = L() * c * c / gamma_l[l] + 1.0 / gamma_gv;
    return s;
}

std::vector<int> ml_decode(const EquivalentSystem& sys, const ConstellationBank& bank) {
    const CMat H = hadamard(static_cast<int>(std::round(std::log2(sys.L()))));
    return weighted_grid_argmin(sys.x, sys.sigma_u(), sys.c * std::sqrt(sys.P / sys.Ja), H,
                                bank);
}

double normalized_receive_snr(const EquivalentSystem& sys) {
    double g = 0.0;
    for (double s : sys.sigma_u()) g += 1.0 / s;
    return g;
}

double fast_noise_sigma(double c, double gamma_f, cplx g1, cplx g2) {
    return c * c * gamma_f * (std::norm(g1) + std::norm(g2)) + 1.0;
}

std::pair<int, int> decode_2221_fast(const CMat& xhat, cplx g1, cplx g2, double gamma_f,
                                     double c, double P, const ConstellationBank& bank) {
    if (xhat.rows() != 2 || xhat.cols() != 1 || bank.sets.size() != 1)
        throw ConfigError("decode_2221_fast: needs a 2x1 observation and a single-set bank");
    (void)gamma_f;  // enters only through the constant noise factor, which the
                    // slicer may drop without changing any decision

    // Alamouti matched filter: S1(g1,g2)^* xhat decouples the two symbols.
    const cplx z1 = std::conj(g1) * xhat(0, 0) - g2 * xhat(1, 0);
    const cplx z2 = std::conj(g2) * xhat(0, 0) + g1 * xhat(1, 0);
    const double scale = c * std::sqrt(P / 2.0) * (std::norm(g1) + std::norm(g2));

    const Constellation& set = bank.sets[0];
    std::pair<int, int> out{0, 0};
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = std::numeric_limits<double>::infinity();
    for (int lab = 0; lab < set.order(); ++lab) {
        const cplx ref = scale * set.points[lab];
        const double m1 = std::norm(z1 - ref);
        const double m2 = std::norm(z2 - ref);
        if (m1 < b1) {
            b1 = m1;
            out.first = lab;
        }
        if (m2 < b2) {
            b2 = m2;
            out.second = lab;
        }
    }
    return out;
}

}  // namespace marn
