#include "marn/stbc.hpp"

namespace marn {

CMat alamouti(cplx s1, cplx s2) {
    CMat m(2, 2);
    m(0, 0) = s1;
    m(0, 1) = s2;
    m(1, 0) = -std::conj(s2);
    m(1, 1) = std::conj(s1);
    return m;
}

CMat abba_encode(int n, const std::vector<cplx>& s) {
    if (n < 1 || static_cast<int>(s.size()) != (1 << n))
        throw ConfigError("abba_encode: need 2^n symbols, n >= 1");
    if (n == 1) return alamouti(s[0], s[1]);
    const int half = 1 << (n - 1);
    std::vector<cplx> lo(s.begin(), s.begin() + half);
    std::vector<cplx> hi(s.begin() + half, s.end());
    const CMat A = abba_encode(n - 1, lo);
    const CMat B = abba_encode(n - 1, hi);
    CMat m(2 * half, 2 * half);
    m.set_block(0, 0, A);
    m.set_block(0, half, B);
    m.set_block(half, 0, B);
    m.set_block(half, half, A);
    return m;
}

CMat truncate_columns(const CMat& code, int ja) {
    if (ja > code.cols()) throw ConfigError("truncate_columns: more columns than codeword has");
    return code.block(0, 0, code.rows(), ja);
}

namespace {
// Codeword maps used only to probe out dispersion matrices.
CMat alamouti_codeword(const std::vector<cplx>& s) { return alamouti(s[0], s[1]); }

// Standard 3-symbol / 4-slot / 4-antenna complex orthogonal design.
CMat rate34_codeword(const std::vector<cplx>& s) {
    const cplx s1 = s[0], s2 = s[1], s3 = s[2];
    CMat m(4, 4);
    m(0, 0) = s1;
    m(0, 1) = s2;
    m(0, 2) = s3;
    m(1, 0) = -std::conj(s2);
    m(1, 1) = std::conj(s1);
    m(1, 3) = -s3;
    m(2, 0) = -std::conj(s3);
    m(2, 2) = std::conj(s1);
    m(2, 3) = s2;
    m(3, 1) = std::conj(s3);
    m(3, 2) = -std::conj(s2);
    m(3, 3) = s1;
    return m;
}
}  // namespace

OrthogonalDesign make_design(const std::string& name) {
    OrthogonalDesign d;
    d.name = name;
    CMat (*codeword)(const std::vector<cplx>&) = nullptr;
    if (name == "alamouti_2") {
        d.T2 = 2;
        d.Ra = 2;
        d.K = 2;
        codeword = alamouti_codeword;
    } else if (name == "rate34_4") {
        d.T2 = 4;
        d.Ra = 4;
        d.K = 3;
        codeword = rate34_codeword;
    } else {
        throw ConfigError("make_design: unknown design '" + name + "'");
    }
    // Probe linearity: A_k = C(e_k), B_k = -j C(j e_k).
    for (int k = 0; k < d.K; ++k) {
        std::vector<cplx> e(d.K, cplx{});
        e[k] = 1.0;
        d.A.push_back(codeword(e));
        e[k] = cplx(0.0, 1.0);
        d.B.push_back(codeword(e) * cplx(0.0, -1.0));
    }
    return d;
}

CMat od_codeword(const OrthogonalDesign& d, const std::vector<cplx>& s) {
    if (static_cast<int>(s.size()) != d.K)
        throw ConfigError("od_codeword: design expects " + std::to_string(d.K) + " symbols");
    CMat m(d.T2, d.Ra);
    for (int k = 0; k < d.K; ++k) {
        m += d.A[k] * cplx(s[k].real(), 0.0);
        m += d.B[k] * cplx(0.0, s[k].imag());
    }
    return m;
}

RealExpansion real_expand(const OrthogonalDesign& d) {
    RealExpansion rx;
    for (int k = 0; k < d.K; ++k) {
        const CMat& A = d.A[k];
        const CMat& B = d.B[k];
        CMat a(2 * d.T2, 2 * d.Ra), b(2 * d.T2, 2 * d.Ra);
        for (int i = 0; i < d.T2; ++i)
            for (int j = 0; j < d.Ra; ++j) {
                const double rA = A(i, j).real(), iA = A(i, j).imag();
                const double rB = B(i, j).real(), iB = B(i, j).imag();
                a(i, j) = rA;
                a(i, j + d.Ra) = -iA;
                a(i + d.T2, j) = iA;
                a(i + d.T2, j + d.Ra) = rA;
                b(i, j) = -iB;
                b(i, j + d.Ra) = -rB;
                b(i + d.T2, j) = rB;
                b(i + d.T2, j + d.Ra) = -iB;
            }
        rx.A.push_back(a);
        rx.B.push_back(b);
    }
    return rx;
}

}  // namespace marn
