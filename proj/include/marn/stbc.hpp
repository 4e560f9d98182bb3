#pragma once

#include <string>
#include <vector>

#include "marn/numerics.hpp"

namespace marn {

// [[s1, s2], [-conj(s2), conj(s1)]], rows = time slots, columns = antennas.
CMat alamouti(cplx s1, cplx s2);

// Quasi-orthogonal recursion S_n = [[A, B], [B, A]] over halves of s;
// S_1 is the Alamouti block.  s must have length 2^n.
CMat abba_encode(int n, const std::vector<cplx>& s);

// Keep the first ja columns (sources with fewer antennas than the codeword
// width transmit only those; the dropped columns correspond to zeroed
// channel rows).
CMat truncate_columns(const CMat& code, int ja);

// T2 x Ra linear-dispersion codebook: C(s) = sum_k Re(s_k) A_k + j Im(s_k) B_k
// with C(s)^* C(s) = ||s||^2 I for every s.
struct OrthogonalDesign {
    std::string name;
    int T2 = 0;
    int Ra = 0;
    int K = 0;
    std::vector<CMat> A;
    std::vector<CMat> B;
};

// Supported designs: "alamouti_2" (Ra=2, K=2, T2=2, rate 1) and "rate34_4"
// (Ra=4, K=3, T2=4, rate 3/4).  Dispersion matrices are extracted from the
// codeword map by probing with unit and j-unit symbols.
OrthogonalDesign make_design(const std::string& name);

CMat od_codeword(const OrthogonalDesign& d, const std::vector<cplx>& s);

// Real-valued block expansions used by the destination matched filter:
//   Ak = [[Re A, -Im A], [Im A, Re A]],  Bk = [[-Im B, -Re B], [Re B, -Im B]]
// (stored in CMat with zero imaginary parts; sizes 2T2 x 2Ra).
struct RealExpansion {
    std::vector<CMat> A;
    std::vector<CMat> B;
};

RealExpansion real_expand(const OrthogonalDesign& d);

}  // namespace marn
