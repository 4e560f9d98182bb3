#pragma once

#include <complex>
#include <vector>

#include "marn/error.hpp"

namespace marn {

using cplx = std::complex<double>;

// Small dense complex matrix, row-major.  Everything in this simulator is
// tiny (<= 32x32), so there is no attempt at blocking or views.
class CMat {
  public:
    CMat() = default;
    CMat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<size_t>(rows) * cols) {}

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static CMat zeros(int r, int c) { return CMat(r, c); }
    static CMat col(const std::vector<cplx>& v) {
        CMat m(static_cast<int>(v.size()), 1);
        for (size_t i = 0; i < v.size(); ++i) m.d_[i] = v[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return d_.size(); }

    cplx& operator()(int r, int c) { return d_[static_cast<size_t>(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const { return d_[static_cast<size_t>(r) * cols_ + c]; }
    cplx& operator[](size_t i) { return d_[i]; }
    const cplx& operator[](size_t i) const { return d_[i]; }

    CMat operator+(const CMat& o) const;
    CMat operator-(const CMat& o) const;
    CMat operator*(const CMat& o) const;
    CMat operator*(cplx s) const;
    CMat& operator+=(const CMat& o);
    CMat& operator*=(cplx s);

    CMat conj() const;
    CMat transpose() const;
    CMat herm() const;  // conjugate transpose

    double norm2() const;  // squared Frobenius norm
    double norm() const;
    cplx trace() const;

    CMat block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const CMat& b);

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> d_;
};

inline CMat operator*(cplx s, const CMat& m) { return m * s; }
inline CMat operator*(double s, const CMat& m) { return m * cplx(s, 0.0); }

// Sylvester Hadamard matrix of size 2^n; entries are exactly +-1.
// Rejects n outside [0, 16] as an absurd configuration.
CMat hadamard(int order_log2);

CMat kron(const CMat& a, const CMat& b);

// Inverse of a Hermitian positive definite matrix via Cholesky.
// Throws SingularMatrix when the smallest pivot falls below 1e-12 * ||a||.
CMat invert_hermitian(const CMat& a);

}  // namespace marn
