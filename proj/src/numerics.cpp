#include "marn/numerics.hpp"

#include <cmath>

namespace marn {

CMat CMat::operator+(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < d_.size(); ++i) r.d_[i] += o.d_[i];
    return r;
}

CMat CMat::operator-(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < d_.size(); ++i) r.d_[i] -= o.d_[i];
    return r;
}

CMat CMat::operator*(const CMat& o) const {
    CMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = 0; k < cols_; ++k) {
            const cplx a = (*this)(i, k);
            if (a == cplx{}) continue;
            for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
        }
    }
    return r;
}

CMat CMat::operator*(cplx s) const {
    CMat r = *this;
    for (auto& v : r.d_) v *= s;
    return r;
}

CMat& CMat::operator+=(const CMat& o) {
    for (size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
    return *this;
}

CMat& CMat::operator*=(cplx s) {
    for (auto& v : d_) v *= s;
    return *this;
}

CMat CMat::conj() const {
    CMat r = *this;
    for (auto& v : r.d_) v = std::conj(v);
    return r;
}

CMat CMat::transpose() const {
    CMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

CMat CMat::herm() const {
    CMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

double CMat::norm2() const {
    double s = 0.0;
    for (const auto& v : d_) s += std::norm(v);
    return s;
}

double CMat::norm() const { return std::sqrt(norm2()); }

cplx CMat::trace() const {
    cplx s{};
    for (int i = 0; i < rows_ && i < cols_; ++i) s += (*this)(i, i);
    return s;
}

CMat CMat::block(int r0, int c0, int nr, int nc) const {
    CMat r(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
}

void CMat::set_block(int r0, int c0, const CMat& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

CMat hadamard(int order_log2) {
    if (order_log2 < 0 || order_log2 > 16)
        throw ConfigError("hadamard: order 2^" + std::to_string(order_log2) +
                          " outside supported range [2^0, 2^16]");
    CMat h(1, 1);
    h(0, 0) = 1.0;
    for (int s = 0; s < order_log2; ++s) {
        const int n = h.rows();
        CMat next(2 * n, 2 * n);
        next.set_block(0, 0, h);
        next.set_block(0, n, h);
        next.set_block(n, 0, h);
        next.set_block(n, n, h * cplx(-1.0, 0.0));
        h = next;
    }
    return h;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const cplx s = a(i, j);
            if (s == cplx{}) continue;
            for (int p = 0; p < b.rows(); ++p)
                for (int q = 0; q < b.cols(); ++q)
                    r(i * b.rows() + p, j * b.cols() + q) = s * b(p, q);
        }
    return r;
}

CMat invert_hermitian(const CMat& a) {
    const int n = a.rows();
    if (n != a.cols()) throw SingularMatrix("invert_hermitian: matrix not square");
    const double tol = 1e-12 * a.norm();

    // Cholesky a = L L^H with pivot guard.
    CMat L(n, n);
    for (int j = 0; j < n; ++j) {
        double diag = a(j, j).real();
        for (int k = 0; k < j; ++k) diag -= std::norm(L(j, k));
        if (!(diag > tol)) throw SingularMatrix("invert_hermitian: pivot below tolerance");
        const double ljj = std::sqrt(diag);
        L(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
            L(i, j) = s / ljj;
        }
    }

    // Invert by solving L Y = I (forward), then L^H X = Y (backward).
    CMat X = CMat::identity(n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            cplx s = X(i, c);
            for (int k = 0; k < i; ++k) s -= L(i, k) * X(k, c);
            X(i, c) = s / L(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            cplx s = X(i, c);
            for (int k = i + 1; k < n; ++k) s -= std::conj(L(k, i)) * X(k, c);
            X(i, c) = s / L(i, i);
        }
    }
    return X;
}

}  // namespace marn
