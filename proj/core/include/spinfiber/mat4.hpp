#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include "spinfiber/tolerances.hpp"

namespace spinfiber {

using cplx = std::complex<double>;

/// Real 4-vector.
struct Vec4 {
    std::array<double, 4> v{};

    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    friend Vec4 operator+(const Vec4& a, const Vec4& b) {
        Vec4 r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + b[i];
        return r;
    }
    friend Vec4 operator-(const Vec4& a, const Vec4& b) {
        Vec4 r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] - b[i];
        return r;
    }
    friend Vec4 operator*(double s, const Vec4& a) {
        Vec4 r;
        for (int i = 0; i < 4; ++i) r[i] = s * a[i];
        return r;
    }
};

/// Dense real 4x4 matrix, row-major storage.
struct Mat4 {
    std::array<double, 16> a{};

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r * 4 + c)]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 4 + c)]; }

    static Mat4 zero() { return Mat4{}; }
    static Mat4 identity() {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat4 diagonal(const std::array<double, 4>& d) {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    Mat4 transposed() const {
        Mat4 m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(c, r) = (*this)(r, c);
        return m;
    }

    double frobenius_norm() const;
    double max_abs() const;
    double l1_norm() const; // maximum absolute column sum

    friend Mat4 operator+(const Mat4& x, const Mat4& y) {
        Mat4 r;
        for (std::size_t i = 0; i < 16; ++i) r.a[i] = x.a[i] + y.a[i];
        return r;
    }
    friend Mat4 operator-(const Mat4& x, const Mat4& y) {
        Mat4 r;
        for (std::size_t i = 0; i < 16; ++i) r.a[i] = x.a[i] - y.a[i];
        return r;
    }
    friend Mat4 operator*(double s, const Mat4& x) {
        Mat4 r;
        for (std::size_t i = 0; i < 16; ++i) r.a[i] = s * x.a[i];
        return r;
    }
    friend Mat4 operator*(const Mat4& x, const Mat4& y) {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double acc = x(i, 0) * y(0, j);
                for (int k = 1; k < 4; ++k) acc += x(i, k) * y(k, j);
                r(i, j) = acc;
            }
        return r;
    }
    friend Vec4 operator*(const Mat4& x, const Vec4& u) {
        Vec4 r;
        for (int i = 0; i < 4; ++i) {
            double acc = x(i, 0) * u[0];
            for (int k = 1; k < 4; ++k) acc += x(i, k) * u[k];
            r[i] = acc;
        }
        return r;
    }
};

/// Dense complex 4x4 matrix, row-major storage.
struct Mat4c {
    std::array<cplx, 16> a{};

    cplx& operator()(int r, int c) { return a[static_cast<std::size_t>(r * 4 + c)]; }
    cplx operator()(int r, int c) const { return a[static_cast<std::size_t>(r * 4 + c)]; }

    static Mat4c zero() { return Mat4c{}; }
    static Mat4c identity() {
        Mat4c m;
        for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat4c transposed() const {
        Mat4c m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(c, r) = (*this)(r, c);
        return m;
    }
    Mat4c adjoint() const {
        Mat4c m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    double frobenius_norm() const;
    double max_abs() const;
    double l1_norm() const;

    friend Mat4c operator+(const Mat4c& x, const Mat4c& y) {
        Mat4c r;
        for (std::size_t i = 0; i < 16; ++i) r.a[i] = x.a[i] + y.a[i];
        return r;
    }
    friend Mat4c operator-(const Mat4c& x, const Mat4c& y) {
        Mat4c r;
        for (std::size_t i = 0; i < 16; ++i) r.a[i] = x.a[i] - y.a[i];
        return r;
    }
    friend Mat4c operator*(cplx s, const Mat4c& x) {
        Mat4c r;
        for (std::size_t i = 0; i < 16; ++i) r.a[i] = s * x.a[i];
        return r;
    }
    friend Mat4c operator*(double s, const Mat4c& x) { return cplx(s, 0.0) * x; }
    friend Mat4c operator*(const Mat4c& x, const Mat4c& y) {
        Mat4c r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                cplx acc = x(i, 0) * y(0, j);
                for (int k = 1; k < 4; ++k) acc += x(i, k) * y(k, j);
                r(i, j) = acc;
            }
        return r;
    }
};

Mat4c to_complex(const Mat4& m);

/// Eigendecomposition of a symmetric 4x4 matrix: S = V diag(lambda) V^T.
struct EigSym4 {
    std::array<double, 4> eigenvalues{};
    Mat4 eigenvectors; // columns
};

/// Cyclic Jacobi diagonalization with canonical eigenvalue ordering
/// (descending) and deterministic eigenvector signs; det(V) = +1.
EigSym4 eig_sym4(const Mat4& s, double symmetry_tol = tol::symmetry_check);

/// Matrix exponential, scaling and squaring with a degree-6 diagonal Pade
/// approximant.
Mat4 mat_exp(const Mat4& a);
Mat4c mat_exp(const Mat4c& a);

/// Principal matrix logarithm via inverse scaling and squaring.
/// Throws BranchCutError when an eigenvalue lies on the closed negative
/// real axis (no principal branch).
Mat4 mat_log(const Mat4& t);

Mat4 inverse(const Mat4& m);
Mat4c inverse(const Mat4c& m);
double determinant(const Mat4& m);

/// Roots of the characteristic polynomial (Durand-Kerner iteration).
/// Accurate for simple eigenvalues, indicative for multiple ones; used for
/// domain gates, not for decompositions.
std::array<cplx, 4> eigenvalues(const Mat4& m);

/// True when no eigenvalue of m lies on the closed negative real axis.
bool has_principal_log(const Mat4& m);

} // namespace spinfiber
