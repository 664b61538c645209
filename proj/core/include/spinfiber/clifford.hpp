#pragma once

#include <array>

#include "spinfiber/base_metric.hpp"
#include "spinfiber/mat4.hpp"

namespace spinfiber {

/// Four complex components; the upper pair transforms as phi, the lower as chi
/// in the Dirac block convention used throughout.
struct Spinor {
    std::array<cplx, 4> c{};

    cplx& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    cplx operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    friend Spinor operator+(const Spinor& a, const Spinor& b) {
        Spinor r;
        for (std::size_t i = 0; i < 4; ++i) r.c[i] = a.c[i] + b.c[i];
        return r;
    }
    friend Spinor operator-(const Spinor& a, const Spinor& b) {
        Spinor r;
        for (std::size_t i = 0; i < 4; ++i) r.c[i] = a.c[i] - b.c[i];
        return r;
    }
    friend Spinor operator*(cplx s, const Spinor& a) {
        Spinor r;
        for (std::size_t i = 0; i < 4; ++i) r.c[i] = s * a.c[i];
        return r;
    }
    friend Spinor operator*(double s, const Spinor& a) {
        Spinor r;
        for (std::size_t i = 0; i < 4; ++i) r.c[i] = s * a.c[i];
        return r;
    }
    friend Spinor operator*(const Mat4c& m, const Spinor& u) {
        Spinor r;
        for (int i = 0; i < 4; ++i) {
            cplx acc = m(i, 0) * u[0];
            for (int k = 1; k < 4; ++k) acc += m(i, k) * u[k];
            r[i] = acc;
        }
        return r;
    }

    double max_abs() const {
        double s = 0.0;
        for (const auto& x : c) s = std::max(s, std::abs(x));
        return s;
    }
};

/// Row spinor, produced by the Dirac adjoint.
struct CoSpinor {
    std::array<cplx, 4> c{};

    cplx& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    cplx operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    friend cplx operator*(const CoSpinor& a, const Spinor& b) {
        cplx acc = a[0] * b[0];
        for (int i = 1; i < 4; ++i) acc += a[i] * b[i];
        return acc;
    }
};

/// Gamma matrices deformed to a diagonal metric, with the conjugation matrix
/// (gamma^0 of the representation) kept alongside.
struct GammaRep {
    DiagonalMetric metric;
    std::array<Mat4c, 4> gammas;
    Mat4c conj;
};

/// The fixed Dirac representation at the flat metric: gamma^0 = diag(1,1,-1,-1)
/// and spatial gammas built from 2x2 Pauli blocks.
GammaRep standard_gammas();

/// gamma^k(d) = sqrt(|d_k|) * gamma^k_standard. Requires signature (+,-,-,-)
/// so the conjugation matrix squares to a positive multiple of the identity;
/// otherwise throws SignatureError.
GammaRep deformed_gammas(const DiagonalMetric& d);

/// (i/2)(gamma^n gamma^m - gamma^m gamma^n).
Mat4c sigma(const GammaRep& rep, int n, int m);

/// Conjugate transpose of psi times the representation's gamma^0.
CoSpinor dirac_adjoint(const GammaRep& rep, const Spinor& psi);

/// Real part of the adjoint contraction; the imaginary residue vanishes to
/// rounding because gamma^0 is Hermitian.
double norm_density(const GammaRep& rep, const Spinor& psi);

/// max over (n,m) of |gamma^n gamma^m + gamma^m gamma^n - 2 d^{nm} I| entries.
double anticommutator_residual(const GammaRep& rep);

} // namespace spinfiber
