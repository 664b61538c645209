#include "spinfiber/clifford.hpp"

#include <cmath>

#include "spinfiber/errors.hpp"

namespace spinfiber {

namespace {

constexpr cplx kI{0.0, 1.0};

Mat4c block_gamma(const std::array<cplx, 4>& pauli) {
    // [[0, s], [-s, 0]] with s the given 2x2 block (row-major).
    Mat4c g;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            g(r, c + 2) = pauli[static_cast<std::size_t>(r * 2 + c)];
            g(r + 2, c) = -pauli[static_cast<std::size_t>(r * 2 + c)];
        }
    return g;
}

} // namespace

GammaRep standard_gammas() {
    GammaRep rep;
    rep.metric = minkowski();

    Mat4c g0;
    g0(0, 0) = 1.0;
    g0(1, 1) = 1.0;
    g0(2, 2) = -1.0;
    g0(3, 3) = -1.0;

    rep.gammas[0] = g0;
    rep.gammas[1] = block_gamma({0.0, 1.0, 1.0, 0.0});
    rep.gammas[2] = block_gamma({0.0, -kI, kI, 0.0});
    rep.gammas[3] = block_gamma({1.0, 0.0, 0.0, -1.0});
    rep.conj = g0;
    return rep;
}

GammaRep deformed_gammas(const DiagonalMetric& d) {
    if (!d.lorentz_signature())
        throw SignatureError("deformed gammas require signature (+,-,-,-)");
    GammaRep rep = standard_gammas();
    rep.metric = d;
    for (std::size_t k = 0; k < 4; ++k) {
        const double s = std::exp(0.5 * d.log_abs[k]);
        rep.gammas[k] = s * rep.gammas[k];
    }
    rep.conj = rep.gammas[0];
    return rep;
}

Mat4c sigma(const GammaRep& rep, int n, int m) {
    const Mat4c& gn = rep.gammas[static_cast<std::size_t>(n)];
    const Mat4c& gm = rep.gammas[static_cast<std::size_t>(m)];
    return (0.5 * kI) * (gn * gm - gm * gn);
}

CoSpinor dirac_adjoint(const GammaRep& rep, const Spinor& psi) {
    CoSpinor row;
    for (int j = 0; j < 4; ++j) {
        cplx acc = std::conj(psi[0]) * rep.conj(0, j);
        for (int i = 1; i < 4; ++i) acc += std::conj(psi[i]) * rep.conj(i, j);
        row[j] = acc;
    }
    return row;
}

double norm_density(const GammaRep& rep, const Spinor& psi) {
    return (dirac_adjoint(rep, psi) * psi).real();
}

double anticommutator_residual(const GammaRep& rep) {
    double worst = 0.0;
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) {
            const Mat4c& gn = rep.gammas[static_cast<std::size_t>(n)];
            const Mat4c& gm = rep.gammas[static_cast<std::size_t>(m)];
            Mat4c res = gn * gm + gm * gn;
            if (n == m) {
                const double dk = rep.metric.entry(n);
                res = res - (2.0 * dk) * Mat4c::identity();
            }
            worst = std::max(worst, res.max_abs());
        }
    return worst;
}

} // namespace spinfiber
