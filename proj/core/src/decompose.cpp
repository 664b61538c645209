#include "spinfiber/decompose.hpp"

#include <cmath>

#include "spinfiber/errors.hpp"

namespace spinfiber {

IsometryFactorization factorize(const Mat4& t, const DiagonalMetric& d) {
    if (!d.lorentz_signature())
        throw SignatureError("factorization requires signature (+,-,-,-)");
    if (!has_principal_log(t))
        throw BranchCutError("transformation is outside the supported neighborhood of the identity");

    const Mat4 dg = congruence(d, t);
    const EigSym4 eig = eig_sym4(dg);

    // Sylvester guarantees the sign pattern survives the congruence; losing it
    // numerically means the eigenproblem degenerated.
    if (!(eig.eigenvalues[0] > 0.0 && eig.eigenvalues[1] < 0.0 && eig.eigenvalues[2] < 0.0 &&
          eig.eigenvalues[3] < 0.0))
        throw DegenerateMetricError("congruence lost the (+,-,-,-) eigenvalue pattern");

    IsometryFactorization f;
    f.V = eig.eigenvectors;
    f.source = d;
    for (std::size_t k = 0; k < 4; ++k)
        f.baseShift.delta[k] = std::log(std::abs(eig.eigenvalues[k])) - d.log_abs[k];
    f.target = shift(d, f.baseShift);

    std::array<double, 4> scale{};
    std::array<double, 4> inv_scale{};
    for (std::size_t k = 0; k < 4; ++k) {
        scale[k] = std::exp(0.5 * f.baseShift.delta[k]);
        inv_scale[k] = std::exp(-0.5 * f.baseShift.delta[k]);
    }
    f.Delta = Mat4::diagonal(scale);
    f.U = Mat4::diagonal(inv_scale) * f.V.transposed() * t;
    return f;
}

ExponentialParts exponential_parts(const IsometryFactorization& f) {
    ExponentialParts p;
    p.v_gen = mat_log(f.V);
    for (int k = 0; k < 4; ++k) p.delta_gen[static_cast<std::size_t>(k)] = std::log(f.Delta(k, k));
    p.u_gen = mat_log(f.U);
    return p;
}

double reconstruction_residual(const IsometryFactorization& f, const Mat4& t) {
    return (f.V * f.Delta * f.U - t).max_abs();
}

double right_isometry_residual(const IsometryFactorization& f) {
    const Mat4 dm = f.source.matrix();
    return (f.U * dm * f.U.transposed() - dm).max_abs();
}

} // namespace spinfiber
