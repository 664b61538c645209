#pragma once

#include "spinfiber/base_metric.hpp"
#include "spinfiber/mat4.hpp"

namespace spinfiber {

/// T factored as V * Delta * U relative to the base metric `source`:
/// V is special orthogonal, Delta is diagonal positive, U is an isometry of
/// the source metric, and `target` = shift(source, baseShift) is the metric
/// reached by the dilatation.
struct IsometryFactorization {
    Mat4 V;
    Mat4 Delta;
    Mat4 U;
    DiagonalMetric source;
    DiagonalMetric target;
    BaseShift baseShift;
};

/// Generators recovering the three factors as matrix exponentials.
struct ExponentialParts {
    Mat4 v_gen;
    std::array<double, 4> delta_gen{};
    Mat4 u_gen;
};

/// Factors an invertible T in the identity component. The diagonalization of
/// T * diag(d) * T^T is canonicalized: eigenvalues descending (the positive
/// one lands in slot 0), each eigenvector's largest-magnitude entry made
/// positive, det V forced to +1 by flipping column 3 if needed.
IsometryFactorization factorize(const Mat4& t, const DiagonalMetric& d);

/// Principal logarithms of the three factors.
ExponentialParts exponential_parts(const IsometryFactorization& f);

/// max |V*Delta*U - T| over entries, for residual reports.
double reconstruction_residual(const IsometryFactorization& f, const Mat4& t);

/// max |U*diag(d)*U^T - diag(d)| over entries.
double right_isometry_residual(const IsometryFactorization& f);

} // namespace spinfiber
