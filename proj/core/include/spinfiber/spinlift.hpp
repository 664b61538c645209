#pragma once

#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/mat4.hpp"
#include "spinfiber/tolerances.hpp"

namespace spinfiber {

/// A matrix lambda with lambda*diag(d) + diag(d)*lambda^T = 0, i.e. the
/// velocity of a one-parameter isometry family of d. The constructor checks
/// the identity and throws NotAnIsometryGeneratorError on violation.
struct IsometryGenerator {
    Mat4 matrix;
    DiagonalMetric metric;

    IsometryGenerator(const Mat4& lambda, const DiagonalMetric& d,
                      double tolerance = tol::generator_identity);
};

/// Spinor-space image of an isometry, carrying the base point it acts at.
struct SpinLift {
    Mat4c matrix;
    DiagonalMetric metric;
};

/// max |lambda*diag(d) + diag(d)*lambda^T| over entries.
double generator_residual(const Mat4& lambda, const DiagonalMetric& d);

/// Contraction of a frame generator with the sigma matrices of the metric,
/// without the isometry-generator check. The sign is fixed so that for
/// isometry generators the commutator with gamma^m reproduces -lambda^m_n
/// gamma^n; see lift_generator.
Mat4c spin_generator(const Mat4& lambda, const DiagonalMetric& d);

/// Spinor generator of a validated isometry generator:
/// [lift_generator(lambda), gamma^m(d)] = -lambda^m_n gamma^n(d).
Mat4c lift_generator(const IsometryGenerator& g);

/// Lift of a finite isometry L of d in the identity component:
/// S = exp(lift_generator(log L)), so that S gamma^m(d) S^{-1} =
/// (L^{-1})^m_n gamma^n(d). Throws NotAnIsometryError when L does not
/// preserve d, BranchCutError when L has no principal logarithm.
SpinLift lift_isometry(const Mat4& l, const DiagonalMetric& d);

/// Unchecked lift of an arbitrary frame transformation in the identity
/// component: exp(spin_generator(log A, d)). Agrees with lift_isometry on
/// isometries and preserves the norm density for any real generator, because
/// the spin generator anticommutes with gamma^0 under the adjoint.
Mat4c lift_frame_transform(const Mat4& a, const DiagonalMetric& d);

/// max over m of |S gamma^m S^{-1} - (L^{-1})^m_n gamma^n| entries.
double intertwining_residual(const Mat4c& s, const Mat4& l, const GammaRep& rep);

} // namespace spinfiber
