#pragma once

#include <string>
#include <vector>

namespace spinfiber::checks {

/// One named residual compared against its tolerance. Order-of-convergence
/// requirements are encoded as residual = required_order - observed_order
/// with tolerance 0, so the uniform pass rule below covers them too.
struct ResidualEntry {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;

    bool pass() const { return value <= tolerance; }
};

struct CheckResult {
    std::string name;
    std::vector<ResidualEntry> residuals;
    double wall_ms = 0.0;

    bool pass() const {
        for (const auto& r : residuals)
            if (!r.pass()) return false;
        return true;
    }
};

/// Anticommutator closure of the deformed gamma matrices over an ensemble of
/// random base metrics, plus its runtime budget.
CheckResult check_clifford_closure();

/// Isometry-dilatation-isometry factorization of random near-identity frame
/// transformations: reconstruction, right-isometry residual, orientation of
/// the left factor, and the base-shift bookkeeping.
CheckResult check_factorization();

/// Spinor lifts: intertwining with the vector representation, the double
/// cover at a full turn, local multiplicativity, and norm-density invariance.
CheckResult check_spin_lift();

/// Spin connection of the cosmological tetrad against its closed form, with
/// observed convergence order, and the covariant derivative of a plane wave.
CheckResult check_spin_connection();

/// Flow exponentiation of a linear vector field against the closed-form
/// matrix exponential, and the Lie derivative of the cosmological tetrad
/// along the time direction.
CheckResult check_lie_machinery();

/// Fiber transport: a pure dilatation acts as an exact sample permutation,
/// total norm is conserved for aligned shifts and isometric steps, and the
/// three-step composition matches the combined transport bit for bit.
CheckResult check_fiber_transport();

/// The expanding-universe worked example: transport additivity across two
/// legs, the first-order transport operator against analytic derivatives,
/// and the motion generator against the spin-connection block.
CheckResult check_frw_transport();

/// Aggregation over the base: exact linearity on dyadic fixtures and exact
/// quadrature for single-support and uniform fields.
CheckResult check_aggregation();

/// All checks above, in a fixed order.
std::vector<CheckResult> run_all_checks();

} // namespace spinfiber::checks
