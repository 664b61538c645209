#pragma once

#include <cstdint>
#include <random>

#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/mat4.hpp"

namespace spinfiber::sample {

/// Seeded generator with a platform-independent uniform mapping (the
/// distribution classes of the standard library are not portable across
/// implementations).
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Lorentz-signature metric with log magnitudes uniform in [lo, hi].
DiagonalMetric random_metric(Rng& rng, double lo = -3.0, double hi = 3.0);

/// I plus independent uniform [-amplitude, amplitude] entries.
Mat4 random_near_identity(Rng& rng, double amplitude = 0.1);

/// Isometry generator of d built from a random antisymmetric raised form,
/// rescaled so the largest entry magnitude is at most 1.
Mat4 random_isometry_generator(Rng& rng, const DiagonalMetric& d);

/// Components uniform in the unit square of the complex plane.
Spinor random_spinor(Rng& rng);

} // namespace spinfiber::sample
