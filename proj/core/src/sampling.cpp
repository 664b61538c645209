#include "spinfiber/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace spinfiber::sample {

DiagonalMetric random_metric(Rng& rng, double lo, double hi) {
    DiagonalMetric d;
    for (std::size_t k = 0; k < 4; ++k) d.log_abs[k] = rng.uniform(lo, hi);
    return d;
}

Mat4 random_near_identity(Rng& rng, double amplitude) {
    Mat4 m = Mat4::identity();
    for (auto& x : m.a) x += rng.uniform(-amplitude, amplitude);
    return m;
}

Mat4 random_isometry_generator(Rng& rng, const DiagonalMetric& d) {
    // lambda = omega * diag(d)^{-1} with omega antisymmetric satisfies
    // lambda*diag(d) + diag(d)*lambda^T = omega - omega = 0.
    Mat4 omega;
    for (int r = 0; r < 4; ++r)
        for (int c = r + 1; c < 4; ++c) {
            const double w = rng.uniform(-1.0, 1.0);
            omega(r, c) = w;
            omega(c, r) = -w;
        }
    Mat4 lambda;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) lambda(r, c) = omega(r, c) / d.entry(c);
    const double scale = lambda.max_abs();
    if (scale > 1.0) lambda = (1.0 / scale) * lambda;
    return lambda;
}

Spinor random_spinor(Rng& rng) {
    Spinor s;
    for (int i = 0; i < 4; ++i) s[i] = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return s;
}

} // namespace spinfiber::sample
