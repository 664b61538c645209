#include "spinfiber/base_metric.hpp"

#include <cmath>

#include "spinfiber/errors.hpp"

namespace spinfiber {

DiagonalMetric metric_from_entries(double d0, double d1, double d2, double d3) {
    const std::array<double, 4> raw = {d0, d1, d2, d3};
    DiagonalMetric m;
    for (std::size_t k = 0; k < 4; ++k) {
        if (!std::isfinite(raw[k]) || raw[k] == 0.0)
            throw DegenerateMetricError("diagonal metric entry is zero or not finite");
        m.signs[k] = raw[k] > 0.0 ? +1 : -1;
        m.log_abs[k] = std::log(std::abs(raw[k]));
    }
    return m;
}

DiagonalMetric minkowski() { return DiagonalMetric{}; }

DiagonalMetric shift(const DiagonalMetric& d, const BaseShift& delta) {
    DiagonalMetric r = d;
    for (std::size_t k = 0; k < 4; ++k) r.log_abs[k] += delta.delta[k];
    return r;
}

Mat4 congruence(const DiagonalMetric& d, const Mat4& t) {
    const double scale = t.max_abs();
    const double floor = tol::singularity * scale * scale * scale * scale;
    if (std::abs(determinant(t)) <= floor)
        throw SingularTransformError("congruence requires an invertible transformation");
    return t * d.matrix() * t.transposed();
}

} // namespace spinfiber
