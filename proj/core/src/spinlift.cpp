#include "spinfiber/spinlift.hpp"

#include <cmath>

#include "spinfiber/errors.hpp"

namespace spinfiber {

double generator_residual(const Mat4& lambda, const DiagonalMetric& d) {
    const Mat4 dm = d.matrix();
    return (lambda * dm + dm * lambda.transposed()).max_abs();
}

IsometryGenerator::IsometryGenerator(const Mat4& lambda, const DiagonalMetric& d,
                                     double tolerance)
    : matrix(lambda), metric(d) {
    const double scale = std::max(1.0, lambda.max_abs() * d.matrix().max_abs());
    if (generator_residual(lambda, d) > tolerance * scale)
        throw NotAnIsometryGeneratorError("matrix does not generate isometries of the metric");
}

Mat4c spin_generator(const Mat4& lambda, const DiagonalMetric& d) {
    const GammaRep rep = deformed_gammas(d);
    const cplx factor(0.0, -0.25);
    Mat4c acc;
    for (int k = 0; k < 4; ++k) {
        const double dk = d.entry(k);
        for (int m = 0; m < 4; ++m) {
            if (m == k) continue; // sigma(k,k) vanishes
            const double coeff = lambda(k, m) / dk; // first index lowered with 1/d_k
            if (coeff == 0.0) continue;
            acc = acc + (factor * coeff) * sigma(rep, k, m);
        }
    }
    return acc;
}

Mat4c lift_generator(const IsometryGenerator& g) {
    return spin_generator(g.matrix, g.metric);
}

SpinLift lift_isometry(const Mat4& l, const DiagonalMetric& d) {
    const Mat4 dm = d.matrix();
    const double residual = (l * dm * l.transposed() - dm).max_abs();
    if (residual > tol::isometry_check * std::max(1.0, dm.max_abs()))
        throw NotAnIsometryError("transformation does not preserve the metric");
    const Mat4 lambda = mat_log(l);
    const IsometryGenerator gen(lambda, d);
    return SpinLift{mat_exp(lift_generator(gen)), d};
}

Mat4c lift_frame_transform(const Mat4& a, const DiagonalMetric& d) {
    return mat_exp(spin_generator(mat_log(a), d));
}

double intertwining_residual(const Mat4c& s, const Mat4& l, const GammaRep& rep) {
    const Mat4c sinv = inverse(s);
    const Mat4 linv = inverse(l);
    double worst = 0.0;
    for (int m = 0; m < 4; ++m) {
        Mat4c expected;
        for (int n = 0; n < 4; ++n) {
            const double w = linv(m, n);
            if (w != 0.0) expected = expected + w * rep.gammas[static_cast<std::size_t>(n)];
        }
        const Mat4c got = s * rep.gammas[static_cast<std::size_t>(m)] * sinv;
        worst = std::max(worst, (got - expected).max_abs());
    }
    return worst;
}

} // namespace spinfiber
