#include "spinfiber/geometry.hpp"

#include <cmath>

namespace spinfiber {

namespace detail {

void stencil_gate(const ChartGrid& grid, int axis) {
    if (grid.extent(axis) < 3)
        throw StencilError("second-order stencils need at least three samples along the axis");
}

} // namespace detail

ChartGrid make_chart_grid(std::array<std::vector<double>, 4> axes) {
    for (const auto& ax : axes) {
        if (ax.empty()) throw PreconditionError("chart axis has no samples");
        if (ax.size() == 1) continue;
        const double h = ax[1] - ax[0];
        if (!(h > 0.0)) throw PreconditionError("chart axis is not strictly increasing");
        for (std::size_t i = 1; i + 1 < ax.size(); ++i) {
            const double step = ax[i + 1] - ax[i];
            if (std::abs(step - h) > tol::grid_uniformity * std::max(std::abs(h), 1.0))
                throw PreconditionError("chart axis spacing is not uniform");
        }
    }
    ChartGrid g;
    g.axes = std::move(axes);
    return g;
}

ChartGrid make_uniform_grid(const std::array<double, 4>& origin, const std::array<double, 4>& step,
                            const std::array<int, 4>& count) {
    std::array<std::vector<double>, 4> axes;
    for (std::size_t a = 0; a < 4; ++a) {
        if (count[a] < 1) throw PreconditionError("axis sample count must be at least 1");
        if (count[a] > 1 && !(step[a] > 0.0))
            throw PreconditionError("axis step must be positive for multi-sample axes");
        axes[a].reserve(static_cast<std::size_t>(count[a]));
        for (int i = 0; i < count[a]; ++i)
            axes[a].push_back(origin[a] + static_cast<double>(i) * step[a]);
    }
    return make_chart_grid(std::move(axes));
}

Mat4 VectorField::jacobian_at(const Vec4& x) const {
    if (jacobian) return jacobian(x);
    // Central differences with the cube-root-of-epsilon step.
    constexpr double base_h = 6.055454452393343e-06;
    Mat4 j;
    for (int a = 0; a < 4; ++a) {
        const double h = base_h * std::max(1.0, std::abs(x[a]));
        Vec4 xp = x;
        Vec4 xm = x;
        xp[a] += h;
        xm[a] -= h;
        const Vec4 delta = value(xp) - value(xm);
        for (int comp = 0; comp < 4; ++comp) j(comp, a) = delta[comp] / (2.0 * h);
    }
    return j;
}

OrthonormalityReport check_orthonormality(const TetradField& e, const CoordinateMetricField& g,
                                          double tolerance) {
    if (!e.grid.same_layout(g.grid))
        throw GridMismatchError("tetrad and metric fields live on different grids");
    OrthonormalityReport report;
    report.residual = make_field<double>(e.grid);
    report.tolerance = tolerance;
    const Mat4 eta = minkowski().matrix();
    for_each_index(e.grid, [&](const std::array<int, 4>& idx) {
        const Mat4& frame = e.at(idx);
        const Mat4 r = frame * g.at(idx) * frame.transposed() - eta;
        const double res = r.max_abs();
        report.residual.at(idx) = res;
        report.max_residual = std::max(report.max_residual, res);
        if (res > tolerance) report.flagged.push_back(e.grid.linear_index(idx));
    });
    return report;
}

SpinConnectionField spin_connection(const TetradField& e) {
    std::array<TetradField, 4> de;
    for (int nu = 0; nu < 4; ++nu) de[static_cast<std::size_t>(nu)] = axis_derivative(e, nu);

    SpinConnectionField omega = make_field<Connection4>(e.grid);
    for_each_index(e.grid, [&](const std::array<int, 4>& idx) {
        Mat4 inv_frame;
        try {
            inv_frame = inverse(e.at(idx));
        } catch (const SingularTransformError&) {
            throw SingularFrameError("tetrad matrix is singular at a grid point");
        }
        Connection4& c = omega.at(idx);
        for (int nu = 0; nu < 4; ++nu)
            c[nu] = de[static_cast<std::size_t>(nu)].at(idx) * inv_frame;
    });
    return omega;
}

GridField<std::array<Spinor, 4>> covariant_derivative(const SpinorField& psi,
                                                      const SpinConnectionField& omega,
                                                      const GammaRep& rep) {
    if (!psi.grid.same_layout(omega.grid))
        throw GridMismatchError("spinor and connection fields live on different grids");
    if (!rep.metric.lorentz_signature())
        throw PreconditionError("covariant derivative requires the flat-metric representation");
    for (double l : rep.metric.log_abs)
        if (l != 0.0)
            throw PreconditionError("covariant derivative requires the flat-metric representation");

    std::array<SpinorField, 4> dpsi;
    for (int mu = 0; mu < 4; ++mu) dpsi[static_cast<std::size_t>(mu)] = axis_derivative(psi, mu);

    // sigma^{km} at the flat metric, fixed once.
    std::array<std::array<Mat4c, 4>, 4> sig;
    for (int k = 0; k < 4; ++k)
        for (int m = 0; m < 4; ++m) sig[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = sigma(rep, k, m);
    const std::array<double, 4> eta_low = {1.0, -1.0, -1.0, -1.0};
    const cplx quarter_i(0.0, 0.25);

    GridField<std::array<Spinor, 4>> out = make_field<std::array<Spinor, 4>>(psi.grid);
    for_each_index(psi.grid, [&](const std::array<int, 4>& idx) {
        const Connection4& c = omega.at(idx);
        const Spinor& value = psi.at(idx);
        std::array<Spinor, 4>& slot = out.at(idx);
        for (int mu = 0; mu < 4; ++mu) {
            Mat4c gamma_term;
            for (int k = 0; k < 4; ++k)
                for (int m = 0; m < 4; ++m) {
                    if (k == m) continue;
                    const double w = c[mu](k, m) * eta_low[static_cast<std::size_t>(k)];
                    if (w == 0.0) continue;
                    gamma_term = gamma_term +
                                 (quarter_i * w) * sig[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
                }
            slot[static_cast<std::size_t>(mu)] =
                dpsi[static_cast<std::size_t>(mu)].at(idx) + gamma_term * value;
        }
    });
    return out;
}

namespace {

TetradField lie_derivative_impl(const TetradField& e,
                                const std::function<Vec4(const std::array<int, 4>&)>& zeta_at,
                                const std::function<Mat4(const std::array<int, 4>&)>& jacobian_at) {
    std::array<TetradField, 4> de;
    for (int nu = 0; nu < 4; ++nu) de[static_cast<std::size_t>(nu)] = axis_derivative(e, nu);

    TetradField out = make_field<Mat4>(e.grid);
    for_each_index(e.grid, [&](const std::array<int, 4>& idx) {
        const Vec4 z = zeta_at(idx);
        Mat4 acc;
        for (int nu = 0; nu < 4; ++nu) {
            if (z[nu] == 0.0) continue;
            acc = acc + z[nu] * de[static_cast<std::size_t>(nu)].at(idx);
        }
        out.at(idx) = acc + e.at(idx) * jacobian_at(idx);
    });
    return out;
}

} // namespace

TetradField lie_derivative_tetrad(const TetradField& e, const GridField<Vec4>& zeta) {
    if (!e.grid.same_layout(zeta.grid))
        throw GridMismatchError("tetrad and flow fields live on different grids");
    std::array<GridField<Vec4>, 4> dz;
    for (int mu = 0; mu < 4; ++mu) dz[static_cast<std::size_t>(mu)] = axis_derivative(zeta, mu);
    return lie_derivative_impl(
        e, [&](const std::array<int, 4>& idx) { return zeta.at(idx); },
        [&](const std::array<int, 4>& idx) {
            Mat4 j;
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) j(nu, mu) = dz[static_cast<std::size_t>(mu)].at(idx)[nu];
            return j;
        });
}

TetradField lie_derivative_tetrad(const TetradField& e, const VectorField& zeta) {
    return lie_derivative_impl(
        e, [&](const std::array<int, 4>& idx) { return zeta.value(e.grid.point(idx)); },
        [&](const std::array<int, 4>& idx) { return zeta.jacobian_at(e.grid.point(idx)); });
}

namespace {

void check_inside(const ChartGrid& chart, const Vec4& x) {
    for (int a = 0; a < 4; ++a) {
        const auto& ax = chart.axes[static_cast<std::size_t>(a)];
        const double lo = ax.front();
        const double hi = ax.back();
        const double margin = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
        if (x[a] < lo - margin || x[a] > hi + margin)
            throw FlowEscapeError("flow left the chart box");
    }
}

FlowResult integrate_flow(const VectorField& zeta,
                          const std::function<Mat4(const Vec4&)>& generator,
                          const ChartGrid& chart, const Vec4& x0, double tau) {
    check_inside(chart, x0);
    const int steps = 100 * std::max(1, static_cast<int>(std::ceil(std::abs(tau))));
    const double h = tau / static_cast<double>(steps);

    Vec4 x = x0;
    Mat4 a = Mat4::identity();
    for (int s = 0; s < steps; ++s) {
        const Vec4 k1x = zeta.value(x);
        const Mat4 k1a = generator(x) * a;

        const Vec4 x2 = x + (h / 2.0) * k1x;
        const Vec4 k2x = zeta.value(x2);
        const Mat4 k2a = generator(x2) * (a + (h / 2.0) * k1a);

        const Vec4 x3 = x + (h / 2.0) * k2x;
        const Vec4 k3x = zeta.value(x3);
        const Mat4 k3a = generator(x3) * (a + (h / 2.0) * k2a);

        const Vec4 x4 = x + h * k3x;
        const Vec4 k4x = zeta.value(x4);
        const Mat4 k4a = generator(x4) * (a + h * k3a);

        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        a = a + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        check_inside(chart, x);
    }
    return FlowResult{x, a};
}

} // namespace

FlowResult flow_exponentiate(const VectorField& zeta, const ChartGrid& chart, const Vec4& x0,
                             double tau) {
    return integrate_flow(
        zeta, [&](const Vec4& x) { return zeta.jacobian_at(x); }, chart, x0, tau);
}

FlowResult flow_exponentiate_frame(const VectorField& zeta,
                                   const std::function<Mat4(const Vec4&)>& frame_generator,
                                   const ChartGrid& chart, const Vec4& x0, double tau) {
    return integrate_flow(zeta, frame_generator, chart, x0, tau);
}

} // namespace spinfiber
