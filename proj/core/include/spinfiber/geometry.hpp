#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "spinfiber/clifford.hpp"
#include "spinfiber/errors.hpp"
#include "spinfiber/mat4.hpp"
#include "spinfiber/tolerances.hpp"

namespace spinfiber {

/// Uniform rectangular sampling of one coordinate chart. Axis 0 is time.
/// An axis may hold a single sample, in which case the chart carries no
/// variation along it and derivatives in that direction are zero.
struct ChartGrid {
    std::array<std::vector<double>, 4> axes;

    int extent(int axis) const {
        return static_cast<int>(axes[static_cast<std::size_t>(axis)].size());
    }
    double coordinate(int axis, int i) const {
        return axes[static_cast<std::size_t>(axis)][static_cast<std::size_t>(i)];
    }
    /// Sample spacing; zero for single-sample axes.
    double spacing(int axis) const {
        const auto& ax = axes[static_cast<std::size_t>(axis)];
        return ax.size() > 1 ? ax[1] - ax[0] : 0.0;
    }
    /// Quadrature weight per cell: the spacing, or 1 for single-sample axes.
    double cell_weight(int axis) const {
        const double h = spacing(axis);
        return h > 0.0 ? h : 1.0;
    }
    double cell_volume() const {
        return cell_weight(0) * cell_weight(1) * cell_weight(2) * cell_weight(3);
    }
    std::size_t total() const {
        std::size_t n = 1;
        for (const auto& ax : axes) n *= ax.size();
        return n;
    }
    /// Axis-major linearization: axis 0 varies slowest.
    std::size_t linear_index(const std::array<int, 4>& idx) const {
        std::size_t n = 0;
        for (int a = 0; a < 4; ++a)
            n = n * axes[static_cast<std::size_t>(a)].size() + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        return n;
    }
    Vec4 point(const std::array<int, 4>& idx) const {
        Vec4 x;
        for (int a = 0; a < 4; ++a) x[a] = coordinate(a, idx[static_cast<std::size_t>(a)]);
        return x;
    }
    bool same_layout(const ChartGrid& other) const { return axes == other.axes; }
};

/// Validates monotonicity and uniform spacing; throws PreconditionError.
ChartGrid make_chart_grid(std::array<std::vector<double>, 4> axes);

/// count[a] samples starting at origin[a] with step[a] (step ignored when
/// count[a] == 1).
ChartGrid make_uniform_grid(const std::array<double, 4>& origin,
                            const std::array<double, 4>& step,
                            const std::array<int, 4>& count);

template <class T>
struct GridField {
    ChartGrid grid;
    std::vector<T> values;

    T& at(const std::array<int, 4>& idx) { return values[grid.linear_index(idx)]; }
    const T& at(const std::array<int, 4>& idx) const { return values[grid.linear_index(idx)]; }
};

template <class T>
GridField<T> make_field(const ChartGrid& grid) {
    return GridField<T>{grid, std::vector<T>(grid.total())};
}

/// Visits every multi-index of the grid in axis-major order.
template <class F>
void for_each_index(const ChartGrid& grid, F&& f) {
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < grid.extent(0); ++idx[0])
        for (idx[1] = 0; idx[1] < grid.extent(1); ++idx[1])
            for (idx[2] = 0; idx[2] < grid.extent(2); ++idx[2])
                for (idx[3] = 0; idx[3] < grid.extent(3); ++idx[3]) f(idx);
}

/// Frame covectors per point: row k = frame index, column mu = coordinate.
using TetradField = GridField<Mat4>;
/// Inverse coordinate metric g^{mu nu} per point.
using CoordinateMetricField = GridField<Mat4>;
using SpinorField = GridField<Spinor>;

/// Connection coefficients at one point: component(nu)(k, m) = omega^k_{m nu}.
struct Connection4 {
    std::array<Mat4, 4> along{};
    Mat4& operator[](int nu) { return along[static_cast<std::size_t>(nu)]; }
    const Mat4& operator[](int nu) const { return along[static_cast<std::size_t>(nu)]; }
};
using SpinConnectionField = GridField<Connection4>;

/// Flow direction, analytic. `jacobian` (rows = component, columns =
/// direction of differentiation) is optional; finite differences fill in.
struct VectorField {
    std::function<Vec4(const Vec4&)> value;
    std::function<Mat4(const Vec4&)> jacobian;

    Mat4 jacobian_at(const Vec4& x) const;
};

struct OrthonormalityReport {
    GridField<double> residual;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::vector<std::size_t> flagged; // linear indices exceeding the tolerance
};

namespace detail {
void stencil_gate(const ChartGrid& grid, int axis);
}

/// d/dx^axis by 2nd-order stencils: central in the interior, one-sided at the
/// two boundary samples. Single-sample axes differentiate to zero; two-sample
/// axes throw StencilError.
template <class T>
GridField<T> axis_derivative(const GridField<T>& f, int axis) {
    GridField<T> out = make_field<T>(f.grid);
    const int n = f.grid.extent(axis);
    if (n == 1) return out;
    detail::stencil_gate(f.grid, axis);
    const double inv2h = 1.0 / (2.0 * f.grid.spacing(axis));
    for_each_index(f.grid, [&](const std::array<int, 4>& idx) {
        const int i = idx[static_cast<std::size_t>(axis)];
        auto at_offset = [&](int j) -> const T& {
            std::array<int, 4> p = idx;
            p[static_cast<std::size_t>(axis)] = j;
            return f.at(p);
        };
        T d;
        if (i == 0)
            d = inv2h * (-3.0 * at_offset(0) + 4.0 * at_offset(1) - 1.0 * at_offset(2));
        else if (i == n - 1)
            d = inv2h * (3.0 * at_offset(n - 1) - 4.0 * at_offset(n - 2) + 1.0 * at_offset(n - 3));
        else
            d = inv2h * (at_offset(i + 1) - at_offset(i - 1));
        out.at(idx) = d;
    });
    return out;
}

/// Per-point max |e^k_mu e^m_nu g^{mu nu} - eta^{km}|.
OrthonormalityReport check_orthonormality(const TetradField& e, const CoordinateMetricField& g,
                                          double tolerance = tol::orthonormality);

/// omega^k_{m nu} = (d_nu e^k_mu) E^mu_m with E the per-point inverse frame.
/// Throws SingularFrameError when a frame matrix is not invertible.
SpinConnectionField spin_connection(const TetradField& e);

/// Covariant derivative of a spinor field against a flat-metric gamma
/// representation: (d_mu + (i/4) omega^k_{m mu} eta_{kk} sigma^{km}) psi.
GridField<std::array<Spinor, 4>> covariant_derivative(const SpinorField& psi,
                                                      const SpinConnectionField& omega,
                                                      const GammaRep& rep);

/// Lie derivative of the tetrad along zeta:
/// (L_zeta e)^k_mu = zeta^nu d_nu e^k_mu + e^k_nu d_mu zeta^nu.
TetradField lie_derivative_tetrad(const TetradField& e, const GridField<Vec4>& zeta);
TetradField lie_derivative_tetrad(const TetradField& e, const VectorField& zeta);

struct FlowResult {
    Vec4 endpoint;
    Mat4 frame_map;
};

/// Integrates dx/ds = zeta(x), dA/ds = J(x(s)) A with J the Jacobian of
/// zeta, from A(0) = I, by the classical 4th-order method with fixed step.
/// Throws FlowEscapeError when the trajectory leaves the chart box.
FlowResult flow_exponentiate(const VectorField& zeta, const ChartGrid& chart, const Vec4& x0,
                             double tau);

/// Same trajectory, but the transported matrix obeys dA/ds = G(x(s)) A for a
/// caller-supplied frame generator G (for example (L_zeta e) e^{-1}).
FlowResult flow_exponentiate_frame(const VectorField& zeta,
                                   const std::function<Mat4(const Vec4&)>& frame_generator,
                                   const ChartGrid& chart, const Vec4& x0, double tau);

} // namespace spinfiber
