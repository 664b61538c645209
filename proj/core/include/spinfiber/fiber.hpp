#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/decompose.hpp"
#include "spinfiber/geometry.hpp"

namespace spinfiber {

/// Uniform lattice over the base of diagonal metrics, sampled in the log
/// chart with a fixed sign pattern. Uniform spacing keeps lattice-aligned
/// translations exact permutations of the samples.
struct BaseGrid {
    std::array<std::vector<double>, 4> log_abs_axes;
    std::array<int, 4> signs = {+1, -1, -1, -1};

    int extent(int axis) const {
        return static_cast<int>(log_abs_axes[static_cast<std::size_t>(axis)].size());
    }
    double coordinate(int axis, int i) const {
        return log_abs_axes[static_cast<std::size_t>(axis)][static_cast<std::size_t>(i)];
    }
    double spacing(int axis) const {
        const auto& ax = log_abs_axes[static_cast<std::size_t>(axis)];
        return ax.size() > 1 ? ax[1] - ax[0] : 0.0;
    }
    double cell_weight(int axis) const {
        const double s = spacing(axis);
        return s > 0.0 ? s : 1.0;
    }
    double cell_volume() const {
        return cell_weight(0) * cell_weight(1) * cell_weight(2) * cell_weight(3);
    }
    std::size_t total() const {
        std::size_t n = 1;
        for (const auto& ax : log_abs_axes) n *= ax.size();
        return n;
    }
    std::size_t linear_index(const std::array<int, 4>& idx) const {
        std::size_t n = 0;
        for (int a = 0; a < 4; ++a)
            n = n * log_abs_axes[static_cast<std::size_t>(a)].size() +
                static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        return n;
    }
    DiagonalMetric metric_at(const std::array<int, 4>& idx) const {
        DiagonalMetric d;
        d.signs = signs;
        for (int a = 0; a < 4; ++a)
            d.log_abs[static_cast<std::size_t>(a)] = coordinate(a, idx[static_cast<std::size_t>(a)]);
        return d;
    }
    bool same_layout(const BaseGrid& other) const {
        return signs == other.signs && log_abs_axes == other.log_abs_axes;
    }
};

/// Validates monotone uniform axes; throws PreconditionError.
BaseGrid make_base_grid(std::array<std::vector<double>, 4> log_abs_axes,
                        std::array<int, 4> signs = {+1, -1, -1, -1});

BaseGrid make_uniform_base_grid(const std::array<double, 4>& origin,
                                const std::array<double, 4>& step,
                                const std::array<int, 4>& count,
                                std::array<int, 4> signs = {+1, -1, -1, -1});

/// Visits every base multi-index in axis-major order.
template <class F>
void for_each_base_index(const BaseGrid& grid, F&& f) {
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < grid.extent(0); ++idx[0])
        for (idx[1] = 0; idx[1] < grid.extent(1); ++idx[1])
            for (idx[2] = 0; idx[2] < grid.extent(2); ++idx[2])
                for (idx[3] = 0; idx[3] < grid.extent(3); ++idx[3]) f(idx);
}

/// Spinor samples over spacetime x base. Storage is spacetime-major:
/// linear = x_linear * base.total() + d_linear.
struct FiberSpinorField {
    ChartGrid spacetime;
    BaseGrid base;
    std::vector<Spinor> values;

    std::size_t sample_index(std::size_t x_linear, std::size_t d_linear) const {
        return x_linear * base.total() + d_linear;
    }
    Spinor& at(const std::array<int, 4>& x_idx, const std::array<int, 4>& d_idx) {
        return values[sample_index(spacetime.linear_index(x_idx), base.linear_index(d_idx))];
    }
    const Spinor& at(const std::array<int, 4>& x_idx, const std::array<int, 4>& d_idx) const {
        return values[sample_index(spacetime.linear_index(x_idx), base.linear_index(d_idx))];
    }
    bool same_layout(const FiberSpinorField& other) const {
        return spacetime.same_layout(other.spacetime) && base.same_layout(other.base);
    }
};

FiberSpinorField make_fiber_field(const ChartGrid& spacetime, const BaseGrid& base);

/// A motion of spacetime together with the frame transformation it induces.
struct MotionSpec {
    std::function<Vec4(const Vec4&)> map;
    std::function<Mat4(const Vec4&)> frame;
};

/// Applies the spin lift of f.U, taken at each base point's own metric, to
/// every fiber.
FiberSpinorField step_right_isometry(const FiberSpinorField& field,
                                     const IsometryFactorization& f);

/// Pure relabeling psi'(m(x); d + delta) = psi(x; d). delta must be
/// lattice-aligned (AlignmentError otherwise); nonzero samples pushed off the
/// grid raise SupportEscapeError, uncovered cells become zero.
FiberSpinorField step_translate(const FiberSpinorField& field, const BaseShift& delta,
                                const std::function<Vec4(const Vec4&)>& map);

/// Applies the spin lift of f.V, taken at each base point's own metric, to
/// every fiber.
FiberSpinorField step_left_isometry(const FiberSpinorField& field,
                                    const IsometryFactorization& f);

/// Three-step transport: right isometry at the source, base translation, left
/// isometry at the target. The frame transformation is factored at d0 per
/// spacetime point; the induced base shift must be uniform across spacetime.
/// For motions with a constant frame this calls the three steps above
/// literally, so it agrees with the explicit composition bit for bit.
FiberSpinorField transport(const FiberSpinorField& field, const MotionSpec& motion,
                           const DiagonalMetric& d0);

/// Sum of norm densities times the log-chart cell volumes of both grids.
double total_norm(const FiberSpinorField& field);

/// Midpoint quadrature over the base per spacetime point.
GridField<Spinor> aggregate(const FiberSpinorField& field);

/// Second-order stencil derivative along a spacetime axis (0..3).
FiberSpinorField fiber_spacetime_derivative(const FiberSpinorField& field, int axis);

/// Second-order stencil derivative along a base axis (0..3), in the log chart.
FiberSpinorField fiber_base_derivative(const FiberSpinorField& field, int axis);

} // namespace spinfiber
