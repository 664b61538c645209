#include "spinfiber/fiber.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>

#include "spinfiber/parallel.hpp"
#include "spinfiber/spinlift.hpp"

namespace spinfiber {

namespace {

void validate_axes(const std::array<std::vector<double>, 4>& axes) {
    for (const auto& ax : axes) {
        if (ax.empty()) throw PreconditionError("base axis has no samples");
        if (ax.size() == 1) continue;
        const double h = ax[1] - ax[0];
        if (!(h > 0.0)) throw PreconditionError("base axis is not strictly increasing");
        for (std::size_t i = 1; i + 1 < ax.size(); ++i)
            if (std::abs(ax[i + 1] - ax[i] - h) > tol::grid_uniformity * std::max(std::abs(h), 1.0))
                throw PreconditionError("base axis spacing is not uniform");
    }
}

/// Nearest lattice index along one axis, or nullopt when off the lattice end.
/// Throws AlignmentError when the value does not sit on the lattice at all.
std::optional<int> locate_on_axis(const std::vector<double>& ax, double value, double snap_tol,
                                  const char* what) {
    if (ax.size() == 1) {
        if (std::abs(value - ax[0]) <= snap_tol) return 0;
        throw AlignmentError(what);
    }
    const double h = ax[1] - ax[0];
    const double u = (value - ax[0]) / h;
    const auto r = static_cast<long>(std::lround(u));
    if (std::abs(value - (ax[0] + static_cast<double>(r) * h)) > snap_tol * std::max(std::abs(h), 1.0))
        throw AlignmentError(what);
    if (r < 0 || r >= static_cast<long>(ax.size())) return std::nullopt;
    return static_cast<int>(r);
}

/// Integer lattice offsets realizing a base shift; AlignmentError when the
/// shift is not a whole number of cells along every axis.
std::array<int, 4> lattice_offsets(const BaseGrid& base, const BaseShift& delta) {
    std::array<int, 4> k{};
    for (int a = 0; a < 4; ++a) {
        const double d = delta.delta[static_cast<std::size_t>(a)];
        const double s = base.spacing(a);
        if (s == 0.0) {
            if (std::abs(d) > tol::lattice_alignment)
                throw AlignmentError("base shift moves along a single-sample axis");
            k[static_cast<std::size_t>(a)] = 0;
            continue;
        }
        const auto r = static_cast<long>(std::lround(d / s));
        if (std::abs(d - static_cast<double>(r) * s) > tol::lattice_alignment * std::max(s, 1.0))
            throw AlignmentError("base shift is not lattice-aligned");
        k[static_cast<std::size_t>(a)] = static_cast<int>(r);
    }
    return k;
}

/// Per-spacetime-sample target linear index under the map, or nullopt for
/// targets off the grid. Verifies injectivity.
std::vector<std::optional<std::size_t>> spacetime_index_map(
    const ChartGrid& grid, const std::function<Vec4(const Vec4&)>& map) {
    std::vector<std::optional<std::size_t>> target(grid.total());
    std::vector<char> taken(grid.total(), 0);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const Vec4 y = map(grid.point(idx));
        std::array<int, 4> tidx{};
        bool inside = true;
        for (int a = 0; a < 4; ++a) {
            const auto r = locate_on_axis(grid.axes[static_cast<std::size_t>(a)], y[a],
                                          tol::lattice_alignment,
                                          "spacetime map does not land on the grid");
            if (!r) {
                inside = false;
                break;
            }
            tidx[static_cast<std::size_t>(a)] = *r;
        }
        const std::size_t src = grid.linear_index(idx);
        if (!inside) {
            target[src] = std::nullopt;
            return;
        }
        const std::size_t dst = grid.linear_index(tidx);
        if (taken[dst]) throw PreconditionError("spacetime map is not injective on the grid");
        taken[dst] = 1;
        target[src] = dst;
    });
    return target;
}

void ensure_on_base_grid(const BaseGrid& base, const DiagonalMetric& d, const char* what) {
    if (d.signs != base.signs) throw GridMismatchError(what);
    for (int a = 0; a < 4; ++a) {
        std::optional<int> r;
        try {
            r = locate_on_axis(base.log_abs_axes[static_cast<std::size_t>(a)],
                               d.log_abs[static_cast<std::size_t>(a)], tol::lattice_alignment, what);
        } catch (const AlignmentError&) {
            throw GridMismatchError(what);
        }
        if (!r) throw GridMismatchError(what);
    }
}

/// Spin lift of exp-of-lambda at every base point, in base-linear order.
std::vector<Mat4c> lift_table(const BaseGrid& base, const Mat4& lambda) {
    std::vector<Mat4c> table(base.total());
    for_each_base_index(base, [&](const std::array<int, 4>& idx) {
        table[base.linear_index(idx)] = mat_exp(spin_generator(lambda, base.metric_at(idx)));
    });
    return table;
}

/// Multiplies every fiber by its base point's table entry.
FiberSpinorField apply_lift_table(const FiberSpinorField& field, const std::vector<Mat4c>& table) {
    FiberSpinorField out = field;
    const std::size_t base_total = field.base.total();
    const std::size_t x_total = field.spacetime.total();
    par::parallel_for(x_total, [&](std::size_t begin, std::size_t end) {
        for (std::size_t xl = begin; xl < end; ++xl)
            for (std::size_t dl = 0; dl < base_total; ++dl) {
                Spinor& v = out.values[field.sample_index(xl, dl)];
                v = table[dl] * v;
            }
    });
    return out;
}

FiberSpinorField apply_isometry_lift(const FiberSpinorField& field, const Mat4& isometry) {
    const Mat4 lambda = mat_log(isometry);
    if (lambda.max_abs() == 0.0) return field; // exact identity lift at every base point
    return apply_lift_table(field, lift_table(field.base, lambda));
}

} // namespace

BaseGrid make_base_grid(std::array<std::vector<double>, 4> log_abs_axes,
                        std::array<int, 4> signs) {
    if (!(signs[0] == +1 && signs[1] == -1 && signs[2] == -1 && signs[3] == -1))
        throw SignatureError("base grid requires signature (+,-,-,-)");
    validate_axes(log_abs_axes);
    BaseGrid g;
    g.log_abs_axes = std::move(log_abs_axes);
    g.signs = signs;
    return g;
}

BaseGrid make_uniform_base_grid(const std::array<double, 4>& origin,
                                const std::array<double, 4>& step,
                                const std::array<int, 4>& count, std::array<int, 4> signs) {
    std::array<std::vector<double>, 4> axes;
    for (std::size_t a = 0; a < 4; ++a) {
        if (count[a] < 1) throw PreconditionError("axis sample count must be at least 1");
        if (count[a] > 1 && !(step[a] > 0.0))
            throw PreconditionError("axis step must be positive for multi-sample axes");
        axes[a].reserve(static_cast<std::size_t>(count[a]));
        for (int i = 0; i < count[a]; ++i)
            axes[a].push_back(origin[a] + static_cast<double>(i) * step[a]);
    }
    return make_base_grid(std::move(axes), signs);
}

FiberSpinorField make_fiber_field(const ChartGrid& spacetime, const BaseGrid& base) {
    FiberSpinorField f;
    f.spacetime = spacetime;
    f.base = base;
    f.values.assign(spacetime.total() * base.total(), Spinor{});
    return f;
}

FiberSpinorField step_right_isometry(const FiberSpinorField& field,
                                     const IsometryFactorization& f) {
    ensure_on_base_grid(field.base, f.source, "factorization source point is off the base grid");
    return apply_isometry_lift(field, f.U);
}

FiberSpinorField step_translate(const FiberSpinorField& field, const BaseShift& delta,
                                const std::function<Vec4(const Vec4&)>& map) {
    const std::array<int, 4> k = lattice_offsets(field.base, delta);
    const auto x_target = spacetime_index_map(field.spacetime, map);

    FiberSpinorField out = make_fiber_field(field.spacetime, field.base);
    for_each_index(field.spacetime, [&](const std::array<int, 4>& x_idx) {
        const std::size_t xl = field.spacetime.linear_index(x_idx);
        for_each_base_index(field.base, [&](const std::array<int, 4>& d_idx) {
            const Spinor& v = field.values[field.sample_index(xl, field.base.linear_index(d_idx))];
            if (v.max_abs() == 0.0) return;
            if (!x_target[xl])
                throw SupportEscapeError("nonzero sample pushed off the spacetime grid");
            std::array<int, 4> t_idx{};
            for (int a = 0; a < 4; ++a) {
                t_idx[static_cast<std::size_t>(a)] =
                    d_idx[static_cast<std::size_t>(a)] + k[static_cast<std::size_t>(a)];
                if (t_idx[static_cast<std::size_t>(a)] < 0 ||
                    t_idx[static_cast<std::size_t>(a)] >= field.base.extent(a))
                    throw SupportEscapeError("nonzero sample pushed off the base grid");
            }
            out.values[out.sample_index(*x_target[xl], field.base.linear_index(t_idx))] = v;
        });
    });
    return out;
}

FiberSpinorField step_left_isometry(const FiberSpinorField& field,
                                    const IsometryFactorization& f) {
    ensure_on_base_grid(field.base, f.target, "factorization target point is off the base grid");
    return apply_isometry_lift(field, f.V);
}

FiberSpinorField transport(const FiberSpinorField& field, const MotionSpec& motion,
                           const DiagonalMetric& d0) {
    const std::size_t x_total = field.spacetime.total();
    std::vector<Mat4> frames;
    frames.reserve(x_total);
    for_each_index(field.spacetime, [&](const std::array<int, 4>& idx) {
        frames.push_back(motion.frame(field.spacetime.point(idx)));
    });

    bool constant = true;
    for (const Mat4& t : frames)
        if (!(t.a == frames.front().a)) {
            constant = false;
            break;
        }

    if (constant) {
        const IsometryFactorization f = factorize(frames.front(), d0);
        return step_left_isometry(step_translate(step_right_isometry(field, f), f.baseShift, motion.map),
                                  f);
    }

    ensure_on_base_grid(field.base, d0, "anchor metric is off the base grid");
    std::vector<IsometryFactorization> fs;
    fs.reserve(x_total);
    for (const Mat4& t : frames) fs.push_back(factorize(t, d0));
    for (const auto& f : fs)
        for (int a = 0; a < 4; ++a)
            if (std::abs(f.baseShift.delta[static_cast<std::size_t>(a)] -
                         fs.front().baseShift.delta[static_cast<std::size_t>(a)]) >
                tol::lattice_alignment)
                throw AlignmentError("base shift varies across spacetime");

    // Right lifts live at the departure point x, left lifts at the arrival
    // point m(x); both act at each base point's own metric.
    FiberSpinorField stage = field;
    const std::size_t base_total = field.base.total();
    for (std::size_t xl = 0; xl < x_total; ++xl) {
        const Mat4 lambda = mat_log(fs[xl].U);
        if (lambda.max_abs() == 0.0) continue;
        const auto table = lift_table(field.base, lambda);
        for (std::size_t dl = 0; dl < base_total; ++dl) {
            Spinor& v = stage.values[stage.sample_index(xl, dl)];
            v = table[dl] * v;
        }
    }

    stage = step_translate(stage, fs.front().baseShift, motion.map);

    const auto x_target = spacetime_index_map(field.spacetime, motion.map);
    for (std::size_t xl = 0; xl < x_total; ++xl) {
        if (!x_target[xl]) continue; // nothing was moved there
        const Mat4 lambda = mat_log(fs[xl].V);
        if (lambda.max_abs() == 0.0) continue;
        const auto table = lift_table(field.base, lambda);
        for (std::size_t dl = 0; dl < base_total; ++dl) {
            Spinor& v = stage.values[stage.sample_index(*x_target[xl], dl)];
            v = table[dl] * v;
        }
    }
    return stage;
}

double total_norm(const FiberSpinorField& field) {
    const std::size_t base_total = field.base.total();
    std::vector<double> time_scale(base_total);
    for_each_base_index(field.base, [&](const std::array<int, 4>& idx) {
        time_scale[field.base.linear_index(idx)] = std::exp(0.5 * field.base.coordinate(0, idx[0]));
    });

    const double sum = par::map_reduce(
        field.values.size(), 0.0,
        [&](std::size_t begin, std::size_t end) {
            double acc = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const Spinor& v = field.values[i];
                const double quad = std::norm(v[0]) + std::norm(v[1]) - std::norm(v[2]) -
                                    std::norm(v[3]);
                acc += time_scale[i % base_total] * quad;
            }
            return acc;
        },
        [](double a, double b) { return a + b; });
    return sum * field.spacetime.cell_volume() * field.base.cell_volume();
}

GridField<Spinor> aggregate(const FiberSpinorField& field) {
    GridField<Spinor> out = make_field<Spinor>(field.spacetime);
    const std::size_t base_total = field.base.total();
    const double volume = field.base.cell_volume();
    par::parallel_for(field.spacetime.total(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t xl = begin; xl < end; ++xl) {
            Spinor acc;
            for (std::size_t dl = 0; dl < base_total; ++dl)
                acc = acc + field.values[field.sample_index(xl, dl)];
            out.values[xl] = volume * acc;
        }
    });
    return out;
}

namespace {

FiberSpinorField fiber_axis_derivative(const FiberSpinorField& field, int extent, double h,
                                       const std::function<std::size_t(std::size_t, int)>& sample,
                                       std::size_t lanes) {
    FiberSpinorField out = make_fiber_field(field.spacetime, field.base);
    if (extent == 1) return out;
    if (extent == 2)
        throw StencilError("second-order stencils need at least three samples along the axis");
    const double inv2h = 1.0 / (2.0 * h);
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        auto v = [&](int i) -> const Spinor& { return field.values[sample(lane, i)]; };
        for (int i = 0; i < extent; ++i) {
            Spinor d;
            if (i == 0)
                d = inv2h * (-3.0 * v(0) + 4.0 * v(1) - 1.0 * v(2));
            else if (i == extent - 1)
                d = inv2h * (3.0 * v(extent - 1) - 4.0 * v(extent - 2) + 1.0 * v(extent - 3));
            else
                d = inv2h * (v(i + 1) - v(i - 1));
            out.values[sample(lane, i)] = d;
        }
    }
    return out;
}

/// Enumerates samples as lane x position-along-axis for one grid's axis, with
/// the other grid held inside the lane index.
struct AxisLayout {
    std::size_t lanes;
    std::size_t stride;     // distance between consecutive axis positions
    std::size_t lane_block; // samples spanned by one full axis sweep
};

AxisLayout layout_for(const std::array<std::size_t, 4>& extents, int axis, std::size_t tail) {
    // extents are of one grid; tail = total size of the other grid's block
    // that multiplies to the right of it in the linearization.
    std::size_t below = 1;
    for (int a = axis + 1; a < 4; ++a) below *= extents[static_cast<std::size_t>(a)];
    below *= tail;
    std::size_t above = 1;
    for (int a = 0; a < axis; ++a) above *= extents[static_cast<std::size_t>(a)];
    AxisLayout l;
    l.stride = below;
    l.lane_block = below * extents[static_cast<std::size_t>(axis)];
    l.lanes = above * below;
    return l;
}

} // namespace

FiberSpinorField fiber_spacetime_derivative(const FiberSpinorField& field, int axis) {
    const std::array<std::size_t, 4> extents = {
        static_cast<std::size_t>(field.spacetime.extent(0)),
        static_cast<std::size_t>(field.spacetime.extent(1)),
        static_cast<std::size_t>(field.spacetime.extent(2)),
        static_cast<std::size_t>(field.spacetime.extent(3))};
    const AxisLayout l = layout_for(extents, axis, field.base.total());
    return fiber_axis_derivative(
        field, field.spacetime.extent(axis), field.spacetime.spacing(axis),
        [&, l](std::size_t lane, int i) {
            const std::size_t hi = lane / l.stride;
            const std::size_t lo = lane % l.stride;
            return hi * l.lane_block + static_cast<std::size_t>(i) * l.stride + lo;
        },
        l.lanes);
}

FiberSpinorField fiber_base_derivative(const FiberSpinorField& field, int axis) {
    const std::array<std::size_t, 4> extents = {
        static_cast<std::size_t>(field.base.extent(0)), static_cast<std::size_t>(field.base.extent(1)),
        static_cast<std::size_t>(field.base.extent(2)), static_cast<std::size_t>(field.base.extent(3))};
    // Base indices linearize to the right of the spacetime index, so lanes
    // include every spacetime sample.
    std::size_t below = 1;
    for (int a = axis + 1; a < 4; ++a) below *= extents[static_cast<std::size_t>(a)];
    std::size_t above = field.spacetime.total();
    for (int a = 0; a < axis; ++a) above *= extents[static_cast<std::size_t>(a)];
    const std::size_t stride = below;
    const std::size_t block = below * extents[static_cast<std::size_t>(axis)];
    return fiber_axis_derivative(
        field, field.base.extent(axis), field.base.spacing(axis),
        [=](std::size_t lane, int i) {
            const std::size_t hi = lane / stride;
            const std::size_t lo = lane % stride;
            return hi * block + static_cast<std::size_t>(i) * stride + lo;
        },
        above * below);
}

} // namespace spinfiber
