#include "checks.hpp"

#include <chrono>
#include <cmath>
#include <complex>

#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/decompose.hpp"
#include "spinfiber/fiber.hpp"
#include "spinfiber/frw.hpp"
#include "spinfiber/geometry.hpp"
#include "spinfiber/mat4.hpp"
#include "spinfiber/sampling.hpp"
#include "spinfiber/spinlift.hpp"

namespace spinfiber::checks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double order_between(double coarse, double fine) {
    return std::log2(coarse / fine);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Rotation generator in the (1,2) plane at the flat metric.
Mat4 flat_rotation_generator() {
    Mat4 lambda = Mat4::zero();
    lambda(1, 2) = 1.0;
    lambda(2, 1) = -1.0;
    return lambda;
}

Mat4 spatial_rotation(double angle) {
    Mat4 l = Mat4::identity();
    l(1, 1) = std::cos(angle);
    l(1, 2) = -std::sin(angle);
    l(2, 1) = std::sin(angle);
    l(2, 2) = std::cos(angle);
    return l;
}

double max_metric_entry(const DiagonalMetric& d) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s = std::max(s, std::abs(d.entry(k)));
    return s;
}

double spinor_diff(const Spinor& a, const Spinor& b) { return (a - b).max_abs(); }

double field_diff(const FiberSpinorField& a, const FiberSpinorField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, spinor_diff(a.values[i], b.values[i]));
    return worst;
}

} // namespace

CheckResult check_clifford_closure() {
    const auto start = Clock::now();
    sample::Rng rng(0x2026081601ULL);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const DiagonalMetric d = sample::random_metric(rng, -3.0, 3.0);
        const GammaRep rep = deformed_gammas(d);
        worst = std::max(worst, anticommutator_residual(rep) / max_metric_entry(d));
    }
    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "clifford-closure";
    r.residuals = {{"closure_rel", worst, 1e-12}, {"runtime_s", elapsed, 2.0}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

CheckResult check_factorization() {
    const auto start = Clock::now();
    sample::Rng rng(0x2026081602ULL);
    double worst_rec = 0.0;
    double worst_iso = 0.0;
    double worst_det = 0.0;
    double worst_shift = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const DiagonalMetric d = sample::random_metric(rng, -3.0, 3.0);
        const Mat4 t = sample::random_near_identity(rng, 0.1);
        const IsometryFactorization f = factorize(t, d);
        worst_rec = std::max(worst_rec, reconstruction_residual(f, t) / t.frobenius_norm());
        worst_iso = std::max(worst_iso, right_isometry_residual(f));
        worst_det = std::max(worst_det, std::abs(determinant(f.V) - 1.0));
        const DiagonalMetric moved = shift(f.source, f.baseShift);
        double sdiff = (moved.signs == f.target.signs) ? 0.0 : 1.0;
        for (int k = 0; k < 4; ++k)
            sdiff = std::max(sdiff, std::abs(moved.log_abs[static_cast<std::size_t>(k)] -
                                             f.target.log_abs[static_cast<std::size_t>(k)]));
        worst_shift = std::max(worst_shift, sdiff);
    }
    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "factorization";
    r.residuals = {{"reconstruction_rel", worst_rec, 1e-10},
                   {"right_isometry", worst_iso, 1e-10},
                   {"det_v", worst_det, 1e-12},
                   {"target_shift", worst_shift, 0.0},
                   {"runtime_s", elapsed, 5.0}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

CheckResult check_spin_lift() {
    const auto start = Clock::now();
    sample::Rng rng(0x2026081603ULL);

    double worst_intertwine = 0.0;
    double worst_density = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const DiagonalMetric d = sample::random_metric(rng, -3.0, 3.0);
        const Mat4 lambda = sample::random_isometry_generator(rng, d);
        const Mat4 l = mat_exp(lambda);
        const SpinLift s = lift_isometry(l, d);
        const GammaRep rep = deformed_gammas(d);
        worst_intertwine = std::max(worst_intertwine, intertwining_residual(s.matrix, l, rep));

        const Spinor psi = sample::random_spinor(rng);
        const double before = norm_density(rep, psi);
        const double after = norm_density(rep, s.matrix * psi);
        worst_density = std::max(worst_density, std::abs(after - before));
    }

    // Full turn in the (1,2) plane: the lifted one-parameter family returns
    // to minus the identity while the vector rotation returns to the identity.
    const Mat4c sigma_gen = spin_generator(flat_rotation_generator(), minkowski());
    const Mat4c full_turn = mat_exp(kTwoPi * sigma_gen);
    const double double_cover = (full_turn + Mat4c::identity()).max_abs();

    double worst_product = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const DiagonalMetric d = sample::random_metric(rng, -3.0, 3.0);
        const Mat4 l1 = mat_exp(0.5 * sample::random_isometry_generator(rng, d));
        const Mat4 l2 = mat_exp(0.5 * sample::random_isometry_generator(rng, d));
        const Mat4c lhs = lift_isometry(l1 * l2, d).matrix;
        const Mat4c rhs = lift_isometry(l1, d).matrix * lift_isometry(l2, d).matrix;
        worst_product = std::max(worst_product, (lhs - rhs).max_abs());
    }

    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "spin-lift";
    r.residuals = {{"intertwining", worst_intertwine, 1e-9},
                   {"double_cover", double_cover, 1e-10},
                   {"product_rule", worst_product, 1e-8},
                   {"norm_density", worst_density, 1e-10}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

namespace {

/// Max deviation of the cosmological spin connection from its closed form on
/// a time line with n samples of spacing h.
double frw_connection_error(const ScaleFactor& scale, double h, int n) {
    const ChartGrid grid = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {h, 1.0, 1.0, 1.0}, {n, 1, 1, 1});
    const auto [e, g] = frw_tetrad(scale, grid);
    const SpinConnectionField omega = spin_connection(e);
    double worst = 0.0;
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const double hub = scale.hubble(grid.coordinate(0, idx[0]));
        for (int nu = 0; nu < 4; ++nu)
            for (int k = 0; k < 4; ++k)
                for (int m = 0; m < 4; ++m) {
                    const double analytic = (nu == 0 && k >= 1 && k == m) ? hub : 0.0;
                    worst = std::max(worst, std::abs(omega.at(idx)[nu](k, m) - analytic));
                }
    });
    return worst;
}

/// Max deviation of the covariant derivative of a plane wave from i k psi on
/// a flat tetrad, n x n samples of spacing h in the first two coordinates.
double plane_wave_error(double h, int n) {
    const ChartGrid grid = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {h, h, 1.0, 1.0}, {n, n, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    for (auto& m : e.values) m = Mat4::identity();
    const SpinConnectionField omega = spin_connection(e);
    const GammaRep rep = standard_gammas();

    const double k0 = 0.6;
    const double k1 = -0.35;
    const Spinor psi0{{cplx(0.8, 0.0), cplx(-0.3, 0.2), cplx(0.0, 0.1), cplx(0.45, 0.0)}};

    SpinorField psi = make_field<Spinor>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const Vec4 x = grid.point(idx);
        const cplx phase = std::exp(cplx(0.0, k0 * x[0] + k1 * x[1]));
        psi.at(idx) = phase * psi0;
    });

    const auto deriv = covariant_derivative(psi, omega, rep);
    const std::array<double, 4> k = {k0, k1, 0.0, 0.0};
    double worst = 0.0;
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        for (int mu = 0; mu < 4; ++mu) {
            const Spinor analytic = cplx(0.0, k[static_cast<std::size_t>(mu)]) * psi.at(idx);
            worst = std::max(worst,
                             spinor_diff(deriv.at(idx)[static_cast<std::size_t>(mu)], analytic));
        }
    });
    return worst;
}

} // namespace

CheckResult check_spin_connection() {
    const auto start = Clock::now();
    const ScaleFactor scale = ScaleFactor::exponential(0.5);

    const double h1 = 0.05;
    const double e1 = frw_connection_error(scale, h1, 9);
    const double e2 = frw_connection_error(scale, h1 / 2.0, 17);
    const double e3 = frw_connection_error(scale, h1 / 4.0, 33);
    const double omega_order = std::min(order_between(e1, e2), order_between(e2, e3));

    const double w1 = plane_wave_error(0.2, 5);
    const double w2 = plane_wave_error(0.1, 9);
    const double w3 = plane_wave_error(0.05, 17);
    const double wave_order = std::min(order_between(w1, w2), order_between(w2, w3));

    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "spin-connection";
    r.residuals = {{"frw_omega", e1, 10.0 * h1 * h1},
                   {"frw_omega_order", 1.9 - omega_order, 0.0},
                   {"plane_wave_order", 1.9 - wave_order, 0.0}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

CheckResult check_lie_machinery() {
    const auto start = Clock::now();

    // Linear flow against the closed-form exponential.
    Mat4 m = Mat4::zero();
    m(0, 0) = 0.20; m(0, 1) = 0.50; m(0, 3) = -0.10;
    m(1, 0) = -0.30; m(1, 1) = 0.10; m(1, 2) = 0.20;
    m(2, 1) = -0.20; m(2, 2) = 0.15; m(2, 3) = 0.25;
    m(3, 0) = 0.10; m(3, 2) = -0.05; m(3, 3) = 0.20;

    VectorField zeta;
    zeta.value = [m](const Vec4& x) { return m * x; };
    zeta.jacobian = [m](const Vec4&) { return m; };

    const ChartGrid box =
        make_uniform_grid({-3.0, -3.0, -3.0, -3.0}, {6.0, 6.0, 6.0, 6.0}, {2, 2, 2, 2});
    const Vec4 x0{{0.1, 0.2, -0.1, 0.05}};
    const double tau = 1.0;
    const FlowResult flow = flow_exponentiate(zeta, box, x0, tau);
    const Mat4 closed = mat_exp(tau * m);
    const Vec4 end_closed = closed * x0;
    double flow_res = (flow.frame_map - closed).max_abs();
    for (int a = 0; a < 4; ++a)
        flow_res = std::max(flow_res, std::abs(flow.endpoint[a] - end_closed[a]));

    // Lie derivative of the cosmological tetrad along the time direction.
    const ScaleFactor scale = ScaleFactor::exponential(0.5);
    const double h = 0.01;
    const int n = 13;
    const ChartGrid grid = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {h, 1.0, 1.0, 1.0}, {n, 1, 1, 1});
    const auto [e, g] = frw_tetrad(scale, grid);
    VectorField dt;
    dt.value = [](const Vec4&) { return Vec4{{1.0, 0.0, 0.0, 0.0}}; };
    dt.jacobian = [](const Vec4&) { return Mat4::zero(); };
    const TetradField lie = lie_derivative_tetrad(e, dt);

    double lie_res = 0.0;
    double third_derivative_scale = 0.0;
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const double t = grid.coordinate(0, idx[0]);
        const double rdot = scale.derivative(t);
        third_derivative_scale =
            std::max(third_derivative_scale, std::abs(0.125 * scale.value(t))); // |R'''| = H^3 R
        for (int k = 0; k < 4; ++k)
            for (int mu = 0; mu < 4; ++mu) {
                const double analytic = (k >= 1 && k == mu) ? rdot : 0.0;
                lie_res = std::max(lie_res, std::abs(lie.at(idx)(k, mu) - analytic));
            }
    });
    const double lie_tol = 10.0 * h * h * third_derivative_scale;

    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "lie-machinery";
    r.residuals = {{"flow_vs_exp", flow_res, 1e-8}, {"frw_lie_dt", lie_res, lie_tol}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

CheckResult check_fiber_transport() {
    const auto start = Clock::now();

    // Pure dilatation: frame diag(1,2,2,2) shifts the spatial base entries by
    // log 4, which is exactly two cells of spacing log(4)/2.
    const double s = 0.5 * std::log(4.0);
    const ChartGrid st = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {0.25, 1.0, 1.0, 1.0}, {5, 1, 1, 1});
    const BaseGrid bg = make_uniform_base_grid({0.0, -2.0 * s, -2.0 * s, -2.0 * s},
                                               {1.0, s, s, s}, {1, 9, 9, 9});

    FiberSpinorField field = make_fiber_field(st, bg);
    for (int it = 0; it <= 2; ++it)
        for (int i1 = 2; i1 <= 4; ++i1)
            for (int i2 = 2; i2 <= 4; ++i2)
                for (int i3 = 2; i3 <= 4; ++i3) {
                    Spinor v;
                    v[0] = cplx(1.0 + 0.5 * ((i1 + i2 + i3 + it) % 3), 0.0);
                    v[1] = cplx(0.25 * ((2 * i1 + i2 + it) % 5), -0.5);
                    field.at({it, 0, 0, 0}, {0, i1, i2, i3}) = v;
                }

    MotionSpec motion;
    motion.map = [](const Vec4& x) {
        Vec4 y = x;
        y[0] += 0.5;
        return y;
    };
    const Mat4 dilate = Mat4::diagonal({1.0, 2.0, 2.0, 2.0});
    motion.frame = [dilate](const Vec4&) { return dilate; };

    const FiberSpinorField moved = transport(field, motion, minkowski());

    FiberSpinorField expected = make_fiber_field(st, bg);
    for (int it = 0; it <= 2; ++it)
        for (int i1 = 2; i1 <= 4; ++i1)
            for (int i2 = 2; i2 <= 4; ++i2)
                for (int i3 = 2; i3 <= 4; ++i3)
                    expected.at({it + 2, 0, 0, 0}, {0, i1 + 2, i2 + 2, i3 + 2}) =
                        field.at({it, 0, 0, 0}, {0, i1, i2, i3});
    const double permutation = field_diff(moved, expected);

    const double n_in = total_norm(field);
    const double n_out = total_norm(moved);
    const double norm_lattice = std::abs(n_out - n_in) / std::abs(n_in);

    // Three-step composition against the combined transport, bit for bit.
    const IsometryFactorization f = factorize(dilate, minkowski());
    const FiberSpinorField by_steps =
        step_left_isometry(step_translate(step_right_isometry(field, f), f.baseShift, motion.map), f);
    const double composition = field_diff(by_steps, moved);

    // Isometric step: a spatial rotation, lifted at every base point.
    const BaseGrid bg2 = make_uniform_base_grid({0.0, -0.4, -0.4, -0.4},
                                                {1.0, 0.4, 0.4, 0.4}, {1, 3, 3, 3});
    const ChartGrid st2 = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {0.5, 1.0, 1.0, 1.0}, {2, 1, 1, 1});
    FiberSpinorField field2 = make_fiber_field(st2, bg2);
    sample::Rng rng(0x2026081606ULL);
    for (auto& v : field2.values) {
        v[0] = cplx(1.0 + 0.3 * rng.uniform(-1.0, 1.0), 0.3 * rng.uniform(-1.0, 1.0));
        v[1] = cplx(0.5 * rng.uniform(-1.0, 1.0), 0.5 * rng.uniform(-1.0, 1.0));
        v[2] = cplx(0.3 * rng.uniform(-1.0, 1.0), 0.3 * rng.uniform(-1.0, 1.0));
        v[3] = cplx(0.2 * rng.uniform(-1.0, 1.0), 0.2 * rng.uniform(-1.0, 1.0));
    }
    MotionSpec rotate;
    rotate.map = [](const Vec4& x) { return x; };
    const Mat4 rot = spatial_rotation(0.3);
    rotate.frame = [rot](const Vec4&) { return rot; };
    const FiberSpinorField rotated = transport(field2, rotate, minkowski());
    const double n2_in = total_norm(field2);
    const double n2_out = total_norm(rotated);
    const double norm_isometric = std::abs(n2_out - n2_in) / std::abs(n2_in);

    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "fiber-transport";
    r.residuals = {{"permutation", permutation, 0.0},
                   {"norm_lattice_rel", norm_lattice, 1e-14},
                   {"norm_isometric_rel", norm_isometric, 1e-10},
                   {"composition", composition, 0.0}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

namespace {

/// Max deviation of the first-order transport operator from the analytic
/// derivative of separable test fields, refined with spacing h and n samples
/// per active axis.
double frw_operator_error(double h, int n) {
    const double half = 0.5 * static_cast<double>(n - 1) * h;
    const Spinor psi0{{cplx(0.7, 0.1), cplx(-0.2, 0.4), cplx(0.05, -0.3), cplx(0.6, 0.0)}};
    double worst = 0.0;

    // Time and the first spatial base direction active.
    {
        const ChartGrid st =
            make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {h, 1.0, 1.0, 1.0}, {n, 1, 1, 1});
        const BaseGrid bg = make_uniform_base_grid({0.0, -half, 0.0, 0.0},
                                                   {1.0, h, 1.0, 1.0}, {1, n, 1, 1});
        FiberSpinorField field = make_fiber_field(st, bg);
        FiberSpinorField analytic = make_fiber_field(st, bg);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double t = st.coordinate(0, i);
                const double l1 = bg.coordinate(1, j);
                const double f = std::exp(0.3 * t);
                const double fp = 0.3 * f;
                const double g = std::sin(1.1 * l1 + 0.4);
                const double gp = 1.1 * std::cos(1.1 * l1 + 0.4);
                field.at({i, 0, 0, 0}, {0, j, 0, 0}) = (f * g) * psi0;
                analytic.at({i, 0, 0, 0}, {0, j, 0, 0}) = (fp * g + f * gp) * psi0;
            }
        worst = std::max(worst, field_diff(frw_lie_operator(field), analytic));
    }

    // The second and third spatial base directions active.
    {
        const ChartGrid st =
            make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}, {1, 1, 1, 1});
        const BaseGrid bg = make_uniform_base_grid({0.0, 0.0, -half, -half},
                                                   {1.0, 1.0, h, h}, {1, 1, n, n});
        FiberSpinorField field = make_fiber_field(st, bg);
        FiberSpinorField analytic = make_fiber_field(st, bg);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double l2 = bg.coordinate(2, i);
                const double l3 = bg.coordinate(3, j);
                const double u = std::cos(0.7 * l2);
                const double up = -0.7 * std::sin(0.7 * l2);
                const double w = std::exp(0.4 * l3);
                const double wp = 0.4 * w;
                field.at({0, 0, 0, 0}, {0, 0, i, j}) = (u * w) * psi0;
                analytic.at({0, 0, 0, 0}, {0, 0, i, j}) = (up * w + u * wp) * psi0;
            }
        worst = std::max(worst, field_diff(frw_lie_operator(field), analytic));
    }

    return worst;
}

} // namespace

CheckResult check_frw_transport() {
    const auto start = Clock::now();
    const ScaleFactor scale = ScaleFactor::exponential(0.5);

    // Additivity of transport across an intermediate time.
    const ChartGrid st = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {0.25, 1.0, 1.0, 1.0}, {5, 1, 1, 1});
    const BaseGrid bg = make_uniform_base_grid({0.0, -1.5, -1.5, -1.5},
                                               {1.0, 0.25, 0.25, 0.25}, {1, 13, 13, 13});
    FiberSpinorField field = make_fiber_field(st, bg);
    sample::Rng rng(0x2026081607ULL);
    for (int i1 = 2; i1 <= 6; ++i1)
        for (int i2 = 2; i2 <= 6; ++i2)
            for (int i3 = 2; i3 <= 6; ++i3) field.at({0, 0, 0, 0}, {0, i1, i2, i3}) = sample::random_spinor(rng);

    const DiagonalMetric eta = minkowski();
    const FiberSpinorField leg12 = transport(field, frw_motion(scale, 0.0, 0.5), eta);
    const FiberSpinorField leg123 = transport(leg12, frw_motion(scale, 0.5, 1.0), eta);
    const FiberSpinorField leg13 = transport(field, frw_motion(scale, 0.0, 1.0), eta);
    const double additivity = field_diff(leg123, leg13);

    // Convergence of the first-order transport operator.
    const double o1 = frw_operator_error(0.1, 9);
    const double o2 = frw_operator_error(0.05, 17);
    const double o3 = frw_operator_error(0.025, 33);
    const double op_order = std::min(order_between(o1, o2), order_between(o2, o3));

    // The motion generator against the spin-connection block.
    const double h = 0.05;
    const ChartGrid tgrid = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {h, 1.0, 1.0, 1.0}, {9, 1, 1, 1});
    const auto [e, g] = frw_tetrad(scale, tgrid);
    const SpinConnectionField omega = spin_connection(e);
    const std::array<int, 4> mid = {4, 0, 0, 0};
    const Mat4& omega_t = omega.at(mid)[0];

    const double t_mid = tgrid.coordinate(0, 4);
    const double dt = 0.3;
    const MotionSpec motion = frw_motion(scale, t_mid, t_mid + dt);
    const IsometryFactorization f = factorize(motion.frame(Vec4{{t_mid, 0.0, 0.0, 0.0}}), eta);
    const ExponentialParts parts = exponential_parts(f);
    // delta_gen holds log Delta = log(R(t+dt)/R(t)) per spatial slot, so its
    // rate over dt is the Hubble factor carried by the connection block.
    Mat4 generator = Mat4::zero();
    for (int k = 0; k < 4; ++k)
        generator(k, k) = parts.delta_gen[static_cast<std::size_t>(k)] / dt;
    const double generator_block = (generator - omega_t).max_abs();

    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "frw-transport";
    r.residuals = {{"additivity", additivity, 1e-12},
                   {"operator_order", 1.9 - op_order, 0.0},
                   {"generator_block", generator_block, 10.0 * h * h + 1e-10}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

CheckResult check_aggregation() {
    const auto start = Clock::now();

    const ChartGrid st = make_uniform_grid({0.0, 0.0, 0.0, 0.0}, {0.5, 1.0, 1.0, 1.0}, {2, 1, 1, 1});
    const BaseGrid bg = make_uniform_base_grid({0.0, -0.5, -0.5, -0.5},
                                               {1.0, 0.5, 0.5, 0.5}, {1, 3, 3, 3});

    // Small-integer fixtures and dyadic coefficients keep every floating-point
    // operation exact, so linearity holds bit for bit.
    FiberSpinorField psi = make_fiber_field(st, bg);
    FiberSpinorField phi = make_fiber_field(st, bg);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
        for (int c = 0; c < 4; ++c) {
            const auto n = static_cast<double>((3 * i + static_cast<std::size_t>(c)) % 7) - 3.0;
            const auto p = static_cast<double>((5 * i + 2 * static_cast<std::size_t>(c)) % 9) - 4.0;
            psi.values[i][c] = cplx(n, p);
            phi.values[i][c] = cplx(p - n, n + 1.0);
        }

    FiberSpinorField combo = make_fiber_field(st, bg);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 2.0 * psi.values[i] + 0.5 * phi.values[i];

    const GridField<Spinor> agg_combo = aggregate(combo);
    const GridField<Spinor> agg_psi = aggregate(psi);
    const GridField<Spinor> agg_phi = aggregate(phi);
    double linearity = 0.0;
    for (std::size_t x = 0; x < agg_combo.values.size(); ++x)
        linearity = std::max(linearity,
                             spinor_diff(agg_combo.values[x],
                                         2.0 * agg_psi.values[x] + 0.5 * agg_phi.values[x]));

    const double cell = bg.cell_volume();

    // One nonzero sample: aggregation reduces to value times cell volume.
    FiberSpinorField single = make_fiber_field(st, bg);
    const Spinor v{{cplx(3.0, -2.0), cplx(1.0, 4.0), cplx(0.0, 1.0), cplx(-2.0, 0.0)}};
    single.at({1, 0, 0, 0}, {0, 1, 2, 0}) = v;
    const GridField<Spinor> agg_single = aggregate(single);
    const Spinor expected_single = cell * v;
    double single_res = 0.0;
    for_each_index(st, [&](const std::array<int, 4>& idx) {
        const Spinor want = (idx == std::array<int, 4>{1, 0, 0, 0}) ? expected_single : Spinor{};
        single_res = std::max(single_res, spinor_diff(agg_single.at(idx), want));
    });
    single_res /= expected_single.max_abs();

    // Uniform field: aggregation is the sample count times cell volume.
    FiberSpinorField uniform = make_fiber_field(st, bg);
    for (auto& u : uniform.values) u = v;
    const GridField<Spinor> agg_uniform = aggregate(uniform);
    const Spinor expected_uniform = (static_cast<double>(bg.total()) * cell) * v;
    double uniform_res = 0.0;
    for (const auto& u : agg_uniform.values)
        uniform_res = std::max(uniform_res, spinor_diff(u, expected_uniform));
    uniform_res /= expected_uniform.max_abs();

    const double elapsed = seconds_since(start);
    CheckResult r;
    r.name = "aggregation";
    r.residuals = {{"linearity", linearity, 0.0},
                   {"single_support_rel", single_res, 1e-14},
                   {"uniform_rel", uniform_res, 1e-14}};
    r.wall_ms = elapsed * 1e3;
    return r;
}

std::vector<CheckResult> run_all_checks() {
    return {check_clifford_closure(), check_factorization(), check_spin_lift(),
            check_spin_connection(), check_lie_machinery(),  check_fiber_transport(),
            check_frw_transport(),    check_aggregation()};
}

} // namespace spinfiber::checks
