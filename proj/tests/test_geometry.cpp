#include <cmath>
#include <complex>

#include "doctest.h"
#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/errors.hpp"
#include "spinfiber/frw.hpp"
#include "spinfiber/geometry.hpp"
#include "spinfiber/mat4.hpp"

using namespace spinfiber;

namespace {

const cplx kI{0.0, 1.0};

Mat4 rotation_12(double theta) {
    Mat4 r = Mat4::identity();
    r(1, 1) = std::cos(theta);
    r(1, 2) = -std::sin(theta);
    r(2, 1) = std::sin(theta);
    r(2, 2) = std::cos(theta);
    return r;
}

} // namespace

TEST_CASE("uniform grids expose their layout") {
    const ChartGrid grid = make_uniform_grid({0.0, -1.0, 0.0, 0.0}, {0.5, 1.0, 1.0, 1.0},
                                             {3, 3, 1, 1});
    CHECK(grid.extent(0) == 3);
    CHECK(grid.extent(2) == 1);
    CHECK(grid.coordinate(0, 2) == 1.0);
    CHECK(grid.spacing(0) == 0.5);
    CHECK(grid.spacing(2) == 0.0);
    CHECK(grid.cell_weight(2) == 1.0);
    CHECK(grid.cell_volume() == 0.5);
    CHECK(grid.total() == 9);
    const std::array<int, 4> idx{2, 1, 0, 0};
    CHECK(grid.linear_index(idx) == 7);
    CHECK(grid.point(idx).v == std::array<double, 4>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("grid construction rejects malformed axes") {
    CHECK_THROWS_AS(make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {0, 1, 1, 1}),
                    PreconditionError);
    CHECK_THROWS_AS(make_uniform_grid({0, 0, 0, 0}, {0.0, 1, 1, 1}, {2, 1, 1, 1}),
                    PreconditionError);
    CHECK_THROWS_AS(make_chart_grid({{{0.0, 1.0, 1.5}, {0.0}, {0.0}, {0.0}}}),
                    PreconditionError);
    CHECK_THROWS_AS(make_chart_grid({{{1.0, 0.0}, {0.0}, {0.0}, {0.0}}}), PreconditionError);
    CHECK_THROWS_AS(make_chart_grid({{{}, {0.0}, {0.0}, {0.0}}}), PreconditionError);
}

TEST_CASE("axis derivative is exact on quadratics") {
    const ChartGrid grid = make_uniform_grid({-1.0, 0, 0, 0}, {0.5, 1, 1, 1}, {5, 1, 1, 1});
    GridField<double> f = make_field<double>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const double x = grid.coordinate(0, idx[0]);
        f.at(idx) = 3.0 * x * x - 2.0 * x + 1.0;
    });
    const GridField<double> df = axis_derivative(f, 0);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const double x = grid.coordinate(0, idx[0]);
        CHECK(df.at(idx) == doctest::Approx(6.0 * x - 2.0).epsilon(1e-13));
    });
}

TEST_CASE("single-sample axes have zero derivative and two samples are rejected") {
    const ChartGrid single = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {1, 3, 1, 1});
    GridField<double> f = make_field<double>(single);
    for (auto& v : f.values) v = 7.0;
    CHECK(axis_derivative(f, 0).values == std::vector<double>(3, 0.0));

    const ChartGrid two = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {2, 1, 1, 1});
    GridField<double> g = make_field<double>(two);
    CHECK_THROWS_AS(axis_derivative(g, 0), StencilError);
}

TEST_CASE("orthonormality residual vanishes for the flat frame") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {0.5, 1, 1, 1}, {3, 1, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    CoordinateMetricField g = make_field<Mat4>(grid);
    for (auto& m : e.values) m = Mat4::identity();
    for (auto& m : g.values) m = minkowski().matrix();
    const OrthonormalityReport report = check_orthonormality(e, g);
    CHECK(report.max_residual == 0.0);
    CHECK(report.flagged.empty());
}

TEST_CASE("a doubled flat frame has residual three in the time slot") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {1, 1, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    CoordinateMetricField g = make_field<Mat4>(grid);
    e.values[0] = 2.0 * Mat4::identity();
    g.values[0] = minkowski().matrix();
    const OrthonormalityReport report = check_orthonormality(e, g);
    CHECK(report.max_residual == 3.0);
    CHECK(report.flagged.size() == 1);
}

TEST_CASE("the cosmological tetrad is orthonormal against its inverse metric") {
    const ChartGrid grid = make_uniform_grid({0.0, 0, 0, 0}, {0.05, 1, 1, 1}, {9, 1, 1, 1});
    const auto [e, g] = frw_tetrad(ScaleFactor::exponential(0.5), grid);
    CHECK(check_orthonormality(e, g).max_residual <= 1e-14);
}

TEST_CASE("orthonormality check rejects mismatched grids") {
    const ChartGrid a = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {2, 1, 1, 1});
    const ChartGrid b = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {3, 1, 1, 1});
    TetradField e = make_field<Mat4>(a);
    CoordinateMetricField g = make_field<Mat4>(b);
    CHECK_THROWS_AS(check_orthonormality(e, g), GridMismatchError);
}

TEST_CASE("a constant tetrad has zero connection") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {0.5, 0.5, 1, 1}, {3, 3, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    for (auto& m : e.values) m = rotation_12(0.3);
    const SpinConnectionField omega = spin_connection(e);
    // The one-sided boundary stencil rounds on non-dyadic entries, so the
    // residue is half-ulp noise rather than exact zero.
    for (const Connection4& c : omega.values)
        for (int nu = 0; nu < 4; ++nu) CHECK(c[nu].max_abs() <= 1e-15);
}

TEST_CASE("the cosmological connection is the Hubble rate times the spatial block") {
    const double h = 0.05;
    const ChartGrid grid = make_uniform_grid({0.0, 0, 0, 0}, {h, 1, 1, 1}, {9, 1, 1, 1});
    const ScaleFactor r = ScaleFactor::exponential(0.5);
    const auto [e, g] = frw_tetrad(r, grid);
    const SpinConnectionField omega = spin_connection(e);
    double worst = 0.0;
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const Mat4 expected = r.hubble(grid.coordinate(0, idx[0])) *
                              Mat4::diagonal({0.0, 1.0, 1.0, 1.0});
        worst = std::max(worst, (omega.at(idx)[0] - expected).max_abs());
        for (int nu = 1; nu < 4; ++nu)
            worst = std::max(worst, omega.at(idx)[nu].max_abs());
    });
    CHECK(worst <= 10.0 * h * h);
}

TEST_CASE("a frame rotating along an axis has the generator as connection") {
    const double alpha = 0.7;
    const double h = 0.01;
    const ChartGrid grid = make_uniform_grid({0, -2.0 * h, 0, 0}, {1, h, 1, 1}, {1, 5, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        e.at(idx) = rotation_12(alpha * grid.coordinate(1, idx[1]));
    });
    const SpinConnectionField omega = spin_connection(e);
    Mat4 gen;
    gen(1, 2) = -alpha;
    gen(2, 1) = alpha;
    // The boundary rows use the one-sided stencil, whose truncation constant
    // is twice the central one: alpha^3 h^2 / 3 = 1.14e-5 here.
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        CHECK((omega.at(idx)[1] - gen).max_abs() <= 3e-5);
    });
}

TEST_CASE("the connection throws on a singular frame") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {0.5, 1, 1, 1}, {3, 1, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    for (auto& m : e.values) m = Mat4::identity();
    e.values[1](0, 0) = 0.0;
    CHECK_THROWS_AS(spin_connection(e), SingularFrameError);
}

TEST_CASE("covariant derivative of a constant field with zero connection vanishes") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {0.5, 0.5, 1, 1}, {3, 3, 1, 1});
    SpinorField psi = make_field<Spinor>(grid);
    for (auto& v : psi.values) v = Spinor{{cplx(0.3, -0.1), cplx(1.0), cplx(0.0), cplx(0.2)}};
    SpinConnectionField omega = make_field<Connection4>(grid);
    const auto grad = covariant_derivative(psi, omega, standard_gammas());
    for (const auto& per_point : grad.values)
        for (int mu = 0; mu < 4; ++mu)
            CHECK(per_point[static_cast<std::size_t>(mu)].max_abs() <= 1e-15);
}

TEST_CASE("covariant derivative requires the flat representation") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {0.5, 1, 1, 1}, {3, 1, 1, 1});
    SpinorField psi = make_field<Spinor>(grid);
    SpinConnectionField omega = make_field<Connection4>(grid);
    const GammaRep moved = deformed_gammas(shift(minkowski(), BaseShift{{0.5, 0.0, 0.0, 0.0}}));
    CHECK_THROWS_AS(covariant_derivative(psi, omega, moved), PreconditionError);
}

TEST_CASE("covariant derivative rejects mismatched grids") {
    const ChartGrid a = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {3, 1, 1, 1});
    const ChartGrid b = make_uniform_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {4, 1, 1, 1});
    SpinorField psi = make_field<Spinor>(a);
    SpinConnectionField omega = make_field<Connection4>(b);
    CHECK_THROWS_AS(covariant_derivative(psi, omega, standard_gammas()), GridMismatchError);
}

TEST_CASE("covariant derivative of a plane wave approximates the wave covector") {
    const double h = 0.1;
    const ChartGrid grid =
        make_uniform_grid({0.0, 0.0, 0, 0}, {h, h, 1, 1}, {9, 9, 1, 1});
    const std::array<double, 4> k{0.6, -0.35, 0.0, 0.0};
    const Spinor psi0{{cplx(0.8), cplx(-0.3, 0.2), cplx(0.0, 0.1), cplx(0.45)}};
    SpinorField psi = make_field<Spinor>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const Vec4 x = grid.point(idx);
        double phase = 0.0;
        for (int a = 0; a < 4; ++a) phase += k[static_cast<std::size_t>(a)] * x[a];
        psi.at(idx) = std::exp(kI * phase) * psi0;
    });
    SpinConnectionField omega = make_field<Connection4>(grid);
    const auto grad = covariant_derivative(psi, omega, standard_gammas());
    double worst = 0.0;
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const Spinor& value = psi.at(idx);
        for (int mu = 0; mu < 4; ++mu) {
            const Spinor expected = (kI * k[static_cast<std::size_t>(mu)]) * value;
            worst = std::max(worst,
                             (grad.at(idx)[static_cast<std::size_t>(mu)] - expected).max_abs());
        }
    });
    CHECK(worst <= 2e-3);
}

TEST_CASE("covariant derivative of a constant field on the cosmological frame vanishes") {
    // The connection is diagonal in the frame indices there, and the diagonal
    // sigma contraction is identically zero.
    const ChartGrid grid = make_uniform_grid({0.0, 0, 0, 0}, {0.05, 1, 1, 1}, {9, 1, 1, 1});
    const auto [e, g] = frw_tetrad(ScaleFactor::exponential(0.5), grid);
    const SpinConnectionField omega = spin_connection(e);
    SpinorField psi = make_field<Spinor>(grid);
    for (auto& v : psi.values) v = Spinor{{cplx(1.0), cplx(0.5, 0.5), cplx(-0.2), cplx(0.0)}};
    const auto grad = covariant_derivative(psi, omega, standard_gammas());
    for (const auto& per_point : grad.values)
        for (int mu = 0; mu < 4; ++mu)
            CHECK(per_point[static_cast<std::size_t>(mu)].max_abs() <= 1e-12);
}

TEST_CASE("covariant derivative picks up a rotating frame connection term") {
    const double alpha = 0.7;
    const double h = 0.01;
    const ChartGrid grid = make_uniform_grid({0, -2.0 * h, 0, 0}, {1, h, 1, 1}, {1, 5, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        e.at(idx) = rotation_12(alpha * grid.coordinate(1, idx[1]));
    });
    const SpinConnectionField omega = spin_connection(e);
    const Spinor psi0{{cplx(0.6, 0.1), cplx(-0.4), cplx(0.2, -0.2), cplx(1.0)}};
    SpinorField psi = make_field<Spinor>(grid);
    for (auto& v : psi.values) v = psi0;
    const auto grad = covariant_derivative(psi, omega, standard_gammas());
    const Spinor expected = ((0.5 * kI) * alpha) * (sigma(standard_gammas(), 1, 2) * psi0);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        CHECK((grad.at(idx)[1] - expected).max_abs() <= 1e-4);
    });
}

TEST_CASE("lie derivative of constants vanishes") {
    const ChartGrid grid = make_uniform_grid({0, 0, 0, 0}, {0.5, 0.5, 1, 1}, {3, 3, 1, 1});
    TetradField e = make_field<Mat4>(grid);
    for (auto& m : e.values) m = Mat4::identity();
    GridField<Vec4> zeta = make_field<Vec4>(grid);
    for (auto& v : zeta.values) v = Vec4{{0.4, -0.2, 0.1, 0.0}};
    const TetradField lie = lie_derivative_tetrad(e, zeta);
    for (const Mat4& m : lie.values) CHECK(m.max_abs() <= 1e-15);
}

TEST_CASE("lie derivative along a rotation field reads the jacobian") {
    const ChartGrid grid = make_uniform_grid({0, -0.5, -0.5, 0}, {1, 0.5, 0.5, 1}, {1, 3, 3, 1});
    TetradField e = make_field<Mat4>(grid);
    for (auto& m : e.values) m = Mat4::identity();
    Mat4 jac;
    jac(1, 2) = -1.0;
    jac(2, 1) = 1.0;

    GridField<Vec4> sampled = make_field<Vec4>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const Vec4 x = grid.point(idx);
        sampled.at(idx) = Vec4{{0.0, -x[2], x[1], 0.0}};
    });
    const TetradField lie_s = lie_derivative_tetrad(e, sampled);
    for (const Mat4& m : lie_s.values) CHECK((m - jac).max_abs() <= 1e-14);

    VectorField analytic;
    analytic.value = [](const Vec4& x) { return Vec4{{0.0, -x[2], x[1], 0.0}}; };
    analytic.jacobian = [jac](const Vec4&) { return jac; };
    const TetradField lie_a = lie_derivative_tetrad(e, analytic);
    for (const Mat4& m : lie_a.values) CHECK((m - jac).max_abs() <= 1e-14);
}

TEST_CASE("lie derivative of the cosmological tetrad along time is the expansion rate") {
    const double h = 0.05;
    const double hubble = 0.4;
    const ChartGrid grid = make_uniform_grid({0.0, 0, 0, 0}, {h, 1, 1, 1}, {9, 1, 1, 1});
    const ScaleFactor r = ScaleFactor::exponential(hubble);
    const auto [e, g] = frw_tetrad(r, grid);
    VectorField time_flow;
    time_flow.value = [](const Vec4&) { return Vec4{{1.0, 0.0, 0.0, 0.0}}; };
    time_flow.jacobian = [](const Vec4&) { return Mat4{}; };
    const TetradField lie = lie_derivative_tetrad(e, time_flow);
    double worst = 0.0;
    double scale = 0.0;
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const double rdot = r.derivative(grid.coordinate(0, idx[0]));
        scale = std::max(scale, rdot);
        const Mat4 expected = rdot * Mat4::diagonal({0.0, 1.0, 1.0, 1.0});
        worst = std::max(worst, (lie.at(idx) - expected).max_abs());
    });
    CHECK(worst <= 10.0 * h * h * hubble * hubble * scale);
}

TEST_CASE("flow for zero parameter returns the start exactly") {
    const ChartGrid grid = make_uniform_grid({-3, -3, -3, -3}, {6, 6, 6, 6}, {2, 2, 2, 2});
    VectorField zeta;
    zeta.value = [](const Vec4& x) { return Vec4{{x[1], -x[0], 0.0, 0.0}}; };
    const Vec4 x0{{0.3, -0.2, 0.1, 0.0}};
    const FlowResult r = flow_exponentiate(zeta, grid, x0, 0.0);
    CHECK(r.endpoint.v == x0.v);
    CHECK((r.frame_map - Mat4::identity()).max_abs() == 0.0);
}

TEST_CASE("a linear flow exponentiates its matrix") {
    Mat4 m;
    m(0, 0) = 0.2;
    m(0, 1) = 0.5;
    m(1, 0) = -0.1;
    m(1, 1) = -0.3;
    m(1, 2) = 0.1;
    m(2, 1) = 0.2;
    m(2, 2) = -0.2;
    m(2, 3) = 0.15;
    m(3, 0) = 0.25;
    m(3, 2) = 0.1;
    m(3, 3) = -0.05;
    m(0, 3) = 0.2;
    VectorField zeta;
    zeta.value = [m](const Vec4& x) { return m * x; };
    zeta.jacobian = [m](const Vec4&) { return m; };
    const ChartGrid grid = make_uniform_grid({-3, -3, -3, -3}, {6, 6, 6, 6}, {2, 2, 2, 2});
    const Vec4 x0{{0.1, 0.2, -0.1, 0.05}};
    const FlowResult r = flow_exponentiate(zeta, grid, x0, 1.0);
    const Mat4 expected = mat_exp(m);
    CHECK((r.frame_map - expected).max_abs() <= 1e-8);
    const Vec4 end = expected * x0;
    for (int a = 0; a < 4; ++a) CHECK(std::abs(r.endpoint[a] - end[a]) <= 1e-8);
}

TEST_CASE("flows that leave the chart are rejected") {
    const ChartGrid grid = make_uniform_grid({-1, -1, -1, -1}, {2, 2, 2, 2}, {2, 2, 2, 2});
    VectorField zeta;
    zeta.value = [](const Vec4&) { return Vec4{{1.0, 0.0, 0.0, 0.0}}; };
    zeta.jacobian = [](const Vec4&) { return Mat4{}; };
    CHECK_THROWS_AS(flow_exponentiate(zeta, grid, Vec4{{0.9, 0.0, 0.0, 0.0}}, 0.5),
                    FlowEscapeError);
}

TEST_CASE("the frame flow integrates a position-dependent generator") {
    const double hubble = 0.5;
    const ChartGrid grid = make_uniform_grid({-3, -3, -3, -3}, {6, 6, 6, 6}, {2, 2, 2, 2});
    VectorField zeta;
    zeta.value = [](const Vec4&) { return Vec4{{1.0, 0.0, 0.0, 0.0}}; };
    zeta.jacobian = [](const Vec4&) { return Mat4{}; };
    const auto generator = [hubble](const Vec4&) {
        return hubble * Mat4::diagonal({0.0, 1.0, 1.0, 1.0});
    };
    const double tau = 0.8;
    const FlowResult r = flow_exponentiate_frame(zeta, generator, grid, Vec4{}, tau);
    const double scale = std::exp(hubble * tau);
    CHECK((r.frame_map - Mat4::diagonal({1.0, scale, scale, scale})).max_abs() <= 1e-8);
    CHECK(std::abs(r.endpoint[0] - tau) <= 1e-12);
}
