#include <cmath>
#include <complex>
#include <functional>

#include "doctest.h"
#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/decompose.hpp"
#include "spinfiber/errors.hpp"
#include "spinfiber/fiber.hpp"
#include "spinfiber/sampling.hpp"
#include "spinfiber/spinlift.hpp"

using namespace spinfiber;

namespace {

Mat4 rotation_12(double theta) {
    Mat4 r = Mat4::identity();
    r(1, 1) = std::cos(theta);
    r(1, 2) = -std::sin(theta);
    r(2, 1) = std::sin(theta);
    r(2, 2) = std::cos(theta);
    return r;
}

std::function<Vec4(const Vec4&)> identity_map() {
    return [](const Vec4& x) { return x; };
}

ChartGrid two_times() { return make_uniform_grid({0, 0, 0, 0}, {0.5, 1, 1, 1}, {2, 1, 1, 1}); }

BaseGrid small_base() {
    return make_uniform_base_grid({0.0, -0.4, -0.4, -0.4}, {1.0, 0.4, 0.4, 0.4}, {1, 3, 3, 3});
}

FiberSpinorField random_field(const ChartGrid& st, const BaseGrid& base, std::uint64_t seed) {
    FiberSpinorField f = make_fiber_field(st, base);
    sample::Rng rng(seed);
    for (auto& v : f.values) v = sample::random_spinor(rng);
    return f;
}

bool same_values(const FiberSpinorField& a, const FiberSpinorField& b) {
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        for (int c = 0; c < 4; ++c)
            if (a.values[i][c] != b.values[i][c]) return false;
    return true;
}

} // namespace

TEST_CASE("base grids expose the log chart lattice") {
    const BaseGrid base = small_base();
    CHECK(base.extent(1) == 3);
    CHECK(base.spacing(1) == 0.4);
    CHECK(base.cell_volume() == doctest::Approx(0.4 * 0.4 * 0.4).epsilon(1e-15));
    const DiagonalMetric d = base.metric_at({0, 1, 1, 1});
    CHECK(d == minkowski());
    CHECK(base.metric_at({0, 0, 1, 2}).log_abs == std::array<double, 4>{0.0, -0.4, 0.0, 0.4});
}

TEST_CASE("base grids require the Lorentz sign pattern") {
    CHECK_THROWS_AS(make_uniform_base_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {1, 1, 1, 1},
                                           {+1, +1, -1, -1}),
                    SignatureError);
}

TEST_CASE("base grid construction rejects malformed axes") {
    CHECK_THROWS_AS(make_uniform_base_grid({0, 0, 0, 0}, {1, 1, 1, 1}, {1, 0, 1, 1}),
                    PreconditionError);
    CHECK_THROWS_AS(make_uniform_base_grid({0, 0, 0, 0}, {1, -0.5, 1, 1}, {1, 2, 1, 1}),
                    PreconditionError);
}

TEST_CASE("translating by zero is the identity") {
    const FiberSpinorField f = random_field(two_times(), small_base(), 601);
    const FiberSpinorField out = step_translate(f, BaseShift{}, identity_map());
    CHECK(same_values(out, f));
}

TEST_CASE("a lattice-aligned shift permutes the samples") {
    const BaseGrid base = small_base();
    const ChartGrid st = two_times();
    FiberSpinorField f = make_fiber_field(st, base);
    const Spinor v{{cplx(0.5, -0.25), cplx(1.0), cplx(0.0, 2.0), cplx(-3.0)}};
    f.at({0, 0, 0, 0}, {0, 0, 1, 0}) = v;
    const FiberSpinorField out =
        step_translate(f, BaseShift{{0.0, 0.4, 0.4, 0.4}}, identity_map());
    for (int c = 0; c < 4; ++c) CHECK(out.at({0, 0, 0, 0}, {0, 1, 2, 1})[c] == v[c]);
    double rest = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (i != out.sample_index(st.linear_index({0, 0, 0, 0}), base.linear_index({0, 1, 2, 1})))
            rest = std::max(rest, out.values[i].max_abs());
    CHECK(rest == 0.0);
    CHECK(total_norm(out) == doctest::Approx(total_norm(f)).epsilon(1e-14));
}

TEST_CASE("misaligned shifts are rejected") {
    const FiberSpinorField f = random_field(two_times(), small_base(), 602);
    CHECK_THROWS_AS(step_translate(f, BaseShift{{0.0, 0.1, 0.0, 0.0}}, identity_map()),
                    AlignmentError);
    // The time axis has a single sample; any motion along it is misaligned.
    CHECK_THROWS_AS(step_translate(f, BaseShift{{0.4, 0.0, 0.0, 0.0}}, identity_map()),
                    AlignmentError);
}

TEST_CASE("shifting support off the base grid is an error") {
    FiberSpinorField f = make_fiber_field(two_times(), small_base());
    f.at({0, 0, 0, 0}, {0, 2, 1, 1})[0] = 1.0;
    CHECK_THROWS_AS(step_translate(f, BaseShift{{0.0, 0.4, 0.0, 0.0}}, identity_map()),
                    SupportEscapeError);
}

TEST_CASE("mapping support off the spacetime grid is an error") {
    FiberSpinorField f = make_fiber_field(two_times(), small_base());
    f.at({1, 0, 0, 0}, {0, 1, 1, 1})[0] = 1.0;
    const auto shift_t = [](const Vec4& x) {
        Vec4 y = x;
        y[0] += 0.5;
        return y;
    };
    CHECK_THROWS_AS(step_translate(f, BaseShift{}, shift_t), SupportEscapeError);
}

TEST_CASE("zero samples may fall off the grid silently") {
    const FiberSpinorField f = make_fiber_field(two_times(), small_base());
    const auto shift_t = [](const Vec4& x) {
        Vec4 y = x;
        y[0] += 0.5;
        return y;
    };
    const FiberSpinorField out = step_translate(f, BaseShift{}, shift_t);
    for (const auto& v : out.values) CHECK(v.max_abs() == 0.0);
}

TEST_CASE("non-injective spacetime maps are rejected") {
    const FiberSpinorField f = random_field(two_times(), small_base(), 603);
    const auto collapse = [](const Vec4&) { return Vec4{{0.0, 0.0, 0.0, 0.0}}; };
    CHECK_THROWS_AS(step_translate(f, BaseShift{}, collapse), PreconditionError);
}

TEST_CASE("translations along disjoint axes commute exactly") {
    const BaseGrid base =
        make_uniform_base_grid({0.0, -0.8, -0.8, 0.0}, {1.0, 0.4, 0.4, 1.0}, {1, 5, 5, 1});
    FiberSpinorField f = make_fiber_field(two_times(), base);
    sample::Rng rng(604);
    for (int i1 = 1; i1 <= 3; ++i1)
        for (int i2 = 1; i2 <= 3; ++i2)
            f.at({0, 0, 0, 0}, {0, i1, i2, 0}) = sample::random_spinor(rng);
    const BaseShift da{{0.0, 0.4, 0.0, 0.0}};
    const BaseShift db{{0.0, 0.0, -0.4, 0.0}};
    const FiberSpinorField ab =
        step_translate(step_translate(f, da, identity_map()), db, identity_map());
    const FiberSpinorField ba =
        step_translate(step_translate(f, db, identity_map()), da, identity_map());
    CHECK(same_values(ab, ba));
}

TEST_CASE("the right isometry step with identity factor copies the field") {
    const FiberSpinorField f = random_field(two_times(), small_base(), 605);
    const IsometryFactorization fact = factorize(Mat4::identity(), minkowski());
    CHECK(same_values(step_right_isometry(f, fact), f));
}

TEST_CASE("the right isometry step applies the per-point lift") {
    const BaseGrid base =
        make_uniform_base_grid({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}, {1, 1, 1, 1});
    const ChartGrid st = two_times();
    const FiberSpinorField f = random_field(st, base, 606);
    const IsometryFactorization fact = factorize(rotation_12(0.3), minkowski());
    const FiberSpinorField out = step_right_isometry(f, fact);
    const Mat4c lift = lift_frame_transform(fact.U, minkowski());
    const GammaRep rep = standard_gammas();
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const Spinor expected = lift * f.values[i];
        for (int c = 0; c < 4; ++c) CHECK(out.values[i][c] == expected[c]);
        CHECK(norm_density(rep, out.values[i]) ==
              doctest::Approx(norm_density(rep, f.values[i])).epsilon(1e-10));
    }
}

TEST_CASE("steps reject factorizations anchored off the base grid") {
    const FiberSpinorField f = random_field(two_times(), small_base(), 607);
    const IsometryFactorization fact =
        factorize(Mat4::identity(), shift(minkowski(), BaseShift{{0.0, 0.1, 0.0, 0.0}}));
    CHECK_THROWS_AS(step_right_isometry(f, fact), GridMismatchError);
}

TEST_CASE("the left isometry step with identity diagonalizer copies the field") {
    const double s = 0.5 * std::log(4.0);
    const BaseGrid base =
        make_uniform_base_grid({0.0, 0.0, 0.0, 0.0}, {1.0, s, s, s}, {1, 3, 3, 3});
    const FiberSpinorField f = random_field(two_times(), base, 608);
    const IsometryFactorization fact =
        factorize(Mat4::diagonal({1.0, 2.0, 2.0, 2.0}), minkowski());
    CHECK((fact.V - Mat4::identity()).max_abs() == 0.0);
    CHECK(same_values(step_left_isometry(f, fact), f));
}

TEST_CASE("transport by the identity motion changes nothing") {
    const FiberSpinorField f = random_field(two_times(), small_base(), 609);
    MotionSpec motion;
    motion.map = identity_map();
    motion.frame = [](const Vec4&) { return Mat4::identity(); };
    CHECK(same_values(transport(f, motion, minkowski()), f));
}

TEST_CASE("a pure spatial dilatation transports as an exact permutation") {
    const double s = 0.5 * std::log(4.0);
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {3, 1, 1, 1});
    const BaseGrid base = make_uniform_base_grid({0.0, -2.0 * s, -2.0 * s, -2.0 * s},
                                                 {1.0, s, s, s}, {1, 5, 5, 5});
    FiberSpinorField f = make_fiber_field(st, base);
    const Spinor v{{cplx(1.0, 0.5), cplx(-0.25), cplx(0.0, 1.0), cplx(2.0)}};
    f.at({1, 0, 0, 0}, {0, 2, 2, 2}) = v;

    MotionSpec motion;
    motion.map = identity_map();
    const Mat4 frame = Mat4::diagonal({1.0, 2.0, 2.0, 2.0});
    motion.frame = [frame](const Vec4&) { return frame; };

    const FiberSpinorField out = transport(f, motion, minkowski());
    for (int c = 0; c < 4; ++c) CHECK(out.at({1, 0, 0, 0}, {0, 4, 4, 4})[c] == v[c]);
    double rest = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (i != out.sample_index(st.linear_index({1, 0, 0, 0}), base.linear_index({0, 4, 4, 4})))
            rest = std::max(rest, out.values[i].max_abs());
    CHECK(rest == 0.0);
    CHECK(total_norm(out) == doctest::Approx(total_norm(f)).epsilon(1e-14));
}

TEST_CASE("transport is the three-step composition, bitwise") {
    const double s = 0.5 * std::log(4.0);
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {3, 1, 1, 1});
    const BaseGrid base = make_uniform_base_grid({0.0, -2.0 * s, -2.0 * s, -2.0 * s},
                                                 {1.0, s, s, s}, {1, 5, 5, 5});
    FiberSpinorField f = make_fiber_field(st, base);
    sample::Rng rng(610);
    for (int i1 = 1; i1 <= 2; ++i1)
        for (int i2 = 1; i2 <= 2; ++i2)
            for (int i3 = 1; i3 <= 2; ++i3)
                f.at({0, 0, 0, 0}, {0, i1, i2, i3}) = sample::random_spinor(rng);

    MotionSpec motion;
    motion.map = identity_map();
    const Mat4 frame = rotation_12(0.25) * Mat4::diagonal({1.0, 2.0, 2.0, 2.0});
    motion.frame = [frame](const Vec4&) { return frame; };

    const IsometryFactorization fact = factorize(frame, minkowski());
    const FiberSpinorField manual = step_left_isometry(
        step_translate(step_right_isometry(f, fact), fact.baseShift, motion.map), fact);
    CHECK(same_values(transport(f, motion, minkowski()), manual));
}

TEST_CASE("position-dependent isometries transport fiber by fiber") {
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {3, 1, 1, 1});
    const BaseGrid base = small_base();
    const FiberSpinorField f = random_field(st, base, 611);

    MotionSpec motion;
    motion.map = identity_map();
    motion.frame = [](const Vec4& x) { return rotation_12(0.1 * (1.0 + x[0])); };

    std::vector<IsometryFactorization> facts;
    for_each_index(st, [&](const std::array<int, 4>& idx) {
        facts.push_back(factorize(rotation_12(0.1 * (1.0 + st.point(idx)[0])), minkowski()));
    });

    // Right lift at the departure point, translate, left lift at the arrival
    // point; the map is the identity here so both live at the same sample.
    FiberSpinorField manual = f;
    std::size_t xl = 0;
    for_each_index(st, [&](const std::array<int, 4>&) {
        for_each_base_index(base, [&](const std::array<int, 4>& d_idx) {
            const DiagonalMetric d = base.metric_at(d_idx);
            const Mat4c right = lift_frame_transform(facts[xl].U, d);
            Spinor& v = manual.values[manual.sample_index(xl, base.linear_index(d_idx))];
            v = right * v;
        });
        ++xl;
    });
    manual = step_translate(manual, facts.front().baseShift, motion.map);
    xl = 0;
    for_each_index(st, [&](const std::array<int, 4>&) {
        for_each_base_index(base, [&](const std::array<int, 4>& d_idx) {
            const Mat4 lambda = mat_log(facts[xl].V);
            if (lambda.max_abs() != 0.0) {
                const DiagonalMetric d = base.metric_at(d_idx);
                const Mat4c left = lift_frame_transform(facts[xl].V, d);
                Spinor& v = manual.values[manual.sample_index(xl, base.linear_index(d_idx))];
                v = left * v;
            }
        });
        ++xl;
    });

    CHECK(same_values(transport(f, motion, minkowski()), manual));
}

TEST_CASE("motions whose base shift varies across spacetime are rejected") {
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {3, 1, 1, 1});
    const FiberSpinorField f = random_field(st, small_base(), 612);
    MotionSpec motion;
    motion.map = identity_map();
    motion.frame = [](const Vec4& x) {
        const double r = std::exp(0.1 * (1.0 + x[0]));
        return Mat4::diagonal({1.0, r, 1.0, 1.0});
    };
    CHECK_THROWS_AS(transport(f, motion, minkowski()), AlignmentError);
}

TEST_CASE("the total norm of a unit sample is the cell volume") {
    const BaseGrid base =
        make_uniform_base_grid({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}, {1, 1, 1, 1});
    FiberSpinorField f = make_fiber_field(two_times(), base);
    CHECK(total_norm(f) == 0.0);
    f.at({0, 0, 0, 0}, {0, 0, 0, 0})[0] = 1.0;
    CHECK(total_norm(f) == 0.5); // time cell weight 0.5, every other weight 1
}

TEST_CASE("the total norm matches the adjoint-contraction oracle") {
    const BaseGrid base = small_base();
    const ChartGrid st = two_times();
    FiberSpinorField f = random_field(st, base, 613);
    // Bias toward positive density so the relative comparison is meaningful.
    for (auto& v : f.values) v[0] += cplx(2.0, 0.0);
    double oracle = 0.0;
    for_each_index(st, [&](const std::array<int, 4>& x_idx) {
        for_each_base_index(base, [&](const std::array<int, 4>& d_idx) {
            const GammaRep rep = deformed_gammas(base.metric_at(d_idx));
            oracle += norm_density(rep, f.at(x_idx, d_idx));
        });
    });
    oracle *= st.cell_volume() * base.cell_volume();
    CHECK(total_norm(f) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("norm is preserved under isometric transport") {
    const ChartGrid st = two_times();
    const BaseGrid base = small_base();
    FiberSpinorField f = make_fiber_field(st, base);
    sample::Rng rng(614);
    for (auto& v : f.values) {
        // Bias toward positive density so the relative error is meaningful.
        v = sample::random_spinor(rng);
        v[0] += cplx(2.0, 0.0);
    }
    MotionSpec motion;
    motion.map = identity_map();
    const Mat4 frame = rotation_12(0.3);
    motion.frame = [frame](const Vec4&) { return frame; };
    const double before = total_norm(f);
    const double after = total_norm(transport(f, motion, minkowski()));
    CHECK(after == doctest::Approx(before).epsilon(1e-10));
}

TEST_CASE("aggregation of a single-support field is the scaled value") {
    const BaseGrid base = small_base();
    const ChartGrid st = two_times();
    FiberSpinorField f = make_fiber_field(st, base);
    const Spinor v{{cplx(3.0, -2.0), cplx(1.0, 4.0), cplx(0.0, 1.0), cplx(-2.0)}};
    f.at({1, 0, 0, 0}, {0, 0, 1, 2}) = v;
    const GridField<Spinor> agg = aggregate(f);
    const double vol = base.cell_volume();
    for (int c = 0; c < 4; ++c)
        CHECK(std::abs(agg.at({1, 0, 0, 0})[c] - vol * v[c]) <= 1e-16 * std::abs(v[c]));
    CHECK(agg.at({0, 0, 0, 0}).max_abs() == 0.0);
}

TEST_CASE("aggregation is exactly linear") {
    const BaseGrid base =
        make_uniform_base_grid({0.0, -0.5, -0.5, -0.5}, {1.0, 0.5, 0.5, 0.5}, {1, 3, 3, 3});
    const ChartGrid st = two_times();
    FiberSpinorField psi = make_fiber_field(st, base);
    FiberSpinorField phi = make_fiber_field(st, base);
    int n = 0;
    for (auto& v : psi.values) {
        for (int c = 0; c < 4; ++c) v[c] = cplx((3 * n + c) % 7 - 3, (2 * n + c) % 5 - 2);
        ++n;
    }
    n = 0;
    for (auto& v : phi.values) {
        for (int c = 0; c < 4; ++c) v[c] = cplx((5 * n + 2 * c) % 9 - 4, (n + c) % 3 - 1);
        ++n;
    }
    FiberSpinorField combo = make_fiber_field(st, base);
    for (std::size_t i = 0; i < combo.values.size(); ++i)
        combo.values[i] = 2.0 * psi.values[i] + 0.5 * phi.values[i];
    const GridField<Spinor> left = aggregate(combo);
    const GridField<Spinor> a = aggregate(psi);
    const GridField<Spinor> b = aggregate(phi);
    for (std::size_t i = 0; i < left.values.size(); ++i) {
        const Spinor right = 2.0 * a.values[i] + 0.5 * b.values[i];
        for (int c = 0; c < 4; ++c) CHECK(left.values[i][c] == right[c]);
    }
}

TEST_CASE("aggregation of a uniform field counts the cells") {
    const BaseGrid base =
        make_uniform_base_grid({0.0, -0.5, -0.5, -0.5}, {1.0, 0.5, 0.5, 0.5}, {1, 3, 3, 3});
    const ChartGrid st = two_times();
    FiberSpinorField f = make_fiber_field(st, base);
    const Spinor v{{cplx(0.5, -1.0), cplx(2.0), cplx(0.0, 0.25), cplx(-4.0)}};
    for (auto& x : f.values) x = v;
    const GridField<Spinor> agg = aggregate(f);
    const double expected_scale = 27.0 * base.cell_volume(); // 0.5^3 cells, 27 of them
    for (const Spinor& out : agg.values)
        for (int c = 0; c < 4; ++c) CHECK(out[c] == expected_scale * v[c]);
}

TEST_CASE("fiber derivatives are exact on linear fields") {
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {3, 1, 1, 1});
    const BaseGrid base =
        make_uniform_base_grid({0.0, -0.25, 0.0, 0.0}, {1.0, 0.25, 1.0, 1.0}, {1, 3, 1, 1});
    const Spinor psi0{{cplx(1.0), cplx(0.5, 0.5), cplx(-0.25), cplx(0.0, 2.0)}};
    FiberSpinorField f = make_fiber_field(st, base);
    for_each_index(st, [&](const std::array<int, 4>& x_idx) {
        const double t = st.coordinate(0, x_idx[0]);
        for_each_base_index(base, [&](const std::array<int, 4>& d_idx) {
            const double l1 = base.coordinate(1, d_idx[1]);
            f.at(x_idx, d_idx) = (2.0 * t + 3.0 * l1) * psi0;
        });
    });
    const FiberSpinorField dt = fiber_spacetime_derivative(f, 0);
    const FiberSpinorField dl = fiber_base_derivative(f, 1);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        CHECK((dt.values[i] - 2.0 * psi0).max_abs() <= 1e-13);
        CHECK((dl.values[i] - 3.0 * psi0).max_abs() <= 1e-13);
    }
}

TEST_CASE("fiber derivatives reject two-sample axes") {
    const ChartGrid st = two_times();
    const BaseGrid base =
        make_uniform_base_grid({0.0, 0.0, 0.0, 0.0}, {1.0, 0.5, 1.0, 1.0}, {1, 2, 1, 1});
    const FiberSpinorField f = make_fiber_field(st, base);
    CHECK_THROWS_AS(fiber_spacetime_derivative(f, 0), StencilError);
    CHECK_THROWS_AS(fiber_base_derivative(f, 1), StencilError);
}
