#include <benchmark/benchmark.h>

#include <cmath>

#include "spinfiber/base_metric.hpp"
#include "spinfiber/decompose.hpp"
#include "spinfiber/fiber.hpp"
#include "spinfiber/mat4.hpp"
#include "spinfiber/sampling.hpp"
#include "spinfiber/spinlift.hpp"

using namespace spinfiber;

namespace {

Mat4 near_identity_frame() {
    sample::Rng rng(20260816);
    return sample::random_near_identity(rng, 0.2);
}

} // namespace

static void bm_mat_exp(benchmark::State& state) {
    sample::Rng rng(1);
    const DiagonalMetric d = sample::random_metric(rng);
    const Mat4 g = sample::random_isometry_generator(rng, d);
    for (auto _ : state) benchmark::DoNotOptimize(mat_exp(g));
}
BENCHMARK(bm_mat_exp);

static void bm_mat_log(benchmark::State& state) {
    const Mat4 t = near_identity_frame();
    for (auto _ : state) benchmark::DoNotOptimize(mat_log(t));
}
BENCHMARK(bm_mat_log);

static void bm_eig_sym4(benchmark::State& state) {
    const Mat4 t = near_identity_frame();
    const Mat4 s = congruence(minkowski(), t);
    for (auto _ : state) benchmark::DoNotOptimize(eig_sym4(s));
}
BENCHMARK(bm_eig_sym4);

static void bm_factorize(benchmark::State& state) {
    const Mat4 t = near_identity_frame();
    for (auto _ : state) benchmark::DoNotOptimize(factorize(t, minkowski()));
}
BENCHMARK(bm_factorize);

static void bm_lift_isometry(benchmark::State& state) {
    sample::Rng rng(2);
    const DiagonalMetric d = sample::random_metric(rng);
    const Mat4 iso = mat_exp(0.5 * sample::random_isometry_generator(rng, d));
    for (auto _ : state) benchmark::DoNotOptimize(lift_isometry(iso, d));
}
BENCHMARK(bm_lift_isometry);

static void bm_transport(benchmark::State& state) {
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {3, 1, 1, 1});
    const double s = 0.5 * std::log(4.0);
    const BaseGrid base =
        make_uniform_base_grid({0.0, -2.0 * s, -2.0 * s, -2.0 * s}, {1.0, s, s, s}, {1, 5, 5, 5});
    FiberSpinorField field = make_fiber_field(st, base);
    sample::Rng rng(3);
    // The motion shifts support by two cells per spatial axis, so only fill
    // cells whose image stays on the grid.
    for_each_index(st, [&](const std::array<int, 4>& x_idx) {
        for (int i1 = 0; i1 <= 2; ++i1)
            for (int i2 = 0; i2 <= 2; ++i2)
                for (int i3 = 0; i3 <= 2; ++i3)
                    field.at(x_idx, {0, i1, i2, i3}) = sample::random_spinor(rng);
    });
    MotionSpec motion;
    motion.map = [](const Vec4& x) { return x; };
    const Mat4 frame = Mat4::diagonal({1.0, 2.0, 2.0, 2.0});
    motion.frame = [frame](const Vec4&) { return frame; };
    for (auto _ : state) benchmark::DoNotOptimize(transport(field, motion, minkowski()));
}
BENCHMARK(bm_transport);

static void bm_total_norm(benchmark::State& state) {
    const ChartGrid st = make_uniform_grid({0, 0, 0, 0}, {0.25, 1, 1, 1}, {4, 1, 1, 1});
    const BaseGrid base =
        make_uniform_base_grid({0.0, -0.5, -0.5, -0.5}, {1.0, 0.25, 0.25, 0.25}, {1, 5, 5, 5});
    FiberSpinorField field = make_fiber_field(st, base);
    sample::Rng rng(4);
    for (auto& v : field.values) v = sample::random_spinor(rng);
    for (auto _ : state) benchmark::DoNotOptimize(total_norm(field));
}
BENCHMARK(bm_total_norm);

BENCHMARK_MAIN();
