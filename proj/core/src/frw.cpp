#include "spinfiber/frw.hpp"

#include <cmath>

#include "spinfiber/errors.hpp"

namespace spinfiber {

double ScaleFactor::value(double t) const {
    switch (kind) {
        case Kind::Exponential: return std::exp(param * t);
        case Kind::Power: return std::pow(t, param);
        case Kind::Constant: return param;
    }
    return param;
}

double ScaleFactor::derivative(double t) const {
    switch (kind) {
        case Kind::Exponential: return param * std::exp(param * t);
        case Kind::Power: return param * std::pow(t, param - 1.0);
        case Kind::Constant: return 0.0;
    }
    return 0.0;
}

ScaleFactor ScaleFactor::constant(double c) {
    if (!(c > 0.0)) throw ScaleFactorError("constant scale factor must be positive");
    return {Kind::Constant, c};
}

std::pair<TetradField, CoordinateMetricField> frw_tetrad(const ScaleFactor& r,
                                                         const ChartGrid& grid) {
    TetradField e = make_field<Mat4>(grid);
    CoordinateMetricField g = make_field<Mat4>(grid);
    for_each_index(grid, [&](const std::array<int, 4>& idx) {
        const double t = grid.coordinate(0, idx[0]);
        const double scale = r.value(t);
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw ScaleFactorError("scale factor is not positive on the grid");
        const double inv_sq = 1.0 / (scale * scale);
        e.at(idx) = Mat4::diagonal({1.0, scale, scale, scale});
        g.at(idx) = Mat4::diagonal({1.0, -inv_sq, -inv_sq, -inv_sq});
    });
    return {std::move(e), std::move(g)};
}

double frw_dilation_ratio(const ScaleFactor& r, double t1, double t2) {
    const double a = r.value(t1);
    const double b = r.value(t2);
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw ScaleFactorError("scale factor is not positive and finite at an endpoint");
    return b / a;
}

BaseShift frw_base_shift(const ScaleFactor& r, double t1, double t2) {
    const double two_log = 2.0 * std::log(frw_dilation_ratio(r, t1, t2));
    return BaseShift{{0.0, two_log, two_log, two_log}};
}

MotionSpec frw_motion(const ScaleFactor& r, double t1, double t2) {
    const double ratio = frw_dilation_ratio(r, t1, t2);
    const double dt = t2 - t1;
    MotionSpec m;
    m.map = [dt](const Vec4& x) {
        Vec4 y = x;
        y[0] += dt;
        return y;
    };
    const Mat4 frame = Mat4::diagonal({1.0, ratio, ratio, ratio});
    m.frame = [frame](const Vec4&) { return frame; };
    return m;
}

FiberSpinorField frw_lie_operator(const FiberSpinorField& field) {
    FiberSpinorField out = fiber_spacetime_derivative(field, 0);
    for (int axis = 1; axis < 4; ++axis) {
        const FiberSpinorField part = fiber_base_derivative(field, axis);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = out.values[i] + part.values[i];
    }
    return out;
}

} // namespace spinfiber
