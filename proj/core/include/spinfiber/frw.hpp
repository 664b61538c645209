#pragma once

#include <utility>

#include "spinfiber/fiber.hpp"
#include "spinfiber/geometry.hpp"

namespace spinfiber {

/// Positive scale factor R(t) in closed form, with its derivative.
struct ScaleFactor {
    enum class Kind { Exponential, Power, Constant };

    Kind kind = Kind::Constant;
    double param = 1.0;

    double value(double t) const;
    double derivative(double t) const;
    /// Ratio of the derivative to the value; finite wherever R > 0.
    double hubble(double t) const { return derivative(t) / value(t); }

    static ScaleFactor exponential(double h) { return {Kind::Exponential, h}; }
    static ScaleFactor power(double p) { return {Kind::Power, p}; }
    static ScaleFactor constant(double c);
};

/// Homogeneous cosmological tetrad e^0 = dt, e^i = R(t) dx^i with the inverse
/// coordinate metric diag(1, -1/R^2, -1/R^2, -1/R^2). Throws ScaleFactorError
/// when R is not positive somewhere on the grid's time axis.
std::pair<TetradField, CoordinateMetricField> frw_tetrad(const ScaleFactor& r,
                                                         const ChartGrid& grid);

/// R(t2) / R(t1).
double frw_dilation_ratio(const ScaleFactor& r, double t1, double t2);

/// (0, 2 ln r, 2 ln r, 2 ln r): metric entries scale as r^2 under the frame
/// dilatation by r.
BaseShift frw_base_shift(const ScaleFactor& r, double t1, double t2);

/// Time translation by t2 - t1 with the constant frame dilatation
/// diag(1, r, r, r).
MotionSpec frw_motion(const ScaleFactor& r, double t1, double t2);

/// Derivative along the time direction plus the three spatial base
/// directions of the log chart: d/dt + d/dl_1 + d/dl_2 + d/dl_3.
FiberSpinorField frw_lie_operator(const FiberSpinorField& field);

} // namespace spinfiber
