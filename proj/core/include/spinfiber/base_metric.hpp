#pragma once

#include <array>
#include <cmath>

#include "spinfiber/mat4.hpp"

namespace spinfiber {

/// Nondegenerate diagonal metric stored as a sign pattern plus log magnitudes.
/// The k-th diagonal entry is signs[k] * exp(log_abs[k]), so it can never be
/// zero and dilatations act on log_abs by exact componentwise addition.
struct DiagonalMetric {
    std::array<int, 4> signs = {+1, -1, -1, -1};
    std::array<double, 4> log_abs{};

    double entry(int k) const {
        return static_cast<double>(signs[static_cast<std::size_t>(k)]) *
               std::exp(log_abs[static_cast<std::size_t>(k)]);
    }

    std::array<double, 4> entries() const {
        return {entry(0), entry(1), entry(2), entry(3)};
    }

    Mat4 matrix() const { return Mat4::diagonal(entries()); }

    bool lorentz_signature() const {
        return signs[0] == +1 && signs[1] == -1 && signs[2] == -1 && signs[3] == -1;
    }

    friend bool operator==(const DiagonalMetric&, const DiagonalMetric&) = default;
};

/// Translation over the base in the log chart.
struct BaseShift {
    std::array<double, 4> delta{};

    double operator[](int k) const { return delta[static_cast<std::size_t>(k)]; }

    friend BaseShift operator+(const BaseShift& a, const BaseShift& b) {
        BaseShift r;
        for (std::size_t k = 0; k < 4; ++k) r.delta[k] = a.delta[k] + b.delta[k];
        return r;
    }

    friend bool operator==(const BaseShift&, const BaseShift&) = default;
};

/// Splits raw diagonal entries into signs and log magnitudes.
/// Throws DegenerateMetricError when an entry is zero or not finite.
DiagonalMetric metric_from_entries(double d0, double d1, double d2, double d3);

/// The flat metric diag(1,-1,-1,-1).
DiagonalMetric minkowski();

/// Componentwise translation in the log chart; signs are untouched.
DiagonalMetric shift(const DiagonalMetric& d, const BaseShift& delta);

/// T * diag(d) * T^T. Throws SingularTransformError when T is singular.
Mat4 congruence(const DiagonalMetric& d, const Mat4& t);

} // namespace spinfiber
