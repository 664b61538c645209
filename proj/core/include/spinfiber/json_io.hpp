#pragma once

#include <string>

#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/decompose.hpp"
#include "spinfiber/fiber.hpp"
#include "spinfiber/geometry.hpp"

namespace spinfiber::io {

// All serializers emit compact JSON with shortest-round-trip doubles, so
// identical values always produce identical text. Parsers throw ParseError on
// malformed documents or mismatched shapes.

std::string metric_to_json(const DiagonalMetric& d);
std::string mat4_to_json(const Mat4& m);
std::string mat4c_to_json(const Mat4c& m);
std::string spinor_to_json(const Spinor& s);
std::string base_shift_to_json(const BaseShift& delta);
std::string factorization_to_json(const IsometryFactorization& f);
std::string grid_to_json(const ChartGrid& grid);
std::string mat4_field_to_json(const GridField<Mat4>& field);
std::string vec4_field_to_json(const GridField<Vec4>& field);
std::string spinor_field_to_json(const GridField<Spinor>& field);
std::string connection_field_to_json(const SpinConnectionField& field);
std::string fiber_field_to_json(const FiberSpinorField& field);

DiagonalMetric metric_from_json(const std::string& text);
Mat4 mat4_from_json(const std::string& text);
BaseShift base_shift_from_json(const std::string& text);
IsometryFactorization factorization_from_json(const std::string& text);
ChartGrid grid_from_json(const std::string& text);
GridField<Mat4> mat4_field_from_json(const std::string& text);
GridField<Vec4> vec4_field_from_json(const std::string& text);
FiberSpinorField fiber_field_from_json(const std::string& text);

/// Constant-frame motion: x maps to x + translation.
struct MotionData {
    Mat4 frame;
    Vec4 translation;
};
std::string motion_to_json(const MotionData& m);
MotionData motion_from_json(const std::string& text);
MotionSpec to_motion_spec(const MotionData& m);

/// Throws ParseError when the file cannot be read.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace spinfiber::io
