#include "spinfiber/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spinfiber/errors.hpp"

namespace spinfiber::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail("malformed JSON document");
    return j;
}

double as_number(const json& j, const char* what) {
    if (!j.is_number()) fail(std::string(what) + ": expected a number");
    return j.get<double>();
}

const json& member(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) fail(std::string("missing field \"") + name + "\"");
    return j.at(name);
}

const json& element(const json& j, std::size_t i, std::size_t expected, const char* what) {
    if (!j.is_array() || j.size() != expected)
        fail(std::string(what) + ": expected an array of " + std::to_string(expected));
    return j.at(i);
}

json mat4_to_value(const Mat4& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat4 mat4_from_value(const json& j) {
    Mat4 m;
    for (std::size_t r = 0; r < 4; ++r) {
        const json& row = element(j, r, 4, "matrix");
        for (std::size_t c = 0; c < 4; ++c)
            m(static_cast<int>(r), static_cast<int>(c)) =
                as_number(element(row, c, 4, "matrix row"), "matrix entry");
    }
    return m;
}

json cplx_to_value(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_value(const json& j) {
    return cplx(as_number(element(j, 0, 2, "complex"), "real part"),
                as_number(element(j, 1, 2, "complex"), "imaginary part"));
}

json mat4c_to_value(const Mat4c& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) row.push_back(cplx_to_value(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json spinor_to_value(const Spinor& s) {
    json arr = json::array();
    for (int i = 0; i < 4; ++i) arr.push_back(cplx_to_value(s[i]));
    return arr;
}

Spinor spinor_from_value(const json& j) {
    Spinor s;
    for (std::size_t i = 0; i < 4; ++i)
        s[static_cast<int>(i)] = cplx_from_value(element(j, i, 4, "spinor"));
    return s;
}

json vec4_to_value(const Vec4& v) {
    json arr = json::array();
    for (int i = 0; i < 4; ++i) arr.push_back(v[i]);
    return arr;
}

Vec4 vec4_from_value(const json& j, const char* what) {
    Vec4 v;
    for (std::size_t i = 0; i < 4; ++i)
        v[static_cast<int>(i)] = as_number(element(j, i, 4, what), what);
    return v;
}

json metric_to_value(const DiagonalMetric& d) {
    json j;
    j["signs"] = d.signs;
    j["log_abs"] = d.log_abs;
    return j;
}

DiagonalMetric metric_from_value(const json& j) {
    DiagonalMetric d;
    const json& signs = member(j, "signs");
    const json& logs = member(j, "log_abs");
    for (std::size_t k = 0; k < 4; ++k) {
        const double s = as_number(element(signs, k, 4, "signs"), "sign");
        if (s != 1.0 && s != -1.0) fail("metric signs must be +1 or -1");
        d.signs[k] = s > 0.0 ? +1 : -1;
        d.log_abs[k] = as_number(element(logs, k, 4, "log_abs"), "log_abs");
    }
    return d;
}

json axes_to_value(const std::array<std::vector<double>, 4>& axes) {
    json j = json::array();
    for (const auto& ax : axes) j.push_back(ax);
    return j;
}

std::array<std::vector<double>, 4> axes_from_value(const json& j) {
    if (!j.is_array() || j.size() != 4) fail("axes: expected an array of 4 axes");
    std::array<std::vector<double>, 4> axes;
    for (std::size_t a = 0; a < 4; ++a) {
        const json& ax = j.at(a);
        if (!ax.is_array() || ax.empty()) fail("axis: expected a nonempty array");
        axes[a].reserve(ax.size());
        for (const json& x : ax) axes[a].push_back(as_number(x, "axis coordinate"));
    }
    return axes;
}

json grid_to_value(const ChartGrid& grid) {
    json j;
    j["axes"] = axes_to_value(grid.axes);
    return j;
}

ChartGrid grid_from_value(const json& j) {
    return make_chart_grid(axes_from_value(member(j, "axes")));
}

/// Builds the per-point payloads of a grid field nested by the four axes, in
/// axis-major order.
template <class Leaf>
json nest_grid_values(const ChartGrid& grid, Leaf&& leaf) {
    std::array<int, 4> idx{};
    json l0 = json::array();
    for (idx[0] = 0; idx[0] < grid.extent(0); ++idx[0]) {
        json l1 = json::array();
        for (idx[1] = 0; idx[1] < grid.extent(1); ++idx[1]) {
            json l2 = json::array();
            for (idx[2] = 0; idx[2] < grid.extent(2); ++idx[2]) {
                json l3 = json::array();
                for (idx[3] = 0; idx[3] < grid.extent(3); ++idx[3]) l3.push_back(leaf(idx));
                l2.push_back(std::move(l3));
            }
            l1.push_back(std::move(l2));
        }
        l0.push_back(std::move(l1));
    }
    return l0;
}

template <class Leaf>
void walk_grid_values(const ChartGrid& grid, const json& values, Leaf&& leaf) {
    std::array<int, 4> idx{};
    if (!values.is_array() || values.size() != static_cast<std::size_t>(grid.extent(0)))
        fail("values: shape does not match the grid");
    for (idx[0] = 0; idx[0] < grid.extent(0); ++idx[0]) {
        const json& l1 = values.at(static_cast<std::size_t>(idx[0]));
        if (!l1.is_array() || l1.size() != static_cast<std::size_t>(grid.extent(1)))
            fail("values: shape does not match the grid");
        for (idx[1] = 0; idx[1] < grid.extent(1); ++idx[1]) {
            const json& l2 = l1.at(static_cast<std::size_t>(idx[1]));
            if (!l2.is_array() || l2.size() != static_cast<std::size_t>(grid.extent(2)))
                fail("values: shape does not match the grid");
            for (idx[2] = 0; idx[2] < grid.extent(2); ++idx[2]) {
                const json& l3 = l2.at(static_cast<std::size_t>(idx[2]));
                if (!l3.is_array() || l3.size() != static_cast<std::size_t>(grid.extent(3)))
                    fail("values: shape does not match the grid");
                for (idx[3] = 0; idx[3] < grid.extent(3); ++idx[3])
                    leaf(idx, l3.at(static_cast<std::size_t>(idx[3])));
            }
        }
    }
}

json base_grid_to_value(const BaseGrid& base) {
    json j;
    j["log_abs_axes"] = axes_to_value(base.log_abs_axes);
    j["signs"] = base.signs;
    return j;
}

BaseGrid base_grid_from_value(const json& j) {
    auto axes = axes_from_value(member(j, "log_abs_axes"));
    std::array<int, 4> signs{};
    const json& s = member(j, "signs");
    for (std::size_t k = 0; k < 4; ++k) {
        const double v = as_number(element(s, k, 4, "signs"), "sign");
        if (v != 1.0 && v != -1.0) fail("base grid signs must be +1 or -1");
        signs[k] = v > 0.0 ? +1 : -1;
    }
    return make_base_grid(std::move(axes), signs);
}

std::string dump(const json& j) { return j.dump(); }

} // namespace

std::string metric_to_json(const DiagonalMetric& d) { return dump(metric_to_value(d)); }

std::string mat4_to_json(const Mat4& m) {
    json j;
    j["rows"] = mat4_to_value(m);
    return dump(j);
}

std::string mat4c_to_json(const Mat4c& m) {
    json j;
    j["rows"] = mat4c_to_value(m);
    return dump(j);
}
std::string spinor_to_json(const Spinor& s) { return dump(spinor_to_value(s)); }

std::string base_shift_to_json(const BaseShift& delta) {
    json j = json::array();
    for (double x : delta.delta) j.push_back(x);
    return dump(j);
}

std::string factorization_to_json(const IsometryFactorization& f) {
    json j;
    j["V"] = mat4_to_value(f.V);
    j["Delta"] = mat4_to_value(f.Delta);
    j["U"] = mat4_to_value(f.U);
    j["source"] = metric_to_value(f.source);
    j["target"] = metric_to_value(f.target);
    j["baseShift"] = f.baseShift.delta;
    return dump(j);
}

std::string grid_to_json(const ChartGrid& grid) { return dump(grid_to_value(grid)); }

std::string mat4_field_to_json(const GridField<Mat4>& field) {
    json j;
    j["grid"] = grid_to_value(field.grid);
    j["values"] =
        nest_grid_values(field.grid, [&](const std::array<int, 4>& idx) { return mat4_to_value(field.at(idx)); });
    return dump(j);
}

std::string vec4_field_to_json(const GridField<Vec4>& field) {
    json j;
    j["grid"] = grid_to_value(field.grid);
    j["values"] =
        nest_grid_values(field.grid, [&](const std::array<int, 4>& idx) { return vec4_to_value(field.at(idx)); });
    return dump(j);
}

std::string spinor_field_to_json(const GridField<Spinor>& field) {
    json j;
    j["grid"] = grid_to_value(field.grid);
    j["values"] =
        nest_grid_values(field.grid, [&](const std::array<int, 4>& idx) { return spinor_to_value(field.at(idx)); });
    return dump(j);
}

std::string connection_field_to_json(const SpinConnectionField& field) {
    json j;
    j["grid"] = grid_to_value(field.grid);
    j["values"] = nest_grid_values(field.grid, [&](const std::array<int, 4>& idx) {
        json per_direction = json::array();
        for (int nu = 0; nu < 4; ++nu) per_direction.push_back(mat4_to_value(field.at(idx)[nu]));
        return per_direction;
    });
    return dump(j);
}

std::string fiber_field_to_json(const FiberSpinorField& field) {
    json j;
    j["spacetime_grid"] = grid_to_value(field.spacetime);
    j["base_grid"] = base_grid_to_value(field.base);
    j["values"] = nest_grid_values(field.spacetime, [&](const std::array<int, 4>& x_idx) {
        json b0 = json::array();
        std::array<int, 4> d{};
        for (d[0] = 0; d[0] < field.base.extent(0); ++d[0]) {
            json b1 = json::array();
            for (d[1] = 0; d[1] < field.base.extent(1); ++d[1]) {
                json b2 = json::array();
                for (d[2] = 0; d[2] < field.base.extent(2); ++d[2]) {
                    json b3 = json::array();
                    for (d[3] = 0; d[3] < field.base.extent(3); ++d[3])
                        b3.push_back(spinor_to_value(field.at(x_idx, d)));
                    b2.push_back(std::move(b3));
                }
                b1.push_back(std::move(b2));
            }
            b0.push_back(std::move(b1));
        }
        return b0;
    });
    return dump(j);
}

DiagonalMetric metric_from_json(const std::string& text) { return metric_from_value(parse(text)); }

Mat4 mat4_from_json(const std::string& text) {
    const json j = parse(text);
    // Standalone matrix files carry the rows under a "rows" key; a bare
    // nested array is accepted as well.
    return mat4_from_value(j.is_object() ? member(j, "rows") : j);
}

BaseShift base_shift_from_json(const std::string& text) {
    const json j = parse(text);
    BaseShift delta;
    for (std::size_t k = 0; k < 4; ++k)
        delta.delta[k] = as_number(element(j, k, 4, "base shift"), "base shift entry");
    return delta;
}

IsometryFactorization factorization_from_json(const std::string& text) {
    const json j = parse(text);
    IsometryFactorization f;
    f.V = mat4_from_value(member(j, "V"));
    f.Delta = mat4_from_value(member(j, "Delta"));
    f.U = mat4_from_value(member(j, "U"));
    f.source = metric_from_value(member(j, "source"));
    f.target = metric_from_value(member(j, "target"));
    const json& shift = member(j, "baseShift");
    for (std::size_t k = 0; k < 4; ++k)
        f.baseShift.delta[k] = as_number(element(shift, k, 4, "baseShift"), "baseShift entry");
    return f;
}

ChartGrid grid_from_json(const std::string& text) { return grid_from_value(parse(text)); }

GridField<Mat4> mat4_field_from_json(const std::string& text) {
    const json j = parse(text);
    GridField<Mat4> field = make_field<Mat4>(grid_from_value(member(j, "grid")));
    walk_grid_values(field.grid, member(j, "values"),
                     [&](const std::array<int, 4>& idx, const json& v) { field.at(idx) = mat4_from_value(v); });
    return field;
}

GridField<Vec4> vec4_field_from_json(const std::string& text) {
    const json j = parse(text);
    GridField<Vec4> field = make_field<Vec4>(grid_from_value(member(j, "grid")));
    walk_grid_values(field.grid, member(j, "values"), [&](const std::array<int, 4>& idx, const json& v) {
        field.at(idx) = vec4_from_value(v, "vector sample");
    });
    return field;
}

FiberSpinorField fiber_field_from_json(const std::string& text) {
    const json j = parse(text);
    const ChartGrid spacetime =
        make_chart_grid(axes_from_value(member(member(j, "spacetime_grid"), "axes")));
    const BaseGrid base = base_grid_from_value(member(j, "base_grid"));
    FiberSpinorField field = make_fiber_field(spacetime, base);
    walk_grid_values(spacetime, member(j, "values"), [&](const std::array<int, 4>& x_idx, const json& bv) {
        std::array<int, 4> d{};
        const json* level = &bv;
        // walk the four base axes
        if (!level->is_array() || level->size() != static_cast<std::size_t>(base.extent(0)))
            fail("values: base shape does not match the base grid");
        for (d[0] = 0; d[0] < base.extent(0); ++d[0]) {
            const json& b1 = level->at(static_cast<std::size_t>(d[0]));
            if (!b1.is_array() || b1.size() != static_cast<std::size_t>(base.extent(1)))
                fail("values: base shape does not match the base grid");
            for (d[1] = 0; d[1] < base.extent(1); ++d[1]) {
                const json& b2 = b1.at(static_cast<std::size_t>(d[1]));
                if (!b2.is_array() || b2.size() != static_cast<std::size_t>(base.extent(2)))
                    fail("values: base shape does not match the base grid");
                for (d[2] = 0; d[2] < base.extent(2); ++d[2]) {
                    const json& b3 = b2.at(static_cast<std::size_t>(d[2]));
                    if (!b3.is_array() || b3.size() != static_cast<std::size_t>(base.extent(3)))
                        fail("values: base shape does not match the base grid");
                    for (d[3] = 0; d[3] < base.extent(3); ++d[3])
                        field.at(x_idx, d) = spinor_from_value(b3.at(static_cast<std::size_t>(d[3])));
                }
            }
        }
    });
    return field;
}

std::string motion_to_json(const MotionData& m) {
    json j;
    j["frame"] = mat4_to_value(m.frame);
    j["translation"] = vec4_to_value(m.translation);
    return dump(j);
}

MotionData motion_from_json(const std::string& text) {
    const json j = parse(text);
    MotionData m;
    m.frame = mat4_from_value(member(j, "frame"));
    m.translation = vec4_from_value(member(j, "translation"), "translation");
    return m;
}

MotionSpec to_motion_spec(const MotionData& m) {
    MotionSpec spec;
    const Vec4 shift = m.translation;
    spec.map = [shift](const Vec4& x) { return x + shift; };
    const Mat4 frame = m.frame;
    spec.frame = [frame](const Vec4&) { return frame; };
    return spec;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << content;
    if (!out) throw ParseError("failed writing file: " + path);
}

} // namespace spinfiber::io
