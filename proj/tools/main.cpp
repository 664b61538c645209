#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "checks.hpp"
#include "spinfiber/base_metric.hpp"
#include "spinfiber/clifford.hpp"
#include "spinfiber/decompose.hpp"
#include "spinfiber/errors.hpp"
#include "spinfiber/fiber.hpp"
#include "spinfiber/frw.hpp"
#include "spinfiber/geometry.hpp"
#include "spinfiber/json_io.hpp"
#include "spinfiber/mat4.hpp"
#include "spinfiber/parallel.hpp"
#include "spinfiber/spinlift.hpp"
#include "spinfiber/tolerances.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;
using namespace spinfiber;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double parse_double(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw UsageError(what + ": not a number: " + text);
    return v;
}

/// Tolerance resolution order: built-in default, then SPINFIBER_TOL, then
/// --tol, then --tol-<name>.
struct TolOverrides {
    std::optional<double> global;
    std::map<std::string, double> named;

    double resolve(const std::string& name, double fallback) const {
        const auto it = named.find(name);
        if (it != named.end()) return it->second;
        if (global) return *global;
        return fallback;
    }
};

struct ResidualRow {
    std::string name;
    double value;
    double def_tol;
};

/// Reads input files while recording their content digests for the report.
struct Inputs {
    std::vector<std::pair<std::string, std::string>> digests;

    std::string load(const std::string& label, const std::string& path) {
        std::string text = io::read_text_file(path);
        digests.emplace_back(label, fnv1a_digest(text));
        return text;
    }
};

int emit_report(const std::string& command, const Inputs& inputs,
                const std::vector<ResidualRow>& rows, const TolOverrides& tols, json payload,
                const Clock::time_point& start) {
    json residuals = json::object();
    json tolerances = json::object();
    bool ok = true;
    for (const auto& row : rows) {
        const double tol = tols.resolve(row.name, row.def_tol);
        residuals[row.name] = row.value;
        tolerances[row.name] = tol;
        if (!(row.value <= tol)) ok = false;
    }

    const double wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    json report;
    report["command"] = command;
    json in = json::object();
    for (const auto& [label, digest] : inputs.digests) in[label] = digest;
    report["inputs"] = in;
    report["residuals"] = residuals;
    report["tolerances_used"] = tolerances;
    report["status"] = ok ? "pass" : "fail";
    report["payload"] = std::move(payload);
    report["metadata"] = json{{"wall_ms", wall_ms}};
    std::cout << report.dump(2) << "\n";

    std::fprintf(stderr, "%s: %s\n", command.c_str(), ok ? "pass" : "FAIL");
    for (const auto& row : rows)
        std::fprintf(stderr, "  %-24s %.17g (tol %.17g)\n", row.name.c_str(), row.value,
                     tols.resolve(row.name, row.def_tol));
    std::fprintf(stderr, "  wall: %.1f ms\n", wall_ms);
    return ok ? 0 : 1;
}

int emit_error(const std::string& command, const std::string& message) {
    json report;
    report["command"] = command;
    report["status"] = "error";
    report["error"] = message;
    std::cout << report.dump(2) << "\n";
    std::fprintf(stderr, "%s: error: %s\n", command.c_str(), message.c_str());
    return 2;
}

struct Options {
    std::string metric_file;
    std::string transform_file;
    std::string isometry_file;
    std::string tetrad_file;
    std::string inverse_metric_file;
    std::string vector_file;
    std::string field_file;
    std::string motion_file;
    std::string out_file;
    std::string out_deriv_file;
    std::string scale_kind = "exp";
    double hubble = 0.1;
    double power_exponent = 0.5;
    double constant_scale = 1.0;
    double t1 = 0.0;
    double t2 = 1.0;
    double tol_flag = 0.0;
    int parallel = 0;
};

int run_decompose(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const DiagonalMetric d = io::metric_from_json(in.load("metric", o.metric_file));
    const Mat4 t = io::mat4_from_json(in.load("transform", o.transform_file));
    const IsometryFactorization f = factorize(t, d);

    const double rec = reconstruction_residual(f, t) / std::max(t.frobenius_norm(), 1e-300);
    const double iso = right_isometry_residual(f);
    const double det = std::abs(determinant(f.V) - 1.0);

    json payload = json::parse(io::factorization_to_json(f));
    return emit_report("decompose", in,
                       {{"reconstruction_rel", rec, tol::factorization},
                        {"right_isometry", iso, tol::factorization},
                        {"det_v", det, 1e-12}},
                       tols, std::move(payload), start);
}

int run_gamma(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const DiagonalMetric d = io::metric_from_json(in.load("metric", o.metric_file));
    const GammaRep rep = deformed_gammas(d);

    json payload;
    payload["metric"] = json::parse(io::metric_to_json(d));
    json gammas = json::array();
    for (int k = 0; k < 4; ++k) gammas.push_back(json::parse(io::mat4c_to_json(rep.gammas[static_cast<std::size_t>(k)])));
    payload["gammas"] = std::move(gammas);

    return emit_report("gamma", in,
                       {{"closure", anticommutator_residual(rep), tol::anticommutator}}, tols,
                       std::move(payload), start);
}

int run_lift(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const DiagonalMetric d = io::metric_from_json(in.load("metric", o.metric_file));
    const Mat4 l = io::mat4_from_json(in.load("isometry", o.isometry_file));
    const SpinLift s = lift_isometry(l, d);
    const GammaRep rep = deformed_gammas(d);

    const double inter = intertwining_residual(s.matrix, l, rep);
    const double iso = (congruence(d, l) - d.matrix()).max_abs();

    json payload;
    payload["metric"] = json::parse(io::metric_to_json(d));
    payload["lift"] = json::parse(io::mat4c_to_json(s.matrix));
    return emit_report("lift", in,
                       {{"intertwining", inter, tol::intertwining},
                        {"isometry", iso, tol::isometry_check}},
                       tols, std::move(payload), start);
}

int run_connection(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const GridField<Mat4> e = io::mat4_field_from_json(in.load("tetrad", o.tetrad_file));
    const SpinConnectionField omega = spin_connection(e);

    std::vector<ResidualRow> rows;
    json payload;
    payload["connection"] = json::parse(io::connection_field_to_json(omega));
    if (!o.inverse_metric_file.empty()) {
        const GridField<Mat4> g =
            io::mat4_field_from_json(in.load("inverse_metric", o.inverse_metric_file));
        const OrthonormalityReport report = check_orthonormality(e, g);
        rows.push_back({"orthonormality", report.max_residual, tol::orthonormality});
        payload["orthonormality_flagged"] = report.flagged.size();
    }
    return emit_report("connection", in, rows, tols, std::move(payload), start);
}

int run_lie(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const GridField<Mat4> e = io::mat4_field_from_json(in.load("tetrad", o.tetrad_file));
    const GridField<Vec4> zeta = io::vec4_field_from_json(in.load("vector", o.vector_file));
    const TetradField result = lie_derivative_tetrad(e, zeta);

    json payload;
    payload["lie_derivative"] = json::parse(io::mat4_field_to_json(result));
    return emit_report("lie", in, {}, tols, std::move(payload), start);
}

int run_transport(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const FiberSpinorField field = io::fiber_field_from_json(in.load("field", o.field_file));
    const io::MotionData motion = io::motion_from_json(in.load("motion", o.motion_file));
    const DiagonalMetric d0 = io::metric_from_json(in.load("metric", o.metric_file));

    const FiberSpinorField moved = transport(field, io::to_motion_spec(motion), d0);

    json payload;
    payload["total_norm_source"] = total_norm(field);
    payload["total_norm_result"] = total_norm(moved);
    const std::string moved_json = io::fiber_field_to_json(moved);
    if (!o.out_file.empty()) {
        io::write_text_file(o.out_file, moved_json);
        payload["out"] = o.out_file;
    } else {
        payload["result"] = json::parse(moved_json);
    }
    return emit_report("transport", in, {}, tols, std::move(payload), start);
}

int run_aggregate(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const FiberSpinorField field = io::fiber_field_from_json(in.load("field", o.field_file));
    const GridField<Spinor> agg = aggregate(field);

    json payload;
    payload["aggregate"] = json::parse(io::spinor_field_to_json(agg));
    payload["total_norm"] = total_norm(field);
    return emit_report("aggregate", in, {}, tols, std::move(payload), start);
}

ScaleFactor make_scale(const Options& o) {
    if (o.scale_kind == "exp") return ScaleFactor::exponential(o.hubble);
    if (o.scale_kind == "power") return ScaleFactor::power(o.power_exponent);
    if (o.scale_kind == "const") return ScaleFactor::constant(o.constant_scale);
    throw UsageError("unknown scale kind: " + o.scale_kind);
}

int run_lie_frw(const Options& o, const TolOverrides& tols) {
    const auto start = Clock::now();
    Inputs in;
    const ScaleFactor scale = make_scale(o);
    const FiberSpinorField field = io::fiber_field_from_json(in.load("field", o.field_file));

    const FiberSpinorField deriv = frw_lie_operator(field);

    // Snap t2 to the time lattice, then verify the induced base shift sits on
    // the base lattice; transport only proceeds when both residuals pass.
    const double dt = o.t2 - o.t1;
    const double ht = field.spacetime.spacing(0);
    double t2_snapped = o.t1;
    double time_align = std::abs(dt);
    if (ht > 0.0) {
        const auto steps = static_cast<double>(std::llround(dt / ht));
        t2_snapped = o.t1 + steps * ht;
        time_align = std::abs(dt - steps * ht);
    }
    const BaseShift delta = frw_base_shift(scale, o.t1, t2_snapped);
    double base_align = 0.0;
    for (int a = 1; a < 4; ++a) {
        const double s = field.base.spacing(a);
        const double d = delta[a];
        if (s > 0.0) {
            const auto cells = static_cast<double>(std::llround(d / s));
            base_align = std::max(base_align, std::abs(d - cells * s));
        } else {
            base_align = std::max(base_align, std::abs(d));
        }
    }

    const double time_tol = tols.resolve("time_alignment", tol::lattice_alignment);
    const double base_tol = tols.resolve("base_alignment", tol::lattice_alignment);

    json payload;
    payload["t2_snapped"] = t2_snapped;
    payload["base_shift"] = json::parse(io::base_shift_to_json(delta));
    if (time_align <= time_tol && base_align <= base_tol) {
        const FiberSpinorField moved =
            transport(field, frw_motion(scale, o.t1, t2_snapped), minkowski());
        const std::string moved_json = io::fiber_field_to_json(moved);
        if (!o.out_file.empty()) {
            io::write_text_file(o.out_file, moved_json);
            payload["transported"] = o.out_file;
        } else {
            payload["transported"] = json::parse(moved_json);
        }
    } else {
        payload["transported"] = nullptr;
    }

    const std::string deriv_json = io::fiber_field_to_json(deriv);
    if (!o.out_deriv_file.empty()) {
        io::write_text_file(o.out_deriv_file, deriv_json);
        payload["derivative"] = o.out_deriv_file;
    } else {
        payload["derivative"] = json::parse(deriv_json);
    }

    return emit_report("lie-frw", in,
                       {{"time_alignment", time_align, tol::lattice_alignment},
                        {"base_alignment", base_align, tol::lattice_alignment}},
                       tols, std::move(payload), start);
}

int run_selftest(const TolOverrides& tols) {
    const auto start = Clock::now();
    const std::vector<checks::CheckResult> results = checks::run_all_checks();
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();

    std::vector<ResidualRow> rows;
    json summary = json::array();
    json walls = json::object();
    for (const auto& check : results) {
        for (const auto& r : check.residuals)
            rows.push_back({check.name + "." + r.name, r.value, r.tolerance});
        summary.push_back(json{{"name", check.name}, {"status", check.pass() ? "pass" : "fail"}});
        walls[check.name] = check.wall_ms;
    }
    rows.push_back({"elapsed_s", elapsed, 60.0});

    json payload;
    payload["checks"] = std::move(summary);

    Inputs none;
    const int code = emit_report("selftest", none, rows, tols, std::move(payload), start);
    std::fprintf(stderr, "  per-check wall times (ms): %s\n", walls.dump().c_str());
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spinor fields over spacetime and a base of diagonal metrics: "
                 "frame factorization, gamma deformation, spin lifts, connections, transport"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol", o.tol_flag, "override every tolerance for this run");
        sub->add_option("--parallel", o.parallel, "worker threads for data-parallel passes")
            ->check(CLI::PositiveNumber);
        sub->allow_extras(); // --tol-<name> overrides are scanned after parsing
    };

    CLI::App* decompose =
        app.add_subcommand("decompose", "factor a frame transformation as isometry * dilatation * isometry");
    decompose->add_option("--metric", o.metric_file, "base metric JSON file")->required();
    decompose->add_option("--transform", o.transform_file, "matrix JSON file")->required();
    add_common(decompose);

    CLI::App* gamma = app.add_subcommand("gamma", "gamma matrices deformed to a diagonal metric");
    gamma->add_option("--metric", o.metric_file, "base metric JSON file")->required();
    add_common(gamma);

    CLI::App* lift = app.add_subcommand("lift", "spinor lift of an isometry of a diagonal metric");
    lift->add_option("--metric", o.metric_file, "base metric JSON file")->required();
    lift->add_option("--isometry", o.isometry_file, "matrix JSON file")->required();
    add_common(lift);

    CLI::App* connection = app.add_subcommand("connection", "spin connection of a tetrad field");
    connection->add_option("--tetrad", o.tetrad_file, "tetrad field JSON file")->required();
    connection->add_option("--inverse-metric", o.inverse_metric_file,
                           "inverse coordinate metric field for an orthonormality report");
    add_common(connection);

    CLI::App* lie = app.add_subcommand("lie", "Lie derivative of a tetrad along a sampled vector field");
    lie->add_option("--tetrad", o.tetrad_file, "tetrad field JSON file")->required();
    lie->add_option("--vector", o.vector_file, "vector field JSON file")->required();
    add_common(lie);

    CLI::App* transport_cmd =
        app.add_subcommand("transport", "three-step transport of a fiber spinor field");
    transport_cmd->add_option("--field", o.field_file, "fiber field JSON file")->required();
    transport_cmd->add_option("--motion", o.motion_file, "motion JSON file (frame + translation)")
        ->required();
    transport_cmd->add_option("--metric", o.metric_file, "anchor metric JSON file")->required();
    transport_cmd->add_option("--out", o.out_file, "write the transported field to this path");
    add_common(transport_cmd);

    CLI::App* aggregate_cmd =
        app.add_subcommand("aggregate", "aggregate a fiber spinor field over the base");
    aggregate_cmd->add_option("--field", o.field_file, "fiber field JSON file")->required();
    add_common(aggregate_cmd);

    CLI::App* lie_frw = app.add_subcommand(
        "lie-frw", "expanding-universe transport and first-order operator for a fiber field");
    lie_frw->add_option("--scale", o.scale_kind, "scale factor kind")
        ->check(CLI::IsMember({"exp", "power", "const"}));
    lie_frw->add_option("--H", o.hubble, "expansion rate for --scale exp");
    lie_frw->add_option("--p", o.power_exponent, "exponent for --scale power");
    lie_frw->add_option("--c", o.constant_scale, "value for --scale const");
    lie_frw->add_option("--t1", o.t1, "departure time")->required();
    lie_frw->add_option("--t2", o.t2, "arrival time")->required();
    lie_frw->add_option("--field", o.field_file, "fiber field JSON file")->required();
    lie_frw->add_option("--out", o.out_file, "write the transported field to this path");
    lie_frw->add_option("--out-deriv", o.out_deriv_file, "write the derivative field to this path");
    add_common(lie_frw);

    CLI::App* selftest =
        app.add_subcommand("selftest", "run the built-in invariant suite on fixed fixtures");
    add_common(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return emit_error("usage", e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    try {
        TolOverrides tols;
        if (const char* env = std::getenv("SPINFIBER_TOL"))
            tols.global = parse_double(env, "SPINFIBER_TOL");
        if (sub->count("--tol") > 0) tols.global = o.tol_flag;

        const std::vector<std::string> extras = app.remaining(true);
        for (std::size_t i = 0; i < extras.size(); ++i) {
            const std::string& arg = extras[i];
            if (arg.rfind("--tol-", 0) != 0)
                throw UsageError("unrecognized argument: " + arg);
            const std::string rest = arg.substr(6);
            const auto eq = rest.find('=');
            if (eq != std::string::npos) {
                tols.named[rest.substr(0, eq)] =
                    parse_double(rest.substr(eq + 1), "--tol-" + rest.substr(0, eq));
            } else {
                if (i + 1 >= extras.size())
                    throw UsageError("missing value for --tol-" + rest);
                tols.named[rest] = parse_double(extras[++i], "--tol-" + rest);
            }
        }

        if (o.parallel > 0) par::set_thread_count(o.parallel);

        if (command == "decompose") return run_decompose(o, tols);
        if (command == "gamma") return run_gamma(o, tols);
        if (command == "lift") return run_lift(o, tols);
        if (command == "connection") return run_connection(o, tols);
        if (command == "lie") return run_lie(o, tols);
        if (command == "transport") return run_transport(o, tols);
        if (command == "aggregate") return run_aggregate(o, tols);
        if (command == "lie-frw") return run_lie_frw(o, tols);
        if (command == "selftest") return run_selftest(tols);
        throw UsageError("unknown subcommand: " + command);
    } catch (const UsageError& e) {
        return emit_error(command, e.what());
    } catch (const Error& e) {
        return emit_error(command, e.what());
    } catch (const std::exception& e) {
        return emit_error(command, e.what());
    }
}
