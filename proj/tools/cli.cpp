#include "cli.hpp"

#include "fbma/catenoid.hpp"
#include "fbma/error.hpp"
#include "fbma/field_io.hpp"
#include "fbma/mesh_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#ifndef FBMA_VERSION
#define FBMA_VERSION "0.0.0"
#endif

namespace fbma::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "': '" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError("parameter '" + key + "': '" + text + "' is not a number");
    return x;
}

}  // namespace

void Params::declare(const std::string& key, const std::string& value, const std::string& help)
{
    values_[key] = value;
    help_[key] = help;
}

void Params::set(const std::string& key, const std::string& value)
{
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown parameter '" + key + "'");
    it->second = value;
}

void Params::load_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (!known(key)) throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown parameter '" + key + "'");
        set(key, trim(line.substr(eq + 1)));
    }
}

std::string Params::text(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("undeclared parameter '" + key + "'");
    return it->second;
}

double Params::real(const std::string& key) const
{
    const double x = parse_real(key, text(key));
    if (!std::isfinite(x)) throw ConfigError("parameter '" + key + "' must be finite");
    return x;
}

int Params::integer(const std::string& key) const
{
    const std::string t = text(key);
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(t, &used);
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "': '" + t + "' is not an integer");
    }
    if (used != t.size() || v < -1000000000L || v > 1000000000L) {
        throw ConfigError("parameter '" + key + "': '" + t + "' is not an integer");
    }
    return static_cast<int>(v);
}

bool Params::flag(const std::string& key) const
{
    const std::string t = text(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no" || t.empty()) return false;
    throw ConfigError("parameter '" + key + "': '" + t + "' is not a boolean");
}

std::vector<double> Params::reals(const std::string& key) const
{
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(key, item));
    }
    if (out.empty()) throw ConfigError("parameter '" + key + "' is an empty list");
    return out;
}

Json Params::to_json() const
{
    Json j = Json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

std::vector<std::string> commands()
{
    return {"solve-liouville", "rebuild", "certify-sphere", "weierstrass-eval", "diagnose", "pipeline-catenoid", "sweep"};
}

Params command_params(const std::string& cmd)
{
    const CriticalCatenoid cat = critical_catenoid();
    Params p;
    p.declare("out", "fbma_out", "output directory");
    auto grid = [&](const char* n_r, const char* n_theta) {
        p.declare("n_r", n_r, "radial nodes (t = log r)");
        p.declare("n_theta", n_theta, "angular nodes");
    };
    auto newton = [&] {
        p.declare("tol", "1e-10", "Newton residual tolerance (max-norm)");
        p.declare("max_iter", "50", "Newton iteration cap");
        p.declare("initial", "symmetric", "initial guess: symmetric, constant, field");
        p.declare("constant_value", "0", "value of the constant initial guess");
        p.declare("initial_field", "", "CSV of the initial field (initial = field)");
        p.declare("order", "4", "finite-difference order (2 or 4)");
    };
    auto rebuild_tols = [&] {
        p.declare("copies", "2", "periods of the slab lift");
        p.declare("compat_tol", "1e-6", "Gauss-equation residual accepted by frame integration");
        p.declare("unit_tol", "1e-4", "accepted | |c| - 1 | on the boundary curves");
        p.declare("concentric_tol", "1e-4", "distance below which sphere centers coincide");
        p.declare("n_max", "64", "largest piece count tried by the decomposition");
        p.declare("angle_tol", "1e-6", "|N angle - 2 pi k| accepted");
        p.declare("identity_tol", "1e-6", "rotation angle and translation treated as identity");
    };

    if (cmd == "solve-liouville") {
        p.declare("R", format_double(cat.R), "outer radius of A(1, R)");
        p.declare("C0", format_double(cat.C0), "Hopf constant");
        grid("129", "256");
        newton();
    } else if (cmd == "rebuild") {
        p.declare("solution", "", "annulus solution CSV (t,theta,value)");
        p.declare("C0", format_double(cat.C0), "Hopf constant");
        rebuild_tols();
    } else if (cmd == "certify-sphere") {
        p.declare("curve", "", "curve CSV with x,y,z rows");
        p.declare("closed", "true", "curve is closed");
        p.declare("patch", "", "OBJ of a host patch (certifies a level curve)");
        p.declare("lambda", "", "lambda CSV of the patch (default <stem>_lambda.csv)");
        p.declare("row", "0", "level-curve row; negative counts from the end");
        p.declare("rel_tol", "1e-4", "relative tolerance of the spherical criterion");
        p.declare("constancy_tol", "1e-4", "relative deviation of the geodesic curvature");
        p.declare("line_tol", "1e-4", "curvature-line residual relative to max curvature");
        p.declare("flat_threshold", "1e-6", "normal curvature counted as zero");
        p.declare("flat_fraction", "0.05", "allowed fraction of flat nodes");
        p.declare("center_tol", "1e-4", "piece-center agreement relative to the radius");
    } else if (cmd == "weierstrass-eval") {
        p.declare("data", "catenoid", "catenoid, catenoid-slab, enneper, plane");
        p.declare("R", format_double(cat.R), "outer radius of the chart");
        grid("65", "128");
        p.declare("copies", "1", "periods (catenoid-slab)");
    } else if (cmd == "diagnose") {
        p.declare("patch", "", "OBJ of an annulus patch");
        p.declare("lambda", "", "lambda CSV of the patch (default <stem>_lambda.csv)");
        p.declare("hopf", "false", "Hopf differential");
        p.declare("injectivity", "false", "Gauss-map winding differences");
        p.declare("kappa_g", "false", "geodesic curvature from the Gauss map");
        p.declare("conformality_tol", "1e-3", "conformality residual accepted by hopf");
        p.declare("grid", "64", "test-point grid per axis");
    } else if (cmd == "pipeline-catenoid") {
        grid("129", "256");
        newton();
        rebuild_tols();
    } else if (cmd == "sweep") {
        p.declare("R_list", "2,4", "comma-separated radii");
        p.declare("C0_list", "0.25,0.5", "comma-separated Hopf constants");
        grid("65", "128");
        newton();
        rebuild_tols();
    } else {
        throw ConfigError("unknown command '" + cmd + "'");
    }
    return p;
}

Json tolerance_table()
{
    const SolveOptions so;
    const FrameOptions fo;
    const SphereOptions sp;
    const CertifyOptions co;
    const DecomposeOptions dop;
    const HopfOptions ho;
    const InjectivityOptions io;
    return {{"liouville", {{"tol", so.tol}, {"max_iter", so.max_iter}, {"damping_floor", so.damping_floor}, {"v_cap", so.v_cap}}},
            {"weierstrass", {{"pole_threshold", kPoleThreshold}, {"zero_threshold", kZeroThreshold}}},
            {"curvelab",
             {{"kappa_floor_per_length", 1e-8},
              {"tau_floor_per_max_kappa", 1e-6},
              {"criterion_rel_tol", 1e-4},
              {"center_tie_fraction", 0.1},
              {"constancy_tol", co.constancy_tol},
              {"line_tol", co.line_tol},
              {"flat_threshold", co.flat_threshold},
              {"flat_fraction", co.flat_fraction},
              {"center_tol", co.center_tol}}},
            {"rebuild",
             {{"compatibility_tol", fo.compatibility_tol},
              {"lambda_floor", fo.lambda_floor},
              {"unit_tol", sp.unit_tol},
              {"concentric_tol", sp.concentric_tol},
              {"n_max", dop.n_max},
              {"angle_tol", dop.angle_tol},
              {"identity_tol", dop.identity_tol},
              {"center_tol", dop.center_tol},
              {"flux_tol", 1e-6}}},
            {"diagnostics",
             {{"conformality_tol", ho.conformality_tol},
              {"winding_defect", 0.1},
              {"test_grid", io.grid},
              {"exclusion_segments", io.exclusion},
              {"derivative_floor", io.derivative_floor}}},
            {"pipeline",
             {{"metric_condition", 1e-5},
              {"alignment_rms", 1e-4},
              {"center_at_origin", 1e-4},
              {"divergence_gap", 1e-5},
              {"hopf_deviation", 1e-4},
              {"area_gap", 1e-6}}}};
}

namespace {

struct Context {
    const Params& p;
    fs::path out;
    std::vector<std::string> artifacts;

    std::string path(const std::string& name)
    {
        artifacts.push_back(name);
        return (out / name).string();
    }
    void patch(const std::string& stem, const SurfacePatch& sp)
    {
        artifacts.push_back(stem + ".obj");
        artifacts.push_back(stem + "_lambda.csv");
        write_patch((out / stem).string(), sp);
    }
};

void require_positive(const Params& p, const std::string& key)
{
    if (!(p.real(key) > 0.0)) throw ConfigError("parameter '" + key + "' must be positive");
}

SolveOptions solve_options(const Params& p)
{
    SolveOptions o;
    require_positive(p, "tol");
    o.tol = p.real("tol");
    o.max_iter = p.integer("max_iter");
    if (o.max_iter < 1) throw ConfigError("max_iter must be >= 1");
    o.initial = p.text("initial");
    if (o.initial != "symmetric" && o.initial != "constant" && o.initial != "field") {
        throw ConfigError("initial must be symmetric, constant or field");
    }
    o.constant_value = p.real("constant_value");
    o.order = p.integer("order");
    if (o.order != 2 && o.order != 4) throw ConfigError("order must be 2 or 4");
    if (o.initial == "field") {
        if (p.text("initial_field").empty()) throw ConfigError("initial = field needs initial_field");
        o.initial_field = read_real_csv(p.text("initial_field"));
    }
    return o;
}

FrameOptions frame_options(const Params& p)
{
    FrameOptions o;
    require_positive(p, "compat_tol");
    o.compatibility_tol = p.real("compat_tol");
    return o;
}

SphereOptions sphere_options(const Params& p)
{
    SphereOptions o;
    require_positive(p, "unit_tol");
    require_positive(p, "concentric_tol");
    o.unit_tol = p.real("unit_tol");
    o.concentric_tol = p.real("concentric_tol");
    return o;
}

DecomposeOptions decompose_options(const Params& p)
{
    DecomposeOptions o;
    o.n_max = p.integer("n_max");
    if (o.n_max < 1) throw ConfigError("n_max must be >= 1");
    require_positive(p, "angle_tol");
    require_positive(p, "identity_tol");
    o.angle_tol = p.real("angle_tol");
    o.identity_tol = p.real("identity_tol");
    return o;
}

int copies_of(const Params& p)
{
    const int m = p.integer("copies");
    if (m < 1) throw ConfigError("copies must be >= 1");
    return m;
}

std::string lambda_path(const Params& p)
{
    if (!p.text("lambda").empty()) return p.text("lambda");
    fs::path obj(p.text("patch"));
    return (obj.parent_path() / (obj.stem().string() + "_lambda.csv")).string();
}

// Flux of a decomposed piece: closed boundary circles when T = id, open arcs
// plus seams otherwise.
FluxReport piece_flux(const FundamentalDecomposition& d, const Vec3& origin, bool concentric)
{
    if (d.classification == PieceClass::identity) {
        return flux_and_torque(d.piece, annulus_boundaries(d.piece.chart), origin, concentric);
    }
    const SurfacePatch open = column_piece(d.piece, 0, d.piece.chart.cols() - 1);
    return flux_and_torque(open, piece_boundaries(open.chart), origin, concentric);
}

struct RebuildOutcome {
    Json report;
    bool ok = true;
};

// Frame integration, spheres, decomposition and flux for one solution.
RebuildOutcome rebuild_solution(const RealField& v, double C0, const Params& p, Context* ctx)
{
    RebuildOutcome r;
    const int copies = copies_of(p);
    const RealField vt = lift_to_slab(v, copies);
    const FrameField frame = frame_integrate(vt, C0, {}, frame_options(p));
    r.report["frame"] = to_json(frame);
    r.report["metric_condition"] = verify_metric_condition(v, frame);
    const SurfacePatch patch = frame.patch();
    if (ctx) ctx->patch("surface", patch);

    std::optional<SphereFinding> spheres;
    try {
        spheres = find_spheres(patch, sphere_options(p));
        r.report["spheres"] = to_json(*spheres);
    } catch (const NumericalError& e) {
        r.report["spheres"] = {{"error", e.what()}};
        r.ok = false;
    }
    if (copies >= 2) {
        DecomposeOptions dop = decompose_options(p);
        if (spheres && spheres->concentric) dop.fixed_center = spheres->O1;
        try {
            const FundamentalDecomposition d = decompose(patch, dop);
            r.report["decomposition"] = to_json(d);
            if (ctx) {
                write_json(ctx->path("decomposition.json"), to_json(d));
                ctx->patch("piece", d.piece);
            }
            const Vec3 origin = spheres ? spheres->O1 : Vec3::Zero();
            r.report["flux"] = to_json(piece_flux(d, origin, !spheres || spheres->concentric));
        } catch (const NumericalError& e) {
            r.report["decomposition"] = {{"error", e.what()}};
            r.ok = false;
        }
    }
    return r;
}

int cmd_solve(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    const LiouvilleProblem pr{p.real("R"), p.real("C0"), p.integer("n_r"), p.integer("n_theta")};
    pr.validate();
    const SolveOptions o = solve_options(p);
    const LiouvilleSolution s = solve_full(pr, o);
    write_csv(ctx.path("solution.csv"), s.v);
    Json rep = {{"solution", to_json(s)}, {"area_perimeter", to_json(area_perimeter_check(s.v))}};
    try {
        const SymmetricSolution sym = solve_symmetric(pr);
        rep["symmetric"] = {{"alpha", sym.alpha}, {"t0", sym.t0}};
    } catch (const NumericalError&) {
        rep["symmetric"] = nullptr;
    }
    write_json(ctx.path("report.json"), rep);
    summary = {{"status", to_string(s.status)}, {"iterations", s.iterations}};
    return s.converged() ? 0 : 1;
}

int cmd_rebuild(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    if (p.text("solution").empty()) throw ConfigError("rebuild needs --solution");
    const double C0 = p.real("C0");
    if (C0 == 0.0) throw ConfigError("C0 must be nonzero");
    const RealField v = read_real_csv(p.text("solution"));
    if (!v.chart().is_annulus()) throw InputError("rebuild: the solution must live on the annulus chart");
    const RebuildOutcome r = rebuild_solution(v, C0, p, &ctx);
    write_json(ctx.path("report.json"), r.report);
    summary = {{"ok", r.ok}};
    return r.ok ? 0 : 1;
}

std::vector<Vec3> read_xyz_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw InputError("cannot read " + path);
    std::vector<Vec3> pts;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::stringstream ss(line);
        Vec3 x;
        char comma = 0;
        if (!(ss >> x[0] >> comma >> x[1] >> comma >> x[2])) throw InputError(path + ": bad row '" + line + "'");
        pts.push_back(x);
    }
    return pts;
}

int cmd_certify(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    Json rep;
    if (!p.text("patch").empty()) {
        CertifyOptions co;
        co.constancy_tol = p.real("constancy_tol");
        co.line_tol = p.real("line_tol");
        co.flat_threshold = p.real("flat_threshold");
        co.flat_fraction = p.real("flat_fraction");
        co.center_tol = p.real("center_tol");
        const SurfacePatch sp = read_patch(p.text("patch"), lambda_path(p));
        int row = p.integer("row");
        if (row < 0) row += sp.chart.rows();
        if (row < 0 || row >= sp.chart.rows()) throw ConfigError("row outside the patch");
        const CurveOnSurface g = level_curve(sp, row);
        const SphereCertificate cert = certify_orthogonal_sphere(g, co);
        rep["certificate"] = to_json(cert);
        summary = {{"branch", to_string(cert.branch)}};
    } else if (!p.text("curve").empty()) {
        const auto pts = read_xyz_csv(p.text("curve"));
        const SpaceCurve sc = frenet_analyze(pts, p.flag("closed"));
        const CriterionResult cr = spherical_criterion(sc, p.real("rel_tol"));
        rep["criterion"] = {{"verdict", to_string(cr.verdict)}, {"radius", cr.radius}, {"deviation", cr.deviation}};
        if (cr.verdict == CurveVerdict::spherical) {
            const SphereNormalResult sn = sphere_normal_field(sc, cr.radius);
            rep["sphere"] = {{"center", to_json(sn.center)}, {"center_spread", sn.center_spread}, {"sign", sn.sign}};
        }
        summary = {{"verdict", to_string(cr.verdict)}};
    } else {
        throw ConfigError("certify-sphere needs --curve or --patch");
    }
    write_json(ctx.path("certificate.json"), rep);
    return 0;
}

int cmd_weierstrass(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    const std::string kind = p.text("data");
    const CriticalCatenoid cat = critical_catenoid();
    const AnnulusSpec spec{p.real("R"), 0.0, p.integer("n_r"), p.integer("n_theta")};
    WeierstrassData data;
    if (kind == "catenoid") {
        data = catenoid_annulus_data(Chart::annulus(spec), cat);
    } else if (kind == "catenoid-slab") {
        const SlabSpec ss{spec.R, 0.0, spec.n_r, spec.n_theta + 1, copies_of(p), true};
        data = catenoid_slab_data(Chart::slab(ss), cat);
    } else if (kind == "enneper") {
        data = WeierstrassData::from_functions(
            Chart::annulus(spec), [](Complex z) { return z; }, [](Complex) { return Complex(1.0); },
            [](Complex) { return Complex(1.0); });
    } else if (kind == "plane") {
        data = WeierstrassData::from_functions(
            Chart::annulus(spec), [](Complex) { return Complex(0.0); }, [](Complex) { return Complex(1.0); },
            [](Complex) { return Complex(0.0); });
    } else {
        throw ConfigError("data must be catenoid, catenoid-slab, enneper or plane");
    }
    const SurfacePatch patch = integrate_immersion(data);
    ctx.patch("patch", patch);
    write_csv(ctx.path("g.csv"), data.g);
    write_csv(ctx.path("omega.csv"), data.omega);
    Json rep = {{"data", kind}, {"residuals", to_json(patch_residuals(patch, 4))}};
    double closure = 0.0;
    for (const auto& d : patch.row_closure_defects) closure = std::max(closure, d.norm());
    rep["row_closure_max"] = closure;
    if (data.chart().is_annulus()) rep["period_inner"] = to_json(period_integral(data, circle_loop(data.chart(), 0)));
    write_json(ctx.path("report.json"), rep);
    summary = {{"data", kind}};
    return 0;
}

int cmd_diagnose(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    if (p.text("patch").empty()) throw ConfigError("diagnose needs --patch");
    const SurfacePatch sp = read_patch(p.text("patch"), lambda_path(p));
    if (!sp.chart.is_annulus()) throw InputError("diagnose: expects a patch on the annulus chart");
    bool hopf = p.flag("hopf"), inj = p.flag("injectivity"), kap = p.flag("kappa_g");
    if (!hopf && !inj && !kap) hopf = inj = kap = true;

    Json rep;
    HopfOptions ho;
    ho.conformality_tol = p.real("conformality_tol");
    std::optional<HopfData> h;
    if (hopf || kap) {
        h = hopf_extract(sp, ho);
        if (hopf) {
            rep["hopf"] = to_json(*h);
            write_csv(ctx.path("hopf_f.csv"), h->f);
        }
    }
    // Gauss map from the normals by inverse stereographic projection.
    const Chart& c = sp.chart;
    ComplexField g(c);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const Vec3& N = sp.normals[k];
        g[k] = Complex(N.x(), N.y()) / std::max(1.0 - N.z(), 1e-300);
    }
    if (inj) {
        InjectivityOptions io;
        io.grid = p.integer("grid");
        const WeierstrassData data{g, ComplexField(c), std::nullopt};
        const InjectivityReport r = injectivity_report(data, io);
        rep["injectivity"] = to_json(r);
        write_winding_csv(ctx.path("winding.csv"), r);
    }
    if (kap) {
        Json kj;
        for (const auto& [name, row] : {std::pair<std::string, int>{"inner", 0}, {"outer", c.rows() - 1}}) {
            std::vector<Complex> gb(c.cols());
            for (int j = 0; j < c.cols(); ++j) gb[j] = g(row, j);
            const GaussMapKappa r = gauss_map_kappa_g(gb, h->C0_est);
            const CurveOnSurface cs = level_curve(sp, row);
            double diff = 0.0;
            for (int j = 0; j < c.cols(); ++j) diff = std::max(diff, std::abs(r.kappa_g[j] + cs.geodesic_curvature[j]));
            Json e = to_json(r);
            e["max_difference_to_curve"] = diff;
            kj[name] = e;
            write_kappa_csv(ctx.path("kappa_" + name + ".csv"), r);
        }
        rep["kappa_g"] = kj;
    }
    write_json(ctx.path("diagnose.json"), rep);
    summary = Json::object();
    return 0;
}

struct Check {
    std::string name;
    double value;
    double tol;
};

int cmd_pipeline(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    const CriticalCatenoid cat = critical_catenoid();
    const LiouvilleProblem pr{cat.R, cat.C0, p.integer("n_r"), p.integer("n_theta")};
    pr.validate();
    const SolveOptions so = solve_options(p);
    const int copies = copies_of(p);
    const LiouvilleSolution s = solve_full(pr, so);
    write_csv(ctx.path("solution.csv"), s.v);
    Json rep = {{"solution", to_json(s)}};
    if (!s.converged()) {
        write_json(ctx.path("report.json"), rep);
        summary = {{"status", to_string(s.status)}};
        return 1;
    }
    const AreaCheck area = area_perimeter_check(s.v);
    rep["area_perimeter"] = to_json(area);

    const RealField vt = lift_to_slab(s.v, copies);
    const FrameField frame = frame_integrate(vt, cat.C0, {}, frame_options(p));
    const SurfacePatch patch = frame.patch();
    ctx.patch("surface", patch);
    rep["frame"] = to_json(frame);
    const double metric_defect = verify_metric_condition(s.v, frame);

    // Two independent constructions and the parametrized catenoid.
    const Chart& sc = vt.chart();
    const SurfacePatch wpatch = integrate_immersion(catenoid_slab_data(sc, cat));
    std::vector<Vec3> analytic(sc.size());
    for (int i = 0; i < sc.rows(); ++i) {
        for (int j = 0; j < sc.cols(); ++j) analytic[sc.index(i, j)] = cat.point(sc.row_coord(i) - cat.s0, -sc.col_coord(j));
    }
    const RigidFit to_analytic = fit_rigid_motion(patch.positions, analytic);
    const double rms_w = fit_rigid_motion(patch.positions, wpatch.positions).rms;

    const SphereFinding sp = find_spheres(patch, sphere_options(p));
    Json spj = to_json(sp);
    const Vec3 o1 = to_analytic.motion(sp.O1), o2 = to_analytic.motion(sp.O2);
    spj["O1_aligned"] = to_json(o1);
    spj["O2_aligned"] = to_json(o2);
    rep["spheres"] = spj;

    DecomposeOptions dop = decompose_options(p);
    if (sp.concentric) dop.fixed_center = sp.O1;
    double decomposition_rms = 0.0;
    bool identity = true;
    FluxReport flux;
    if (copies >= 2) {
        const FundamentalDecomposition d = decompose(patch, dop);
        rep["decomposition"] = to_json(d);
        write_json(ctx.path("decomposition.json"), to_json(d));
        ctx.patch("piece", d.piece);
        decomposition_rms = d.fit_rms;
        identity = d.classification == PieceClass::identity;
        flux = piece_flux(d, sp.O1, sp.concentric);
    } else {
        flux = flux_and_torque(patch, annulus_boundaries(patch.chart), sp.O1, sp.concentric);
    }
    rep["flux"] = to_json(flux);

    const SurfacePatch apatch = integrate_immersion(catenoid_annulus_data(pr.chart(), cat));
    ctx.patch("annulus", apatch);
    const HopfData hopf = hopf_extract(apatch);
    rep["hopf"] = to_json(hopf);

    const std::vector<Check> checks = {
        {"newton_residual", std::max(s.residual_interior, s.residual_boundary), so.tol},
        {"metric_condition", metric_defect, 1e-5},
        {"frame_vs_weierstrass_rms", rms_w, 1e-4},
        {"frame_vs_catenoid_rms", to_analytic.rms, 1e-4},
        {"inner_unit_curvature", std::abs(std::abs(sp.inner.c) - 1.0), p.real("unit_tol")},
        {"outer_unit_curvature", std::abs(std::abs(sp.outer.c) - 1.0), p.real("unit_tol")},
        {"sphere_center_distance", sp.distance, p.real("concentric_tol")},
        {"center_at_origin", std::max(o1.norm(), o2.norm()), 1e-4},
        {"decomposition_identity", identity ? decomposition_rms : 1.0, 1e-6},
        {"divergence_gap", flux.divergence_gap, 1e-5},
        {"hopf_deviation", std::abs(hopf.C0_est - cat.C0) + hopf.deviation, 1e-4},
        {"area_gap", area.gap, 1e-6},
    };
    Json cj = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        const bool pass = c.value < c.tol;
        all = all && pass;
        cj.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", pass}});
    }
    rep["checks"] = cj;
    write_json(ctx.path("report.json"), rep);
    summary = {{"all_checks_pass", all}};
    return all ? 0 : 1;
}

int worker_count(std::size_t jobs)
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FBMA_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) throw ConfigError("FBMA_THREADS must be a positive integer");
        hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(hw, jobs)));
}

int cmd_sweep(Context& ctx, Json& summary)
{
    const Params& p = ctx.p;
    const auto Rs = p.reals("R_list");
    const auto Cs = p.reals("C0_list");
    const SolveOptions so = solve_options(p);
    copies_of(p);
    sphere_options(p);
    decompose_options(p);
    frame_options(p);
    std::vector<std::pair<double, double>> pairs;
    for (double R : Rs) {
        for (double C : Cs) pairs.emplace_back(R, C);
    }
    std::vector<Json> results(pairs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < pairs.size(); k = next++) {
            const auto [R, C0] = pairs[k];
            Json r = {{"R", R}, {"C0", C0}};
            try {
                const LiouvilleProblem pr{R, C0, p.integer("n_r"), p.integer("n_theta")};
                pr.validate();
                const LiouvilleSolution s = solve_full(pr, so);
                r["solution"] = to_json(s);
                if (s.converged()) {
                    r["status"] = "converged";
                    r["area_perimeter"] = to_json(area_perimeter_check(s.v));
                    r["rebuild"] = rebuild_solution(s.v, C0, p, nullptr).report;
                } else {
                    r["status"] = "divergent";
                }
            } catch (const ConfigError& e) {
                r["status"] = "invalid";
                r["error"] = e.what();
            } catch (const std::exception& e) {
                r["status"] = "divergent";
                r["error"] = e.what();
            }
            results[k] = std::move(r);
        }
    };
    const int nthreads = worker_count(pairs.size());
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    Json table = Json::array();
    int divergent = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "pair_%03zu.json", k);
        write_json(ctx.path(name), results[k]);
        const std::string status = results[k]["status"];
        divergent += status != "converged";
        table.push_back({{"R", pairs[k].first}, {"C0", pairs[k].second}, {"status", status}, {"report", name}});
    }
    write_json(ctx.path("sweep.json"), table);
    summary = {{"pairs", pairs.size()}, {"divergent", divergent}};
    return 0;
}

}  // namespace

int run(const std::string& command, const Params& params)
{
    Context ctx{params, fs::path(params.text("out")), {}};
    Json summary = Json::object();
    int code = 0;
    std::string message;
    try {
        fs::create_directories(ctx.out);
    } catch (const std::exception& e) {
        std::cerr << "fbma: cannot create output directory: " << e.what() << '\n';
        return 2;
    }
    try {
        if (command == "solve-liouville") code = cmd_solve(ctx, summary);
        else if (command == "rebuild") code = cmd_rebuild(ctx, summary);
        else if (command == "certify-sphere") code = cmd_certify(ctx, summary);
        else if (command == "weierstrass-eval") code = cmd_weierstrass(ctx, summary);
        else if (command == "diagnose") code = cmd_diagnose(ctx, summary);
        else if (command == "pipeline-catenoid") code = cmd_pipeline(ctx, summary);
        else if (command == "sweep") code = cmd_sweep(ctx, summary);
        else throw ConfigError("unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        code = 2;
        message = e.what();
    } catch (const InputError& e) {
        code = 2;
        message = e.what();
    } catch (const NumericalError& e) {
        code = 1;
        message = e.what();
    } catch (const std::exception& e) {
        code = 1;
        message = e.what();
    }
    if (!message.empty()) std::cerr << "fbma " << command << ": " << message << '\n';

    std::sort(ctx.artifacts.begin(), ctx.artifacts.end());
    Json manifest = {{"command", command},
                     {"version", FBMA_VERSION},
                     {"parameters", params.to_json()},
                     {"tolerances", tolerance_table()},
                     {"artifacts", ctx.artifacts},
                     {"summary", summary},
                     {"exit_code", code}};
    if (!message.empty()) manifest["error"] = message;
    try {
        write_json((ctx.out / "run.json").string(), manifest);
    } catch (const std::exception& e) {
        std::cerr << "fbma: " << e.what() << '\n';
    }
    return code;
}

int main(int argc, char** argv)
{
    CLI::App app{"Numerical laboratory for free-boundary minimal annuli in the unit ball"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FBMA_VERSION);

    std::map<std::string, std::map<std::string, std::string>> store;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, std::string> configs;
    static const std::set<std::string> flag_keys = {"hopf", "injectivity", "kappa_g"};
    std::map<std::string, CLI::App*> subs;
    const std::map<std::string, std::string> about = {
        {"solve-liouville", "Newton solve of the Liouville boundary problem on A(1, R)"},
        {"rebuild", "frame integration, boundary spheres, decomposition and fluxes from a solution CSV"},
        {"certify-sphere", "orthogonal sphere certificate for a curve or a patch row"},
        {"weierstrass-eval", "integrate Weierstrass data (catenoid, catenoid-slab, enneper, plane)"},
        {"diagnose", "Hopf differential, injectivity and Gauss-map geodesic curvature of an annulus patch"},
        {"pipeline-catenoid", "solve, rebuild and check the critical catenoid end to end"},
        {"sweep", "solve and rebuild over an (R, C0) grid in parallel"},
    };
    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd, about.at(cmd));
        subs[cmd] = sub;
        const Params decl = command_params(cmd);
        for (const auto& [key, value] : decl.values()) {
            std::string names = "--" + key;
            std::string dashed = key;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            if (dashed != key) names += ",--" + dashed;
            const std::string help = decl.help().at(key) + (value.empty() ? "" : " [" + value + "]");
            if (flag_keys.count(key)) {
                sub->add_flag(names, flags[cmd][key], help);
            } else {
                sub->add_option(names, store[cmd][key], help);
            }
        }
        sub->add_option("--config", configs[cmd], "flat key = value file; flags override it");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (const auto& [cmd, sub] : subs) {
        if (!sub->parsed()) continue;
        try {
            Params p = command_params(cmd);
            if (!configs[cmd].empty()) p.load_file(configs[cmd]);
            for (const auto& [key, value] : store[cmd]) {
                std::string name = "--" + key;
                if (sub->get_option(name)->count() > 0) p.set(key, value);
            }
            for (const auto& [key, on] : flags[cmd]) {
                if (on) p.set(key, "true");
            }
            return run(cmd, p);
        } catch (const ConfigError& e) {
            std::cerr << "fbma " << cmd << ": " << e.what() << '\n';
            return 2;
        }
    }
    return 2;
}

}  // namespace fbma::cli
