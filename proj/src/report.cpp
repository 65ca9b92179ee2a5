#include "fbma/report.hpp"

#include "fbma/error.hpp"
#include "fbma/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace fbma {

namespace {

// Infinite radii and similar are written as strings; JSON has no infinity.
Json number(double x)
{
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double max_of(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path);
    return os;
}

}  // namespace

Json to_json(const Vec3& v) { return Json::array({number(v.x()), number(v.y()), number(v.z())}); }

Json to_json(const RigidMotion& T)
{
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) rows.push_back(to_json(Vec3(T.rotation.row(i).transpose())));
    return {{"rotation", rows}, {"translation", to_json(T.translation)}, {"angle", T.angle()}};
}

Json to_json(const LiouvilleProblem& p)
{
    return {{"R", p.R}, {"C0", p.C0}, {"n_r", p.n_r}, {"n_theta", p.n_theta}};
}

Json to_json(const LiouvilleSolution& s)
{
    Json trace = Json::array();
    for (const auto& st : s.newton_trace) {
        trace.push_back({{"residual", number(st.residual)}, {"step", number(st.step_norm)}, {"damping", st.damping}});
    }
    return {{"problem", to_json(s.problem)},
            {"status", to_string(s.status)},
            {"iterations", s.iterations},
            {"initial", s.initial_used},
            {"residual_interior", number(s.residual_interior)},
            {"residual_boundary", number(s.residual_boundary)},
            {"quadratic_constant", number(s.quadratic_constant)},
            {"newton_trace", trace}};
}

Json to_json(const AreaCheck& a) { return {{"twice_area", a.lhs}, {"boundary_length", a.rhs}, {"gap", a.gap}}; }

Json to_json(const SphereCertificate& c)
{
    Json pieces = Json::array();
    for (const auto& p : c.pieces) {
        pieces.push_back({{"branch", to_string(p.branch)},
                          {"first", p.first},
                          {"last", p.last},
                          {"center", to_json(p.center)},
                          {"spread", number(p.spread)}});
    }
    double angle_min = 0.0, angle_max = 0.0;
    if (!c.contact_angle.empty()) {
        const auto [lo, hi] = std::minmax_element(c.contact_angle.begin(), c.contact_angle.end());
        angle_min = *lo;
        angle_max = *hi;
    }
    return {{"branch", to_string(c.branch)},
            {"c", number(c.c)},
            {"center", to_json(c.center)},
            {"radius", number(c.radius)},
            {"plane_normal", to_json(c.plane_normal)},
            {"plane_offset", number(c.plane_offset)},
            {"orthogonality_residual", number(c.orthogonality_residual)},
            {"sphericity_residual", number(c.sphericity_residual)},
            {"geodesic_deviation", number(c.geodesic_deviation)},
            {"curvature_line_max", number(c.curvature_line_max)},
            {"flat_fraction", number(c.flat_fraction)},
            {"contact_angle_range", Json::array({number(angle_min), number(angle_max)})},
            {"pieces", pieces}};
}

Json to_json(const SphereFinding& f)
{
    return {{"inner", to_json(f.inner)},
            {"outer", to_json(f.outer)},
            {"O1", to_json(f.O1)},
            {"O2", to_json(f.O2)},
            {"distance", number(f.distance)},
            {"concentric", f.concentric}};
}

Json to_json(const FundamentalDecomposition& d)
{
    return {{"classification", to_string(d.classification)},
            {"N", d.N},
            {"k", d.k},
            {"axis", to_json(d.axis)},
            {"angle", number(d.angle)},
            {"T", to_json(d.T)},
            {"fit_rms", number(d.fit_rms)},
            {"power_residuals", d.power_residuals},
            {"closure_error", number(d.closure_error)},
            {"note", d.note}};
}

Json to_json(const FluxReport& r)
{
    Json segs = Json::array();
    for (const auto& s : r.segments) {
        segs.push_back({{"label", s.label},
                        {"spherical", s.spherical},
                        {"length", number(s.length)},
                        {"flux", to_json(s.flux)},
                        {"torque", to_json(s.torque)},
                        {"support", number(s.support)}});
    }
    Json j = {{"area", number(r.area)},
              {"divergence_lhs", number(r.divergence_lhs)},
              {"divergence_rhs", number(r.divergence_rhs)},
              {"divergence_gap", number(r.divergence_gap)},
              {"seam_support", number(r.seam_support)},
              {"max_spherical_flux", number(r.max_spherical_flux)},
              {"segments", segs}};
    if (r.flux_checked) j["flux_vanishes"] = r.flux_vanishes;
    return j;
}

Json to_json(const FrameField& f)
{
    return {{"C0", f.C0},
            {"rows", f.chart.rows()},
            {"cols", f.chart.cols()},
            {"copies", f.chart.copies()},
            {"compatibility_residual", number(f.compatibility_residual)},
            {"max_drift", number(f.max_drift)},
            {"total_correction", number(f.total_correction)}};
}

Json to_json(const PatchResiduals& r)
{
    return {{"conformality", number(r.conformality)},
            {"metric", number(r.metric)},
            {"normal", number(r.normal)},
            {"harmonicity", number(r.harmonicity)}};
}

Json to_json(const HopfData& h)
{
    return {{"C0_est", number(h.C0_est)},
            {"deviation", number(h.deviation)},
            {"imag_max", number(h.imag_max)},
            {"holomorphy", number(h.holomorphy)}};
}

Json to_json(const InjectivityReport& r)
{
    std::map<int, int> histogram;
    for (const auto& p : r.points) ++histogram[p.difference];
    Json hist = Json::object();
    for (const auto& [d, n] : histogram) hist[std::to_string(d)] = n;
    return {{"verdict", r.verdict},
            {"consistent", r.consistent},
            {"boundary_embedded", r.boundary_embedded},
            {"inner_simple", r.inner_simple},
            {"outer_simple", r.outer_simple},
            {"nonnegative", r.nonnegative},
            {"max_difference", r.max_difference},
            {"min_derivative", number(r.min_derivative)},
            {"max_defect", number(r.max_defect)},
            {"points", r.points.size()},
            {"skipped", r.skipped},
            {"difference_histogram", hist}};
}

Json to_json(const GaussMapKappa& r)
{
    double lo = 0.0, hi = 0.0;
    if (!r.g_theta_abs.empty()) {
        const auto [a, b] = std::minmax_element(r.g_theta_abs.begin(), r.g_theta_abs.end());
        lo = *a;
        hi = *b;
    }
    double kmin = 0.0, kmax = 0.0;
    if (!r.kappa_g.empty()) {
        const auto [a, b] = std::minmax_element(r.kappa_g.begin(), r.kappa_g.end());
        kmin = *a;
        kmax = *b;
    }
    return {{"nodes", r.kappa_g.size()},
            {"kappa_g_range", Json::array({number(kmin), number(kmax)})},
            {"bracket_max", number(max_of(r.bracket))},
            {"g_theta_range", Json::array({number(lo), number(hi)})}};
}

void write_json(const std::string& path, const Json& j)
{
    auto os = open_out(path);
    os << j.dump(2) << '\n';
}

void write_winding_csv(const std::string& path, const InjectivityReport& r)
{
    auto os = open_out(path);
    os << "re,im,n_inner,n_outer,difference,defect\n";
    for (const auto& p : r.points) {
        os << format_double(p.a.real()) << ',' << format_double(p.a.imag()) << ',' << p.n_inner << ',' << p.n_outer << ','
           << p.difference << ',' << format_double(p.defect) << '\n';
    }
}

void write_kappa_csv(const std::string& path, const GaussMapKappa& r)
{
    auto os = open_out(path);
    os << "node,kappa_g,bracket,g_theta_abs\n";
    for (std::size_t k = 0; k < r.kappa_g.size(); ++k) {
        os << k << ',' << format_double(r.kappa_g[k]) << ',' << format_double(r.bracket[k]) << ','
           << format_double(r.g_theta_abs[k]) << '\n';
    }
}

}  // namespace fbma
