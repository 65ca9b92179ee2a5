#include "fbma/curvelab.hpp"

#include "fbma/error.hpp"
#include "fbma/quadrature.hpp"
#include "fbma/stencil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace fbma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int fitting_order(int count, bool closed, int order)
{
    while (order > 2 && (closed ? count < order + 1 : count < order + 2)) order -= 2;
    return order;
}

// Derivative of a Vec3 sequence in the node index (unit spacing).
std::vector<Vec3> diff(const std::vector<Vec3>& v, bool closed, int deriv, int order)
{
    const int n = static_cast<int>(v.size());
    Stencil1D st(n, 1.0, deriv, order, closed ? n : 0);
    std::vector<Vec3> out(v.size());
    for (int c = 0; c < 3; ++c) st.apply(v[0].data() + c, 3, out[0].data() + c, 3);
    return out;
}

std::vector<double> diff(const std::vector<double>& v, bool closed, int order)
{
    const int n = static_cast<int>(v.size());
    Stencil1D st(n, 1.0, 1, order, closed ? n : 0);
    std::vector<double> out(v.size());
    st.apply(v.data(), 1, out.data(), 1);
    return out;
}

// Cubic Lagrange weights for the nodes x[0..3] evaluated at s.
std::array<double, 4> lagrange4(const double* x, double s)
{
    std::array<double, 4> w;
    for (int a = 0; a < 4; ++a) {
        double p = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b != a) p *= (s - x[b]) / (x[a] - x[b]);
        }
        w[a] = p;
    }
    return w;
}

double median(std::vector<double> v)
{
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

Vec3 mean_of(const std::vector<Vec3>& v)
{
    Vec3 m = Vec3::Zero();
    for (const auto& x : v) m += x;
    return m / static_cast<double>(v.size());
}

double spread_of(const std::vector<Vec3>& v, const Vec3& m)
{
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, (x - m).norm());
    return s;
}

Vec3 any_perpendicular(const Vec3& t)
{
    const Vec3 e = std::abs(t.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return (e - e.dot(t) * t).normalized();
}

}  // namespace

std::vector<Vec3> resample_arclength(std::span<const Vec3> points, bool closed, int count)
{
    const int n = static_cast<int>(points.size());
    if (n < 4) throw InputError("resample_arclength: need at least 4 points");
    if (count <= 0) count = n;
    // Extended node list so every target has a centered 4-point window.
    std::vector<Vec3> p;
    std::vector<double> s;
    if (closed) {
        for (int k = -2; k <= n + 2; ++k) p.push_back(points[((k % n) + n) % n]);
    } else {
        p.assign(points.begin(), points.end());
    }
    s.assign(p.size(), 0.0);
    for (std::size_t k = 1; k < p.size(); ++k) s[k] = s[k - 1] + (p[k] - p[k - 1]).norm();
    const double s0 = closed ? s[2] : 0.0;
    const double L = closed ? s[n + 2] - s[2] : s.back();
    std::vector<Vec3> out;
    out.reserve(count);
    for (int m = 0; m < count; ++m) {
        const double target = s0 + L * m / (closed ? count : count - 1);
        auto it = std::upper_bound(s.begin(), s.end(), target);
        int k = static_cast<int>(it - s.begin()) - 1;
        k = std::clamp(k - 1, 0, static_cast<int>(s.size()) - 4);
        const auto w = lagrange4(&s[k], target);
        Vec3 x = Vec3::Zero();
        for (int a = 0; a < 4; ++a) x += w[a] * p[k + a];
        out.push_back(x);
    }
    return out;
}

SpaceCurve frenet_analyze(std::span<const Vec3> points, bool closed, const FrenetOptions& options)
{
    std::vector<Vec3> pts(points.begin(), points.end());
    if (pts.size() < 8) throw InputError("frenet_analyze: need at least 8 points");
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.norm());
    const double dup = 1e-14 * std::max(scale, 1.0);
    if (closed && pts.size() > 8 && (pts.back() - pts.front()).norm() <= dup) pts.pop_back();
    for (std::size_t k = 1; k < pts.size(); ++k) {
        if ((pts[k] - pts[k - 1]).norm() <= dup) throw InputError("frenet_analyze: duplicate consecutive points");
    }
    if (options.resample) pts = resample_arclength(pts, closed);

    const int n = static_cast<int>(pts.size());
    const int order = fitting_order(n, closed, options.order);
    const auto d1 = diff(pts, closed, 1, order);
    const auto d2 = diff(pts, closed, 2, order);
    const auto d3 = diff(d2, closed, 1, order);

    SpaceCurve c;
    c.points = pts;
    c.closed = closed;
    c.speed.resize(n);
    for (int k = 0; k < n; ++k) c.speed[k] = d1[k].norm();
    c.arclength.assign(n, 0.0);
    for (int k = 1; k < n; ++k) c.arclength[k] = c.arclength[k - 1] + 0.5 * (c.speed[k - 1] + c.speed[k]);
    c.length = closed ? integrate_periodic(c.speed, 1.0) : integrate_line(c.speed, 1.0);

    c.t.resize(n);
    c.n.resize(n);
    c.b.resize(n);
    c.kappa.resize(n);
    c.tau.assign(n, 0.0);
    c.curvature_vector.resize(n);
    for (int k = 0; k < n; ++k) {
        const double s = c.speed[k];
        c.t[k] = d1[k] / s;
        c.kappa[k] = d1[k].cross(d2[k]).norm() / (s * s * s);
        c.curvature_vector[k] = (d2[k] - d2[k].dot(c.t[k]) * c.t[k]) / (s * s);
    }
    c.kappa_floor = 1e-8 / c.length;
    c.tau_floor = 1e-6 * *std::max_element(c.kappa.begin(), c.kappa.end());

    std::vector<char> valid(n, 0);
    int flat = 0;
    for (int k = 0; k < n; ++k) {
        if (c.kappa[k] < c.kappa_floor) {
            ++flat;
            continue;
        }
        valid[k] = 1;
        const Vec3 cr = d1[k].cross(d2[k]);
        c.b[k] = cr.normalized();
        c.n[k] = c.b[k].cross(c.t[k]);
        c.tau[k] = cr.dot(d3[k]) / cr.squaredNorm();
    }
    c.degenerate = 2 * flat > n;
    // Flat nodes inherit the normal of the nearest regular node.
    for (int k = 0; k < n; ++k) {
        if (valid[k]) continue;
        int src = -1;
        for (int d = 1; d < n && src < 0; ++d) {
            for (int cand : {k - d, k + d}) {
                if (closed) cand = ((cand % n) + n) % n;
                if (cand >= 0 && cand < n && valid[cand]) {
                    src = cand;
                    break;
                }
            }
        }
        Vec3 nn = Vec3::Zero();
        if (src >= 0) nn = c.n[src] - c.n[src].dot(c.t[k]) * c.t[k];
        c.n[k] = nn.norm() > 1e-8 ? nn.normalized() : any_perpendicular(c.t[k]);
        c.b[k] = c.t[k].cross(c.n[k]);
    }

    const auto dk = diff(c.kappa, closed, order);
    c.kappa_prime.resize(n);
    for (int k = 0; k < n; ++k) c.kappa_prime[k] = dk[k] / c.speed[k];
    return c;
}

std::string to_string(CurveVerdict v)
{
    switch (v) {
    case CurveVerdict::spherical: return "spherical";
    case CurveVerdict::planar_circle: return "planar_circle";
    case CurveVerdict::not_spherical: return "not_spherical";
    }
    return "unknown";
}

CriterionResult spherical_criterion(const SpaceCurve& curve, double rel_tol)
{
    const std::size_t n = curve.size();
    CriterionResult r;
    r.value.assign(n, kNaN);
    r.generic.assign(n, 0);
    std::vector<double> generic_values;
    for (std::size_t k = 0; k < n; ++k) {
        const double kap = curve.kappa[k];
        if (kap < curve.kappa_floor || std::abs(curve.tau[k]) < curve.tau_floor) continue;
        r.generic[k] = 1;
        const double dinv = -curve.kappa_prime[k] / (kap * kap);
        r.value[k] = 1.0 / (kap * kap) + dinv * dinv / (curve.tau[k] * curve.tau[k]);
        generic_values.push_back(r.value[k]);
    }

    if (generic_values.empty()) {
        // Planar branch: a circle exactly when kappa is constant.
        const double mean = std::accumulate(curve.kappa.begin(), curve.kappa.end(), 0.0) / n;
        double dev = 0.0;
        for (double k : curve.kappa) dev = std::max(dev, std::abs(k - mean));
        r.deviation = mean > curve.kappa_floor ? dev / mean : std::numeric_limits<double>::infinity();
        if (r.deviation < rel_tol) {
            r.verdict = CurveVerdict::planar_circle;
            r.radius = 1.0 / mean;
        }
        return r;
    }

    const double ref = median(generic_values);
    double dev = 0.0;
    for (double v : generic_values) dev = std::max(dev, std::abs(v - ref));
    r.deviation = dev / ref;
    if (r.deviation >= rel_tol) return r;
    const double R = std::sqrt(ref);
    // Planar stretches must be circles that fit on the same sphere.
    for (std::size_t k = 0; k < n; ++k) {
        if (!r.generic[k] && !(curve.kappa[k] >= curve.kappa_floor && 1.0 / curve.kappa[k] <= R * (1.0 + rel_tol))) {
            return r;
        }
    }
    r.verdict = CurveVerdict::spherical;
    r.radius = R;
    return r;
}

SphereNormalResult sphere_normal_field(const SpaceCurve& curve, double R)
{
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("sphere_normal_field: radius must be positive");
    const std::size_t n = curve.size();
    SphereNormalResult out;
    out.normal.assign(n, Vec3::Constant(kNaN));
    std::vector<Vec3> plus, minus;
    for (std::size_t k = 0; k < n; ++k) {
        const double kap = curve.kappa[k];
        if (kap < curve.kappa_floor || std::abs(curve.tau[k]) < curve.tau_floor) continue;
        const Vec3 u = (-(1.0 / (R * kap)) * curve.n[k] +
                        (curve.kappa_prime[k] / (R * kap * kap * curve.tau[k])) * curve.b[k])
                           .normalized();
        out.normal[k] = u;
        plus.push_back(curve.points[k] - R * u);
        minus.push_back(curve.points[k] + R * u);
    }
    if (plus.empty()) throw DomainError("sphere_normal_field: no node with nonzero torsion");
    const Vec3 mp = mean_of(plus), mm = mean_of(minus);
    const double sp = spread_of(plus, mp), sm = spread_of(minus, mm);
    if (std::min(sp, sm) > 0.9 * std::max(sp, sm)) {
        throw InconsistencyError("sphere_normal_field: neither sign gives a consistent center");
    }
    out.sign = sp <= sm ? 1 : -1;
    out.center = sp <= sm ? mp : mm;
    out.center_spread = std::min(sp, sm);
    if (out.sign < 0) {
        for (auto& u : out.normal) u = -u;
    }
    return out;
}

namespace {

CurveOnSurface assemble(std::vector<Vec3> positions, std::vector<Vec3> normals, std::vector<ChartPoint> trace,
                        bool closed, const FrenetOptions& options)
{
    if (closed && positions.size() > 8 && (positions.back() - positions.front()).norm() <= 1e-14) {
        positions.pop_back();
        normals.pop_back();
        trace.pop_back();
    }
    if (options.resample) throw ConfigError("curve_on_surface: resampling would detach the curve from its host nodes");
    CurveOnSurface g;
    g.curve = frenet_analyze(positions, closed, options);
    g.chart_trace = std::move(trace);
    const std::size_t n = g.curve.size();
    const int order = fitting_order(static_cast<int>(n), closed, options.order);
    const auto dN = diff(normals, closed, 1, order);
    g.surface_normal.resize(n);
    g.conormal.resize(n);
    g.geodesic_curvature.resize(n);
    g.normal_curvature.resize(n);
    g.curvature_line_residual.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3& t = g.curve.t[k];
        const Vec3 N = (normals[k] - normals[k].dot(t) * t).normalized();
        const Vec3 nu = N.cross(t);
        g.surface_normal[k] = N;
        g.conormal[k] = nu;
        g.geodesic_curvature[k] = g.curve.curvature_vector[k].dot(nu);
        g.normal_curvature[k] = g.curve.curvature_vector[k].dot(N);
        g.curvature_line_residual[k] = dN[k].dot(nu) / g.curve.speed[k];
    }
    return g;
}

}  // namespace

CurveOnSurface curve_on_surface(const SurfacePatch& host, std::span<const GridNode> path, bool closed,
                                const FrenetOptions& options)
{
    const Chart& c = host.chart;
    if (host.normals.size() != c.size()) throw InputError("curve_on_surface: host has no normals");
    std::vector<Vec3> x, N;
    std::vector<ChartPoint> trace;
    for (const auto& node : path) {
        if (node.row < 0 || node.row >= c.rows() || node.col < 0 || node.col >= c.cols()) {
            throw DomainError("curve_on_surface: path leaves the chart");
        }
        x.push_back(host.position(node.row, node.col));
        N.push_back(host.normal(node.row, node.col));
        trace.push_back({c.row_coord(node.row), c.col_coord(node.col)});
    }
    return assemble(std::move(x), std::move(N), std::move(trace), closed, options);
}

CurveOnSurface curve_on_surface(const SurfacePatch& host, std::span<const ChartPoint> path, bool closed,
                                const FrenetOptions& options)
{
    const Chart& c = host.chart;
    if (host.normals.size() != c.size()) throw InputError("curve_on_surface: host has no normals");
    if (c.rows() < 4 || c.cols() < 4) throw DomainError("curve_on_surface: chart too small to interpolate");
    const bool wrap = c.is_annulus();
    std::vector<Vec3> x, N;
    const double eps = 1e-12;
    for (const auto& p : path) {
        const double fr = (p.row - c.row_coord(0)) / c.row_step();
        double fc = p.col / c.col_step();
        if (!(fr >= -eps && fr <= c.rows() - 1 + eps)) throw DomainError("curve_on_surface: path leaves the chart");
        if (wrap) {
            fc = std::fmod(fc, static_cast<double>(c.cols()));
            if (fc < 0) fc += c.cols();
        } else if (!(fc >= -eps && fc <= c.cols() - 1 + eps)) {
            throw DomainError("curve_on_surface: path leaves the chart");
        }
        const int i0 = std::clamp(static_cast<int>(std::floor(fr)) - 1, 0, c.rows() - 4);
        const int j0 = wrap ? static_cast<int>(std::floor(fc)) - 1 : std::clamp(static_cast<int>(std::floor(fc)) - 1, 0, c.cols() - 4);
        const double ri[4] = {double(i0), double(i0 + 1), double(i0 + 2), double(i0 + 3)};
        const double cj[4] = {double(j0), double(j0 + 1), double(j0 + 2), double(j0 + 3)};
        const auto wr = lagrange4(ri, fr);
        const auto wc = lagrange4(cj, fc);
        Vec3 xp = Vec3::Zero(), np = Vec3::Zero();
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                int j = j0 + b;
                if (wrap) j = ((j % c.cols()) + c.cols()) % c.cols();
                xp += wr[a] * wc[b] * host.position(i0 + a, j);
                np += wr[a] * wc[b] * host.normal(i0 + a, j);
            }
        }
        x.push_back(xp);
        N.push_back(np.normalized());
    }
    return assemble(std::move(x), std::move(N), std::vector<ChartPoint>(path.begin(), path.end()), closed, options);
}

CurveOnSurface row_curve(const SurfacePatch& host, int row, const FrenetOptions& options)
{
    const Chart& c = host.chart;
    std::vector<GridNode> path;
    for (int j = 0; j < c.cols(); ++j) path.push_back({row, j});
    return curve_on_surface(host, path, c.is_annulus(), options);
}

std::string to_string(SphereBranch b)
{
    switch (b) {
    case SphereBranch::generic_torsion: return "generic_torsion";
    case SphereBranch::planar: return "planar";
    case SphereBranch::piecewise: return "piecewise";
    case SphereBranch::plane: return "plane";
    }
    return "unknown";
}

SphereCertificate certify_orthogonal_sphere(const CurveOnSurface& gamma, const CertifyOptions& opt)
{
    const SpaceCurve& cv = gamma.curve;
    const std::size_t n = cv.size();
    double kmax = 0.0;
    for (const auto& k : cv.curvature_vector) kmax = std::max(kmax, k.norm());
    const double scale = std::max(kmax, 1.0 / cv.length);

    SphereCertificate cert;
    for (double r : gamma.curvature_line_residual) cert.curvature_line_max = std::max(cert.curvature_line_max, std::abs(r));
    if (cert.curvature_line_max > opt.line_tol * scale) {
        throw NotCertifiableError("certify: curve is not a line of curvature (residual " +
                                  std::to_string(cert.curvature_line_max) + ")");
    }
    const auto& kg = gamma.geodesic_curvature;
    cert.c = std::accumulate(kg.begin(), kg.end(), 0.0) / n;
    double dev = 0.0;
    for (double k : kg) dev = std::max(dev, std::abs(k - cert.c));
    const bool plane = std::abs(cert.c) < opt.constancy_tol * scale;
    cert.geodesic_deviation = plane ? dev / scale : dev / std::abs(cert.c);
    if (cert.geodesic_deviation > opt.constancy_tol) {
        throw NotCertifiableError("certify: geodesic curvature is not constant (relative deviation " +
                                  std::to_string(cert.geodesic_deviation) + ")");
    }
    cert.contact_angle.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        cert.contact_angle[k] = std::atan2(cv.b[k].dot(gamma.conormal[k]), cv.b[k].dot(gamma.surface_normal[k]));
    }

    if (plane) {
        // c = 0: the conormal is constant and normal to the plane holding the curve.
        cert.branch = SphereBranch::plane;
        cert.radius = std::numeric_limits<double>::infinity();
        cert.plane_normal = mean_of(gamma.conormal).normalized();
        double off = 0.0;
        for (const auto& x : cv.points) off += cert.plane_normal.dot(x);
        cert.plane_offset = off / n;
        cert.center = mean_of(cv.points);
        for (std::size_t k = 0; k < n; ++k) {
            cert.orthogonality_residual =
                std::max(cert.orthogonality_residual, std::abs(gamma.surface_normal[k].dot(cert.plane_normal)));
            cert.sphericity_residual =
                std::max(cert.sphericity_residual, std::abs(cert.plane_normal.dot(cv.points[k]) - cert.plane_offset));
        }
        return cert;
    }

    std::size_t flat = 0;
    for (double kn : gamma.normal_curvature) flat += std::abs(kn) < opt.flat_threshold * scale;
    cert.flat_fraction = static_cast<double>(flat) / n;
    if (cert.flat_fraction >= opt.flat_fraction) {
        throw NotCertifiableError("certify: normal curvature vanishes on too many nodes");
    }

    const double R = 1.0 / std::abs(cert.c);
    cert.radius = R;
    std::vector<char> generic(n);
    for (std::size_t k = 0; k < n; ++k) generic[k] = cv.kappa[k] >= cv.kappa_floor && std::abs(cv.tau[k]) >= cv.tau_floor;

    // Contiguous runs of one branch; a closed curve may wrap its last run into the first.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t k = 0; k < n;) {
        std::size_t e = k;
        while (e + 1 < n && generic[e + 1] == generic[k]) ++e;
        runs.push_back({k, e});
        k = e + 1;
    }

    auto node_centers = [&](std::size_t first, std::size_t last) {
        std::vector<Vec3> centers;
        if (generic[first]) {
            std::vector<Vec3> plus, minus;
            for (std::size_t k = first; k <= last; ++k) {
                const double kap = cv.kappa[k];
                const Vec3 u = (-(1.0 / kap) * cv.n[k] + (cv.kappa_prime[k] / (kap * kap * cv.tau[k])) * cv.b[k]).normalized();
                plus.push_back(cv.points[k] - R * u);
                minus.push_back(cv.points[k] + R * u);
            }
            centers = spread_of(plus, mean_of(plus)) <= spread_of(minus, mean_of(minus)) ? plus : minus;
        } else {
            for (std::size_t k = first; k <= last; ++k) {
                const double kap = cv.kappa[k];
                const Vec3 oc = cv.points[k] + cv.n[k] / kap;
                const double d = std::sqrt(std::max(R * R - 1.0 / (kap * kap), 0.0));
                const Vec3 a = oc + d * cv.b[k], b = oc - d * cv.b[k];
                const Vec3& N = gamma.surface_normal[k];
                centers.push_back(std::abs(N.dot(cv.points[k] - a)) <= std::abs(N.dot(cv.points[k] - b)) ? a : b);
            }
        }
        return centers;
    };

    std::vector<std::vector<Vec3>> piece_nodes;
    for (const auto& [first, last] : runs) {
        SpherePiece p;
        p.branch = generic[first] ? SphereBranch::generic_torsion : SphereBranch::planar;
        p.first = first;
        p.last = last;
        piece_nodes.push_back(node_centers(first, last));
        p.center = mean_of(piece_nodes.back());
        p.spread = spread_of(piece_nodes.back(), p.center);
        cert.pieces.push_back(p);
    }

    bool agree = true;
    for (const auto& p : cert.pieces) agree = agree && (p.center - cert.pieces.front().center).norm() <= opt.center_tol * R;
    std::vector<Vec3> node_center(n);
    if (agree) {
        std::vector<Vec3> all;
        for (const auto& v : piece_nodes) all.insert(all.end(), v.begin(), v.end());
        cert.center = mean_of(all);
        bool any_generic = false;
        for (const auto& p : cert.pieces) any_generic = any_generic || p.branch == SphereBranch::generic_torsion;
        cert.branch = any_generic ? SphereBranch::generic_torsion : SphereBranch::planar;
        std::fill(node_center.begin(), node_center.end(), cert.center);
    } else {
        cert.branch = SphereBranch::piecewise;
        cert.center = cert.pieces.front().center;
        for (const auto& p : cert.pieces) {
            for (std::size_t k = p.first; k <= p.last; ++k) node_center[k] = p.center;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 d = cv.points[k] - node_center[k];
        cert.orthogonality_residual = std::max(cert.orthogonality_residual, std::abs(gamma.surface_normal[k].dot(d)));
        cert.sphericity_residual = std::max(cert.sphericity_residual, std::abs(d.norm() - R));
    }
    return cert;
}

}  // namespace fbma
