#include "fbma/rebuild.hpp"

#include "fbma/error.hpp"
#include "fbma/quadrature.hpp"
#include "fbma/stencil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fbma {

namespace {

using Frame = Mat3;  // rows e1, e2, N

struct Coeffs {
    double mu_x, mu_y, lambda;
};

// Gauss-Weingarten generator along x (A) or y (B), with II = diag(C0, -C0) / Lambda.
Mat3 generator(const Coeffs& k, double C0, bool along_x)
{
    const double s = C0 / k.lambda;
    Mat3 G = Mat3::Zero();
    if (along_x) {
        G(0, 1) = -k.mu_y;
        G(1, 0) = k.mu_y;
        G(0, 2) = s;
        G(2, 0) = -s;
    } else {
        G(0, 1) = k.mu_x;
        G(1, 0) = -k.mu_x;
        G(1, 2) = -s;
        G(2, 1) = s;
    }
    return G;
}

struct State {
    Frame F;
    Vec3 X;
};

State derivative(const State& y, const Coeffs& k, double C0, bool along_x)
{
    return {generator(k, C0, along_x) * y.F, k.lambda * Vec3(y.F.row(along_x ? 0 : 1).transpose())};
}

State axpy(const State& y, double h, const State& d) { return {y.F + h * d.F, y.X + h * d.X}; }

// Cubic interpolation at the midpoint of [k, k+1] from a line of samples.
double midpoint(const std::vector<double>& line, int k, bool periodic, int period)
{
    const int n = static_cast<int>(line.size());
    auto at = [&](int m) { return line[periodic ? ((m % period) + period) % period : m]; };
    if (periodic || (k >= 1 && k + 2 < n)) return (-at(k - 1) + 9.0 * at(k) + 9.0 * at(k + 1) - at(k + 2)) / 16.0;
    if (n < 4) return 0.5 * (line[k] + line[k + 1]);
    if (k == 0) return (5.0 * line[0] + 15.0 * line[1] - 5.0 * line[2] + line[3]) / 16.0;
    // k = n - 2: mirror of the left closure.
    return (5.0 * line[n - 1] + 15.0 * line[n - 2] - 5.0 * line[n - 3] + line[n - 4]) / 16.0;
}

double orthonormalize(Frame& F, double& drift)
{
    const Mat3 G = F * F.transpose() - Mat3::Identity();
    drift = std::max(drift, G.cwiseAbs().maxCoeff());
    Vec3 e1 = F.row(0).transpose().normalized();
    Vec3 e2 = F.row(1).transpose();
    e2 = (e2 - e2.dot(e1) * e1).normalized();
    const Vec3 N = e1.cross(e2);
    Frame out;
    out.row(0) = e1.transpose();
    out.row(1) = e2.transpose();
    out.row(2) = N.transpose();
    const double corr = (out - F).norm();
    F = out;
    return corr;
}

}  // namespace

SurfacePatch FrameField::patch() const
{
    SurfacePatch p;
    p.chart = chart;
    p.positions = positions;
    p.normals = N;
    p.lambda = Lambda;
    p.II.assign(positions.size(), Complex(-C0, 0.0));
    return p;
}

FrameField frame_integrate(const RealField& vt, double C0, const FrameSeed& seed, const FrameOptions& opt)
{
    const Chart& c = vt.chart();
    if (c.is_annulus()) throw InputError("frame_integrate: expects a slab field");
    if (!std::isfinite(C0) || C0 == 0.0) throw ConfigError("frame_integrate: C0 must be nonzero");
    if (std::abs(seed.e1.dot(seed.N)) > 1e-12 || std::abs(seed.e1.norm() - 1.0) > 1e-12 || std::abs(seed.N.norm() - 1.0) > 1e-12) {
        throw ConfigError("frame_integrate: seed frame must be orthonormal");
    }

    FrameField out;
    out.chart = c;
    out.C0 = C0;
    out.compatibility_residual = slab_residual(vt, C0, opt.order).interior;
    if (!(out.compatibility_residual <= opt.compatibility_tol)) {
        throw InconsistencyError("frame_integrate: Gauss equation residual " + std::to_string(out.compatibility_residual) +
                                 " exceeds tolerance; the field is not a Liouville solution");
    }

    RealField mu(c);
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = -0.5 * vt[k];
    const RealField mu_x = d_col(mu, opt.order);
    const RealField mu_y = d_row(mu, opt.order);
    out.Lambda.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        out.Lambda[k] = std::exp(mu[k]);
        if (!(out.Lambda[k] > opt.lambda_floor)) throw DomainError("frame_integrate: conformal factor degenerates");
    }

    const std::size_t n = c.size();
    std::vector<Frame> F(n);
    out.positions.resize(n);

    auto step = [&](State y, const Coeffs& k0, const Coeffs& km, const Coeffs& k1, double h, bool along_x) {
        const State d1 = derivative(y, k0, C0, along_x);
        const State d2 = derivative(axpy(y, 0.5 * h, d1), km, C0, along_x);
        const State d3 = derivative(axpy(y, 0.5 * h, d2), km, C0, along_x);
        const State d4 = derivative(axpy(y, h, d3), k1, C0, along_x);
        y.F += (h / 6.0) * (d1.F + 2.0 * d2.F + 2.0 * d3.F + d4.F);
        y.X += (h / 6.0) * (d1.X + 2.0 * d2.X + 2.0 * d3.X + d4.X);
        out.total_correction += orthonormalize(y.F, out.max_drift);
        return y;
    };
    auto node_coeffs = [&](std::size_t k) { return Coeffs{mu_x[k], mu_y[k], out.Lambda[k]}; };

    Frame F0;
    F0.row(0) = seed.e1.transpose();
    F0.row(1) = seed.N.cross(seed.e1).transpose();
    F0.row(2) = seed.N.transpose();
    F[c.index(0, 0)] = F0;
    out.positions[c.index(0, 0)] = seed.position;

    // Seed column Re xi = 0, along Im xi.
    {
        std::vector<double> lx(c.rows()), ly(c.rows()), ll(c.rows());
        for (int i = 0; i < c.rows(); ++i) {
            const std::size_t k = c.index(i, 0);
            lx[i] = mu_x[k];
            ly[i] = mu_y[k];
            ll[i] = mu[k];
        }
        State y{F0, seed.position};
        for (int i = 0; i + 1 < c.rows(); ++i) {
            const Coeffs km{midpoint(lx, i, false, 0), midpoint(ly, i, false, 0), std::exp(midpoint(ll, i, false, 0))};
            y = step(y, node_coeffs(c.index(i, 0)), km, node_coeffs(c.index(i + 1, 0)), c.row_step(), false);
            F[c.index(i + 1, 0)] = y.F;
            out.positions[c.index(i + 1, 0)] = y.X;
        }
    }
    // Rows along Re xi; the metric is periodic in Re xi, so interpolation wraps.
    const bool periodic = c.col_periodic();
    const int period = c.col_period();
    std::vector<double> lx(c.cols()), ly(c.cols()), ll(c.cols());
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) {
            const std::size_t k = c.index(i, j);
            lx[j] = mu_x[k];
            ly[j] = mu_y[k];
            ll[j] = mu[k];
        }
        State y{F[c.index(i, 0)], out.positions[c.index(i, 0)]};
        for (int j = 0; j + 1 < c.cols(); ++j) {
            const Coeffs km{midpoint(lx, j, periodic, period), midpoint(ly, j, periodic, period),
                            std::exp(midpoint(ll, j, periodic, period))};
            y = step(y, node_coeffs(c.index(i, j)), km, node_coeffs(c.index(i, j + 1)), c.col_step(), true);
            F[c.index(i, j + 1)] = y.F;
            out.positions[c.index(i, j + 1)] = y.X;
        }
    }

    out.e1.resize(n);
    out.e2.resize(n);
    out.N.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.e1[k] = F[k].row(0).transpose();
        out.e2[k] = F[k].row(1).transpose();
        out.N[k] = F[k].row(2).transpose();
    }
    return out;
}

double verify_metric_condition(const RealField& v, const FrameField& frame, double lambda_scale)
{
    const RealField vt = lift_to_slab(v, frame.chart.copies());
    if (!vt.chart().same_shape(frame.chart)) throw InputError("verify_metric_condition: solution and frame grids differ");
    const auto Xx = position_derivative(frame.chart, frame.positions, false, 1, 4);
    const auto Xy = position_derivative(frame.chart, frame.positions, true, 1, 4);
    double worst = 0.0;
    for (std::size_t k = 0; k < vt.size(); ++k) {
        const double lam = lambda_scale * std::sqrt(0.5 * (Xx[k].squaredNorm() + Xy[k].squaredNorm()));
        worst = std::max(worst, std::abs(vt[k] + 2.0 * std::log(lam)));
    }
    return worst;
}

CurveOnSurface level_curve(const SurfacePatch& p, int row)
{
    const Chart& c = p.chart;
    if (c.is_annulus()) return row_curve(p, row);
    const int P = c.cols_per_turn();
    const double scale = std::max(1.0, p.position(row, 0).norm());
    const bool closes = (p.position(row, P) - p.position(row, 0)).norm() < 1e-11 * scale;
    std::vector<GridNode> path;
    const int end = closes ? P : c.cols();
    for (int j = 0; j < end; ++j) path.push_back({row, j});
    return curve_on_surface(p, path, closes);
}

SphereFinding find_spheres(const SurfacePatch& patch, const SphereOptions& opt)
{
    SphereFinding out;
    const CurveOnSurface g1 = level_curve(patch, 0);
    const CurveOnSurface g2 = level_curve(patch, patch.chart.rows() - 1);
    for (const auto* g : {&g1, &g2}) {
        double mean = 0.0;
        for (double k : g->geodesic_curvature) mean += k;
        mean /= static_cast<double>(g->geodesic_curvature.size());
        if (std::abs(std::abs(mean) - 1.0) > opt.unit_tol) {
            throw InconsistencyError("find_spheres: boundary geodesic curvature " + std::to_string(mean) +
                                     " does not have unit modulus");
        }
    }
    out.inner = certify_orthogonal_sphere(g1, opt.certify);
    out.outer = certify_orthogonal_sphere(g2, opt.certify);
    out.O1 = out.inner.center;
    out.O2 = out.outer.center;
    out.distance = (out.O1 - out.O2).norm();
    out.concentric = out.distance < opt.concentric_tol;
    return out;
}

std::string to_string(PieceClass c)
{
    switch (c) {
    case PieceClass::identity: return "identity";
    case PieceClass::rotation: return "rotation";
    case PieceClass::non_closing: return "non_closing";
    }
    return "unknown";
}

namespace {

std::vector<Vec3> period_block(const SurfacePatch& p, int copy)
{
    const Chart& c = p.chart;
    const int P = c.cols_per_turn();
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(c.rows()) * (P + 1));
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j <= P; ++j) out.push_back(p.position(i, copy * P + j));
    }
    return out;
}

// Best rational p/q (q <= qmax) to x in [0, 1] by continued fractions.
std::pair<int, int> rational_approximation(double x, int qmax, double tol)
{
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        const long long h2 = static_cast<long long>(a) * h1 + h0;
        const long long k2 = static_cast<long long>(a) * k1 + k0;
        if (k2 > qmax) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / k1) * k1 < tol) break;
        const double frac = r - a;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return {static_cast<int>(h1), static_cast<int>(k1)};
}

}  // namespace

FundamentalDecomposition decompose(const SurfacePatch& patch, const DecomposeOptions& opt)
{
    const Chart& c = patch.chart;
    if (c.is_annulus()) throw InputError("decompose: expects a slab patch");
    if (c.copies() < 2) throw ConfigError("decompose: needs at least two periods (copies >= 2)");
    if (opt.n_max < 1) throw ConfigError("decompose: n_max must be >= 1");

    FundamentalDecomposition out;
    const auto h0 = period_block(patch, 0);
    const auto h1 = period_block(patch, 1);
    const RigidFit fit = fit_rigid_motion(h0, h1);
    out.T = fit.motion;
    out.fit_rms = fit.rms;
    for (int n = 1; n < c.copies(); ++n) {
        const RigidMotion Tn = out.T.power(n);
        const auto hn = period_block(patch, n);
        out.power_residuals.push_back(rms_distance(Tn.apply(h0), hn));
    }

    // Piece X(H0) as its own one-period slab patch.
    SlabSpec spec = c.slab_spec();
    spec.copies = 1;
    out.piece.chart = Chart::slab(spec);
    const int P = c.cols_per_turn();
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j <= P; ++j) {
            const std::size_t k = c.index(i, j);
            out.piece.positions.push_back(patch.positions[k]);
            if (patch.normals.size() == c.size()) out.piece.normals.push_back(patch.normals[k]);
            if (patch.lambda.size() == c.size()) out.piece.lambda.push_back(patch.lambda[k]);
            if (patch.II.size() == c.size()) out.piece.II.push_back(patch.II[k]);
        }
    }

    if (opt.fixed_center) {
        const double moved = (out.T(*opt.fixed_center) - *opt.fixed_center).norm();
        if (moved > opt.center_tol) {
            throw InconsistencyError("decompose: T moves the common sphere center by " + std::to_string(moved));
        }
    }

    out.angle = out.T.angle();
    const double scale = std::max(1.0, std::sqrt([&] {
                                      double s = 0.0;
                                      for (const auto& x : h0) s += x.squaredNorm();
                                      return s / h0.size();
                                  }()));
    if (out.angle < opt.identity_tol && out.T.translation.norm() < opt.identity_tol * scale) {
        out.classification = PieceClass::identity;
        out.N = 1;
        out.k = 0;
        out.closure_error = std::max(out.angle, out.T.translation.norm());
        out.note = "annular piece; T is the identity";
        return out;
    }
    out.axis = out.T.axis();
    const double x = out.angle / (2.0 * std::numbers::pi);
    const auto [p, q] = rational_approximation(x, opt.n_max, opt.angle_tol);
    const double mismatch = std::abs(q * out.angle - 2.0 * std::numbers::pi * p);
    if (q >= 1 && q <= opt.n_max && mismatch < opt.angle_tol) {
        const RigidMotion TN = out.T.power(q);
        out.closure_error = std::max((TN.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), TN.translation.norm());
        if (out.closure_error < std::max(opt.angle_tol, 1e-8) * scale * q) {
            out.classification = PieceClass::rotation;
            out.N = q;
            out.k = p;
            out.note = "least-squares T; pieces with extra symmetry admit other choices";
            return out;
        }
        out.note = "rational angle but T^N is not the identity (screw motion)";
    } else {
        out.note = "angle / 2 pi has no rational approximation with denominator <= " + std::to_string(opt.n_max);
    }
    out.classification = PieceClass::non_closing;
    return out;
}

std::vector<BoundarySegment> annulus_boundaries(const Chart& c)
{
    const int n = c.is_annulus() ? c.cols() : c.cols_per_turn();
    BoundarySegment inner{"gamma_1", true, {}, true, -1, 0};
    BoundarySegment outer{"gamma_2", true, {}, true, 1, 0};
    for (int j = 0; j < n; ++j) {
        inner.nodes.push_back({0, j});
        outer.nodes.push_back({c.rows() - 1, j});
    }
    return {inner, outer};
}

SurfacePatch column_piece(const SurfacePatch& p, int j0, int j1)
{
    const Chart& c = p.chart;
    SurfacePatch out;
    out.chart = c.column_block(j0, j1);
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = j0; j <= j1; ++j) {
            const std::size_t k = c.index(i, j);
            out.positions.push_back(p.positions[k]);
            if (p.normals.size() == c.size()) out.normals.push_back(p.normals[k]);
            if (p.lambda.size() == c.size()) out.lambda.push_back(p.lambda[k]);
            if (p.II.size() == c.size()) out.II.push_back(p.II[k]);
        }
    }
    return out;
}

std::vector<BoundarySegment> piece_boundaries(const Chart& c)
{
    if (c.col_periodic()) throw InputError("piece_boundaries: chart wraps; use annulus_boundaries");
    BoundarySegment g1{"gamma_1", true, {}, false, -1, 0};
    BoundarySegment g2{"gamma_2", true, {}, false, 1, 0};
    BoundarySegment s1{"C_1", false, {}, false, 0, -1};
    BoundarySegment s2{"C_2", false, {}, false, 0, 1};
    for (int j = 0; j < c.cols(); ++j) {
        g1.nodes.push_back({0, j});
        g2.nodes.push_back({c.rows() - 1, j});
    }
    for (int i = 0; i < c.rows(); ++i) {
        s1.nodes.push_back({i, 0});
        s2.nodes.push_back({i, c.cols() - 1});
    }
    return {g1, g2, s1, s2};
}

FluxReport flux_and_torque(const SurfacePatch& piece, const std::vector<BoundarySegment>& boundaries, const Vec3& origin,
                           bool spheres_concentric, double flux_tol)
{
    const Chart& c = piece.chart;
    if (boundaries.empty()) throw InputError("flux_and_torque: no boundary segments");
    FluxReport rep;

    // Area from the metric factor in the flat chart coordinate.
    RealField dens(c);
    for (int i = 0; i < c.rows(); ++i) {
        const double r2 = c.is_annulus() ? std::exp(2.0 * c.row_coord(i)) : 1.0;
        for (int j = 0; j < c.cols(); ++j) {
            const double l = piece.lambda.at(c.index(i, j));
            dens(i, j) = l * l * r2;
        }
    }
    rep.area = integrate_chart(dens);

    const auto Xr = position_derivative(c, piece.positions, true, 1, 4);
    const auto Xc = position_derivative(c, piece.positions, false, 1, 4);

    for (const auto& seg : boundaries) {
        if (seg.label.empty()) throw InputError("flux_and_torque: unlabeled boundary segment");
        if (seg.nodes.size() < 2) throw InputError("flux_and_torque: segment '" + seg.label + "' is too short");
        if (seg.out_row == 0 && seg.out_col == 0) throw InputError("flux_and_torque: segment '" + seg.label + "' has no outward direction");
        const int m = static_cast<int>(seg.nodes.size());
        std::vector<Vec3> x(m);
        for (int k = 0; k < m; ++k) x[k] = piece.position(seg.nodes[k].row, seg.nodes[k].col);
        // Tangent along the node sequence, in the segment parameter (unit node spacing).
        int order = 8;
        while (order > 2 && m < 2 * order + 1) order -= 2;
        Stencil1D st(m, 1.0, 1, order, seg.closed ? m : 0);
        std::vector<Vec3> dx(m);
        for (int comp = 0; comp < 3; ++comp) st.apply(x[0].data() + comp, 3, dx[0].data() + comp, 3);

        std::array<std::vector<double>, 10> f;
        for (auto& v : f) v.resize(m);
        for (int k = 0; k < m; ++k) {
            const std::size_t id = c.index(seg.nodes[k].row, seg.nodes[k].col);
            const double speed = dx[k].norm();
            const Vec3 t = dx[k] / speed;
            const Vec3 out_dir = seg.out_row * Xr[id] + seg.out_col * Xc[id];
            const Vec3 nu = (out_dir - out_dir.dot(t) * t).normalized();
            const Vec3 Y = x[k] - origin;
            const Vec3 torque = Y.cross(nu);
            f[0][k] = speed;
            for (int d = 0; d < 3; ++d) {
                f[1 + d][k] = nu[d] * speed;
                f[4 + d][k] = torque[d] * speed;
            }
            f[7][k] = Y.dot(nu) * speed;
        }
        auto integrate = [&](const std::vector<double>& v) {
            return seg.closed ? integrate_periodic(v, 1.0) : integrate_line(v, 1.0);
        };
        SegmentIntegrals s;
        s.label = seg.label;
        s.spherical = seg.spherical;
        s.length = integrate(f[0]);
        for (int d = 0; d < 3; ++d) {
            s.flux[d] = integrate(f[1 + d]);
            s.torque[d] = integrate(f[4 + d]);
        }
        s.support = integrate(f[7]);
        rep.divergence_rhs += s.support;
        if (seg.spherical) {
            rep.max_spherical_flux = std::max(rep.max_spherical_flux, s.flux.norm());
        } else {
            rep.seam_support += s.support;
        }
        rep.segments.push_back(s);
    }
    rep.divergence_lhs = 2.0 * rep.area;
    rep.divergence_gap = std::abs(rep.divergence_lhs - rep.divergence_rhs);
    if (!spheres_concentric) {
        rep.flux_checked = true;
        rep.flux_vanishes = rep.max_spherical_flux < flux_tol;
    }
    return rep;
}

}  // namespace fbma
