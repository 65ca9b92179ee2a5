#include "fbma/diagnostics.hpp"

#include "fbma/error.hpp"
#include "fbma/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fbma {

HopfData hopf_extract(const SurfacePatch& patch, const HopfOptions& opt)
{
    const Chart& c = patch.chart;
    if (!c.is_annulus()) throw InputError("hopf_extract: expects a patch on the annulus chart");
    if (patch.normals.size() != c.size()) throw InputError("hopf_extract: patch has no normals");
    const PatchResiduals res = patch_residuals(patch, opt.order);
    if (!(res.conformality <= opt.conformality_tol)) {
        throw NotCertifiableError("hopf_extract: patch is not conformal (residual " + std::to_string(res.conformality) + ")");
    }

    const auto Xt = position_derivative(c, patch.positions, true, 1, opt.order);
    const auto Xtt = position_derivative(c, patch.positions, true, 2, opt.order);
    const auto Xqq = position_derivative(c, patch.positions, false, 2, opt.order);
    const auto Xtq = position_derivative(c, Xt, false, 1, opt.order);

    HopfData out;
    out.f = ComplexField(c);
    out.Phi = ComplexField(c);
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) {
            const std::size_t k = c.index(i, j);
            const Vec3& N = patch.normals[k];
            const Complex f(-0.5 * (Xtt[k] - Xqq[k]).dot(N), Xtq[k].dot(N));
            const Complex z = c.coordinate(i, j);
            out.f[k] = f;
            out.Phi[k] = f / (z * z);
            out.C0_est += f.real();
        }
    }
    out.C0_est /= static_cast<double>(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        out.deviation = std::max(out.deviation, std::abs(out.f[k] - out.C0_est));
        out.imag_max = std::max(out.imag_max, std::abs(out.f[k].imag()));
    }
    const ComplexField fb = d_dzbar(out.f, opt.order);
    for (int i = 1; i + 1 < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) out.holomorphy = std::max(out.holomorphy, std::abs(fb(i, j)));
    }
    return out;
}

WindingResult winding_number(std::span<const Complex> curve, Complex a, double min_distance)
{
    const int n = static_cast<int>(curve.size());
    if (n < 8) throw InputError("winding_number: need at least 8 samples");
    double spacing = 0.0, closest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        if (!std::isfinite(curve[k].real()) || !std::isfinite(curve[k].imag())) throw InputError("winding_number: non-finite sample");
        spacing = std::max(spacing, std::abs(curve[(k + 1) % n] - curve[k]));
        closest = std::min(closest, std::abs(curve[k] - a));
    }
    if (min_distance < 0.0) min_distance = spacing;
    if (closest < min_distance) {
        throw IllConditionedError("winding_number: point lies within " + std::to_string(closest) + " of the curve");
    }
    const Stencil1D d1(n, 1.0, 1, 4, n);
    std::vector<Complex> dg(n);
    d1.apply(curve.data(), 1, dg.data(), 1);
    Complex sum = 0.0;
    for (int k = 0; k < n; ++k) sum += dg[k] / (curve[k] - a);
    const Complex w = sum / Complex(0.0, 2.0 * std::numbers::pi);
    WindingResult out;
    out.raw = w.real();
    out.n = static_cast<int>(std::lround(w.real()));
    out.defect = std::abs(w.real() - out.n) + std::abs(w.imag());
    if (!(out.defect < 0.1)) {
        throw IllConditionedError("winding_number: rounding defect " + std::to_string(out.defect) + " >= 0.1");
    }
    return out;
}

namespace {

double point_segment_distance(Complex p, Complex a, Complex b)
{
    const Complex d = b - a;
    const double l2 = std::norm(d);
    double s = l2 > 0.0 ? ((p - a) * std::conj(d)).real() / l2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * d));
}

double curve_distance(Complex p, std::span<const Complex> c)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.size(); ++k) best = std::min(best, point_segment_distance(p, c[k], c[(k + 1) % c.size()]));
    return best;
}

bool closed_curve_simple(std::span<const Complex> c)
{
    std::vector<Vec2> v;
    v.reserve(c.size());
    for (const Complex& z : c) v.emplace_back(z.real(), z.imag());
    try {
        return polyline_simple(v, true).simple;
    } catch (const InputError&) {
        return false;  // repeated vertices
    }
}

}  // namespace

InjectivityReport injectivity_report(const WeierstrassData& data, const InjectivityOptions& opt)
{
    const Chart& c = data.chart();
    if (!c.is_annulus()) throw InputError("injectivity_report: expects data on the annulus chart");
    if (opt.grid < 2) throw ConfigError("injectivity_report: grid must be >= 2");

    InjectivityReport rep;
    const ComplexField gz = data.dg ? *data.dg : d_dz(data.g, 4);
    rep.min_derivative = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gz.size(); ++k) rep.min_derivative = std::min(rep.min_derivative, std::abs(gz[k]));

    std::vector<Complex> inner(c.cols()), outer(c.cols());
    for (int j = 0; j < c.cols(); ++j) {
        inner[j] = data.g(0, j);
        outer[j] = data.g(c.rows() - 1, j);
    }
    rep.inner_simple = closed_curve_simple(inner);
    rep.outer_simple = closed_curve_simple(outer);
    rep.boundary_embedded = rep.inner_simple && rep.outer_simple;

    double seg = 0.0;
    double x0 = inner[0].real(), x1 = x0, y0 = inner[0].imag(), y1 = y0;
    for (const auto* curve : {&inner, &outer}) {
        const int n = static_cast<int>(curve->size());
        for (int k = 0; k < n; ++k) {
            const Complex z = (*curve)[k];
            seg = std::max(seg, std::abs((*curve)[(k + 1) % n] - z));
            x0 = std::min(x0, z.real());
            x1 = std::max(x1, z.real());
            y0 = std::min(y0, z.imag());
            y1 = std::max(y1, z.imag());
        }
    }
    const double exclusion = opt.exclusion * seg;
    for (int a = 0; a < opt.grid; ++a) {
        for (int b = 0; b < opt.grid; ++b) {
            const Complex p(x0 + (x1 - x0) * a / (opt.grid - 1), y0 + (y1 - y0) * b / (opt.grid - 1));
            if (curve_distance(p, inner) < exclusion || curve_distance(p, outer) < exclusion) {
                ++rep.skipped;
                continue;
            }
            try {
                const WindingResult w1 = winding_number(inner, p, 0.0);
                const WindingResult w2 = winding_number(outer, p, 0.0);
                InjectivityPoint q{p, w1.n, w2.n, w2.n - w1.n, std::max(w1.defect, w2.defect)};
                rep.max_defect = std::max(rep.max_defect, q.defect);
                rep.max_difference = std::max(rep.max_difference, q.difference);
                if (q.difference < 0) rep.nonnegative = false;
                rep.points.push_back(q);
            } catch (const IllConditionedError&) {
                ++rep.skipped;
            }
        }
    }

    bool zero_one = !rep.points.empty();
    bool has_one = false;
    for (const auto& q : rep.points) {
        if (q.difference != 0 && q.difference != 1) zero_one = false;
        if (q.difference == 1) has_one = true;
    }
    const bool regular = rep.min_derivative > opt.derivative_floor;
    rep.consistent = zero_one && has_one && rep.boundary_embedded && regular;
    if (!regular) {
        rep.verdict = "derivative of g vanishes";
    } else if (!rep.boundary_embedded) {
        rep.verdict = "boundary not embedded";
    } else if (!rep.nonnegative) {
        rep.verdict = "negative winding difference";
    } else if (rep.consistent) {
        rep.verdict = "consistent with injectivity";
    } else {
        rep.verdict = "not injective";
    }
    return rep;
}

GaussMapKappa gauss_map_kappa_g(std::span<const Complex> g, std::span<const Complex> gt, std::span<const Complex> gtt, double c)
{
    if (g.size() != gt.size() || g.size() != gtt.size()) throw InputError("gauss_map_kappa_g: sample counts differ");
    if (!(c != 0.0) || !std::isfinite(c)) throw ConfigError("gauss_map_kappa_g: c must be finite and nonzero");
    GaussMapKappa out;
    const std::size_t n = g.size();
    out.kappa_g.resize(n);
    out.bracket.resize(n);
    out.g_theta_abs.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::abs(g[k]);
        const double mt = std::abs(gt[k]);
        if (m < 1e-14 || mt < 1e-14) {
            throw SingularDataError("gauss_map_kappa_g: g or g_theta vanishes at node " + std::to_string(k));
        }
        const double s = 1.0 + m * m;
        const double im = (gtt[k] / gt[k] - (2.0 * m * m / s) * (gt[k] / g[k])).imag();
        out.bracket[k] = (2.0 / s) * im / mt;
        out.g_theta_abs[k] = mt;
        out.kappa_g[k] = out.bracket[k] * mt * mt / std::abs(c);
    }
    return out;
}

GaussMapKappa gauss_map_kappa_g(std::span<const Complex> g, double c)
{
    const int n = static_cast<int>(g.size());
    if (n < 8) throw InputError("gauss_map_kappa_g: need at least 8 samples");
    const double h = 2.0 * std::numbers::pi / n;
    const Stencil1D d1(n, h, 1, 4, n), d2(n, h, 2, 4, n);
    std::vector<Complex> gt(n), gtt(n);
    d1.apply(g.data(), 1, gt.data(), 1);
    d2.apply(g.data(), 1, gtt.data(), 1);
    return gauss_map_kappa_g(g, gt, gtt, c);
}

}  // namespace fbma
