#include "fbma/weierstrass.hpp"

#include "fbma/error.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <string>

namespace fbma {

namespace {

using Integrand = std::array<Complex, 3>;

const Complex I(0.0, 1.0);

bool is_pole(const Complex& g) { return !std::isfinite(std::abs(g)) || std::abs(g) > kPoleThreshold; }

Integrand integrand(const Complex& g, const Complex& w)
{
    return {0.5 * (1.0 - g * g) * w, 0.5 * I * (1.0 + g * g) * w, g * w};
}

// d(native coordinate) / d(chart parameter) along the row or column axis.
Complex axis_jacobian(const Chart& c, int i, int j, bool along_rows)
{
    if (c.is_annulus()) {
        const Complex z = c.coordinate(i, j);
        return along_rows ? z : I * z;
    }
    return along_rows ? I : Complex(1.0, 0.0);
}

Vec3 edge_increment(const Integrand& fa, const Complex& ja, const Integrand& fb, const Complex& jb, double step)
{
    Vec3 d;
    for (int k = 0; k < 3; ++k) d[k] = 0.5 * step * (fa[k] * ja + fb[k] * jb).real();
    return d;
}

// Per-edge increments along a line of integrand samples F (already multiplied
// by the axis Jacobian): cubic interpolation through four nodes per edge, with
// one-sided closures at the ends of open lines. Edge k joins nodes k and k+1.
std::vector<Vec3> line_increments(const std::vector<Integrand>& F, double h, bool periodic)
{
    const int n = static_cast<int>(F.size());
    const int edges = periodic ? n : n - 1;
    std::vector<Vec3> out(std::max(edges, 0));
    auto at = [&](int k, int m) { return F[periodic ? ((k % n) + n) % n : k][m]; };
    for (int k = 0; k < edges; ++k) {
        for (int m = 0; m < 3; ++m) {
            Complex s;
            if (periodic ? n >= 4 : (k >= 1 && k + 2 < n)) {
                s = (-at(k - 1, m) + 13.0 * at(k, m) + 13.0 * at(k + 1, m) - at(k + 2, m)) / 24.0;
            } else if (n < 4) {
                s = 0.5 * (at(k, m) + at(k + 1, m));
            } else if (k == 0) {
                s = (9.0 * at(0, m) + 19.0 * at(1, m) - 5.0 * at(2, m) + at(3, m)) / 24.0;
            } else {
                s = (9.0 * at(n - 1, m) + 19.0 * at(n - 2, m) - 5.0 * at(n - 3, m) + at(n - 4, m)) / 24.0;
            }
            out[k][m] = h * s.real();
        }
    }
    return out;
}

struct Prepared {
    std::vector<Integrand> phi;
    std::vector<char> pole;
    bool any_pole = false;
};

Prepared prepare(const WeierstrassData& data)
{
    Prepared p;
    const std::size_t n = data.g.size();
    p.phi.resize(n);
    p.pole.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        if (is_pole(data.g[k])) {
            p.pole[k] = 1;
            p.any_pole = true;
        } else {
            p.phi[k] = integrand(data.g[k], data.omega[k]);
        }
    }
    return p;
}

// Neighbor of (i, j) one step along an axis. Annulus columns wrap; slab
// charts store the closing column explicitly, so they do not.
bool neighbor(const Chart& c, int i, int j, bool along_rows, int dir, int& ni, int& nj)
{
    ni = i;
    nj = j;
    if (along_rows) {
        ni = i + dir;
        return ni >= 0 && ni < c.rows();
    }
    nj = j + dir;
    if (c.col_periodic() && c.is_annulus()) {
        nj = ((nj % c.col_period()) + c.col_period()) % c.col_period();
        return true;
    }
    return nj >= 0 && nj < c.cols();
}

}  // namespace

void WeierstrassData::validate() const
{
    if (!g.chart().same_shape(omega.chart())) throw InputError("weierstrass: g and omega live on different charts");
    if (dg && !dg->chart().same_shape(g.chart())) throw InputError("weierstrass: dg lives on a different chart");
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (is_pole(g[k])) {
            if (!(std::abs(omega[k]) < kZeroThreshold)) {
                throw SingularDataError("weierstrass: g has a pole at node " + std::to_string(k) +
                                        " where omega does not vanish");
            }
        } else if (!std::isfinite(std::abs(omega[k]))) {
            throw SingularDataError("weierstrass: omega is not finite at node " + std::to_string(k));
        }
    }
}

WeierstrassData WeierstrassData::from_functions(const Chart& chart, const std::function<Complex(Complex)>& g,
                                                const std::function<Complex(Complex)>& omega,
                                                const std::function<Complex(Complex)>& dg)
{
    WeierstrassData d{sample(chart, g), sample(chart, omega), std::nullopt};
    if (dg) d.dg = sample(chart, dg);
    return d;
}

WeierstrassData WeierstrassData::from_developing_map(const Chart& slab, double C0,
                                                     const std::function<Complex(Complex)>& h,
                                                     const std::function<Complex(Complex)>& h_xi)
{
    if (slab.is_annulus()) throw InputError("from_developing_map: expects a slab chart");
    return from_functions(
        slab, [&](Complex xi) { return C0 * h(xi); }, [&](Complex xi) { return -1.0 / h_xi(xi); },
        [&](Complex xi) { return C0 * h_xi(xi); });
}

Vec3 stereographic(const Complex& g)
{
    if (is_pole(g)) return {0.0, 0.0, 1.0};
    const double m = std::norm(g);
    return Vec3(2.0 * g.real(), 2.0 * g.imag(), m - 1.0) / (1.0 + m);
}

std::vector<Vec3> gauss_sphere_map(const WeierstrassData& data)
{
    std::vector<Vec3> out;
    out.reserve(data.g.size());
    for (std::size_t k = 0; k < data.g.size(); ++k) out.push_back(stereographic(data.g[k]));
    return out;
}

SurfacePatch integrate_immersion(const WeierstrassData& data, GridNode base, const Vec3& base_position)
{
    data.validate();
    const Chart& c = data.chart();
    if (base.row < 0 || base.row >= c.rows() || base.col < 0 || base.col >= c.cols()) {
        throw InputError("integrate_immersion: basepoint outside the chart");
    }
    const Prepared p = prepare(data);
    if (p.pole[c.index(base.row, base.col)]) throw SingularDataError("integrate_immersion: basepoint is a pole");

    SurfacePatch patch;
    patch.chart = c;
    patch.positions.assign(c.size(), Vec3::Constant(std::nan("")));
    std::vector<char> done(c.size(), 0);

    auto step_from = [&](int i, int j, int ni, int nj, bool along_rows, int dir) {
        const std::size_t a = c.index(i, j);
        const std::size_t b = c.index(ni, nj);
        const double h = dir * (along_rows ? c.row_step() : c.col_step());
        patch.positions[b] = patch.positions[a] + edge_increment(p.phi[a], axis_jacobian(c, i, j, along_rows), p.phi[b],
                                                                 axis_jacobian(c, ni, nj, along_rows), h);
        done[b] = 1;
    };

    patch.positions[c.index(base.row, base.col)] = base_position;
    done[c.index(base.row, base.col)] = 1;

    if (!p.any_pole) {
        // Base column, then each row outward from the base column.
        auto line = [&](int i0, int j0, bool along_rows, int count) {
            std::vector<Integrand> F(count);
            for (int m = 0; m < count; ++m) {
                const int i = along_rows ? m : i0, j = along_rows ? j0 : m;
                const Complex jac = axis_jacobian(c, i, j, along_rows);
                const Integrand& f = p.phi[c.index(i, j)];
                F[m] = {f[0] * jac, f[1] * jac, f[2] * jac};
            }
            return F;
        };
        {
            const auto inc = line_increments(line(0, base.col, true, c.rows()), c.row_step(), false);
            for (int i = base.row; i + 1 < c.rows(); ++i) {
                patch.positions[c.index(i + 1, base.col)] = patch.positions[c.index(i, base.col)] + inc[i];
            }
            for (int i = base.row; i > 0; --i) {
                patch.positions[c.index(i - 1, base.col)] = patch.positions[c.index(i, base.col)] - inc[i - 1];
            }
        }
        const bool wrap = c.col_periodic() && c.is_annulus();
        for (int i = 0; i < c.rows(); ++i) {
            const auto inc = line_increments(line(i, 0, false, c.cols()), c.col_step(), wrap);
            if (wrap) {
                const int n = c.col_period();
                for (int s = 0; s + 1 < n; ++s) {
                    const int j = (base.col + s) % n;
                    patch.positions[c.index(i, (j + 1) % n)] = patch.positions[c.index(i, j)] + inc[j];
                }
                // Closing edge: compare the walked value with the start.
                const int last = (base.col + n - 1) % n;
                const Vec3 closed = patch.positions[c.index(i, last)] + inc[last];
                patch.row_closure_defects.push_back(closed - patch.positions[c.index(i, base.col)]);
            } else {
                for (int j = base.col; j + 1 < c.cols(); ++j) {
                    patch.positions[c.index(i, j + 1)] = patch.positions[c.index(i, j)] + inc[j];
                }
                for (int j = base.col; j > 0; --j) {
                    patch.positions[c.index(i, j - 1)] = patch.positions[c.index(i, j)] - inc[j - 1];
                }
            }
        }
    } else {
        // Breadth-first tree over non-pole nodes; row moves are tried first so
        // the tree matches the pole-free layout wherever it can.
        std::deque<GridNode> queue{base};
        while (!queue.empty()) {
            const GridNode n = queue.front();
            queue.pop_front();
            for (int axis = 0; axis < 2; ++axis) {
                for (int dir : {1, -1}) {
                    int ni, nj;
                    const bool rows = axis == 0;
                    if (!neighbor(c, n.row, n.col, rows, dir, ni, nj)) continue;
                    const std::size_t b = c.index(ni, nj);
                    if (done[b] || p.pole[b]) continue;
                    step_from(n.row, n.col, ni, nj, rows, dir);
                    queue.push_back({ni, nj});
                }
            }
        }
        // Pole nodes: one-sided step from any reached neighbor.
        for (int i = 0; i < c.rows(); ++i) {
            for (int j = 0; j < c.cols(); ++j) {
                const std::size_t k = c.index(i, j);
                if (!p.pole[k]) continue;
                for (int axis = 0; axis < 2 && !done[k]; ++axis) {
                    for (int dir : {1, -1}) {
                        int ni, nj;
                        const bool rows = axis == 0;
                        if (!neighbor(c, i, j, rows, dir, ni, nj)) continue;
                        const std::size_t a = c.index(ni, nj);
                        if (!done[a] || p.pole[a]) continue;
                        const double h = -dir * (rows ? c.row_step() : c.col_step());
                        Vec3 d;
                        const Complex ja = axis_jacobian(c, ni, nj, rows);
                        for (int m = 0; m < 3; ++m) d[m] = h * (p.phi[a][m] * ja).real();
                        patch.positions[k] = patch.positions[a] + d;
                        done[k] = 1;
                        break;
                    }
                }
            }
        }
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!done[k]) throw SingularDataError("integrate_immersion: poles disconnect the chart; cannot route");
        }
    }

    // Normal, metric factor, and second fundamental form coefficient.
    patch.normals = gauss_sphere_map(data);
    patch.lambda.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        patch.lambda[k] = p.pole[k] ? std::nan("") : 0.5 * (1.0 + std::norm(data.g[k])) * std::abs(data.omega[k]);
    }
    const ComplexField dg = data.dg ? *data.dg : d_dz(data.g);
    patch.II.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) patch.II[k] = dg[k] * data.omega[k];

    // Fill pole-node metric values from their neighbors.
    if (p.any_pole) {
        for (int i = 0; i < c.rows(); ++i) {
            for (int j = 0; j < c.cols(); ++j) {
                const std::size_t k = c.index(i, j);
                if (!p.pole[k]) continue;
                double s = 0.0;
                int n = 0;
                for (int axis = 0; axis < 2; ++axis) {
                    for (int dir : {1, -1}) {
                        int ni, nj;
                        if (!neighbor(c, i, j, axis == 0, dir, ni, nj)) continue;
                        const double v = patch.lambda[c.index(ni, nj)];
                        if (std::isfinite(v)) {
                            s += v;
                            ++n;
                        }
                    }
                }
                patch.lambda[k] = n ? s / n : std::nan("");
            }
        }
    }
    return patch;
}

Vec3 period_integral(const WeierstrassData& data, std::span<const GridNode> loop)
{
    data.validate();
    const Chart& c = data.chart();
    if (loop.size() < 2) throw InputError("period_integral: loop needs at least two nodes");
    Vec3 total = Vec3::Zero();
    for (std::size_t s = 0; s < loop.size(); ++s) {
        const GridNode a = loop[s];
        const GridNode b = loop[(s + 1) % loop.size()];
        const std::size_t ka = c.index(a.row, a.col);
        const std::size_t kb = c.index(b.row, b.col);
        if (is_pole(data.g[ka]) || is_pole(data.g[kb])) {
            throw SingularDataError("period_integral: loop crosses a pole of g");
        }
        const int di = b.row - a.row;
        int dj = b.col - a.col;
        if (c.col_periodic()) {
            const int n = c.col_period();
            dj = ((dj % n) + n) % n;
            if (dj > n / 2) dj -= n;
        }
        if (std::abs(di) + std::abs(dj) != 1) throw InputError("period_integral: loop nodes are not grid-adjacent");
        const bool rows = di != 0;
        const double h = (rows ? di * c.row_step() : dj * c.col_step());
        total += edge_increment(integrand(data.g[ka], data.omega[ka]), axis_jacobian(c, a.row, a.col, rows),
                                integrand(data.g[kb], data.omega[kb]), axis_jacobian(c, b.row, b.col, rows), h);
    }
    return total;
}

std::vector<GridNode> circle_loop(const Chart& chart, int row)
{
    if (!chart.col_periodic()) throw InputError("circle_loop: chart columns do not wrap");
    std::vector<GridNode> loop;
    for (int j = 0; j < chart.col_period(); ++j) loop.push_back({row, j});
    return loop;
}

std::vector<GridNode> rectangle_loop(int i0, int i1, int j0, int j1)
{
    std::vector<GridNode> loop;
    for (int j = j0; j < j1; ++j) loop.push_back({i0, j});
    for (int i = i0; i < i1; ++i) loop.push_back({i, j1});
    for (int j = j1; j > j0; --j) loop.push_back({i1, j});
    for (int i = i1; i > i0; --i) loop.push_back({i, j0});
    return loop;
}

Chart position_chart(const Chart& c)
{
    if (c.is_annulus() || !c.col_periodic()) return c;
    SlabSpec spec = c.slab_spec();
    spec.periodic = false;
    return Chart::slab(spec);
}

std::vector<Vec3> position_derivative(const Chart& chart, const std::vector<Vec3>& pos, bool along_rows, int deriv,
                                      int order)
{
    const Chart c = position_chart(chart);
    if (pos.size() != c.size()) throw InputError("position_derivative: positions do not match the chart");
    std::vector<Vec3> out(pos.size());
    for (int comp = 0; comp < 3; ++comp) {
        RealField f(c);
        for (std::size_t k = 0; k < pos.size(); ++k) f[k] = pos[k][comp];
        RealField d = along_rows ? (deriv == 1 ? d_row(f, order) : d_row2(f, order))
                                 : (deriv == 1 ? d_col(f, order) : d_col2(f, order));
        for (std::size_t k = 0; k < pos.size(); ++k) out[k][comp] = d[k];
    }
    return out;
}

namespace {

// Flat-chart tangents: (X_x, X_y) with zeta = x + i y.
struct Tangents {
    std::vector<Vec3> x, y;
};

Tangents flat_tangents(const Chart& c, const std::vector<Vec3>& pos, int order)
{
    auto r = position_derivative(c, pos, true, 1, order);
    auto q = position_derivative(c, pos, false, 1, order);
    if (c.is_annulus()) return {std::move(r), std::move(q)};
    return {std::move(q), std::move(r)};
}

double flat_lambda(const SurfacePatch& p, std::size_t k, int i)
{
    return p.chart.is_annulus() ? p.lambda[k] * std::exp(p.chart.row_coord(i)) : p.lambda[k];
}

}  // namespace

SurfacePatch patch_from_parametrization(const Chart& chart, const std::function<Vec3(double, double)>& X)
{
    SurfacePatch p;
    p.chart = chart;
    p.positions.resize(chart.size());
    for (int i = 0; i < chart.rows(); ++i) {
        for (int j = 0; j < chart.cols(); ++j) p.positions[chart.index(i, j)] = X(chart.row_coord(i), chart.col_coord(j));
    }
    const Tangents t = flat_tangents(chart, p.positions, 4);
    p.normals.resize(chart.size());
    p.lambda.resize(chart.size());
    for (int i = 0; i < chart.rows(); ++i) {
        const double scale = chart.is_annulus() ? std::exp(-chart.row_coord(i)) : 1.0;
        for (int j = 0; j < chart.cols(); ++j) {
            const std::size_t k = chart.index(i, j);
            p.normals[k] = t.x[k].cross(t.y[k]).normalized();
            p.lambda[k] = 0.5 * (t.x[k].norm() + t.y[k].norm()) * scale;
        }
    }
    return p;
}

PatchResiduals patch_residuals(const SurfacePatch& patch, int order)
{
    const Chart& c = patch.chart;
    const Tangents t = flat_tangents(c, patch.positions, order);
    const auto rr = position_derivative(c, patch.positions, true, 2, order);
    const auto qq = position_derivative(c, patch.positions, false, 2, order);
    PatchResiduals out;
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) {
            const std::size_t k = c.index(i, j);
            const double l2 = std::pow(flat_lambda(patch, k, i), 2);
            const double ex = t.x[k].squaredNorm();
            const double ey = t.y[k].squaredNorm();
            out.conformality = std::max(out.conformality, (std::abs(t.x[k].dot(t.y[k])) + std::abs(ex - ey)) / l2);
            out.metric = std::max(out.metric, std::max(std::abs(ex / l2 - 1.0), std::abs(ey / l2 - 1.0)));
            out.normal = std::max(out.normal, (patch.normals[k] - t.x[k].cross(t.y[k]).normalized()).norm());
            if (i > 0 && i + 1 < c.rows() && (c.col_periodic() || (j > 0 && j + 1 < c.cols()))) {
                out.harmonicity = std::max(out.harmonicity, (rr[k] + qq[k]).norm() / l2);
            }
        }
    }
    return out;
}

}  // namespace fbma
