#include "fbma/liouville.hpp"

#include "fbma/error.hpp"
#include "fbma/quadrature.hpp"
#include "fbma/stencil.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>

namespace fbma {

void LiouvilleProblem::validate() const
{
    spec().validate();
    if (!std::isfinite(C0) || C0 == 0.0) throw ConfigError("liouville: C0 must be finite and nonzero");
}

Chart LiouvilleProblem::chart() const
{
    validate();
    return Chart::annulus(spec());
}

double SymmetricSolution::w(double t) const
{
    const double ch = std::cosh(alpha * (t - t0));
    return std::log(alpha * alpha / (C0 * C0 * ch * ch));
}

double SymmetricSolution::v_t(double t) const { return -2.0 * alpha * std::tanh(alpha * (t - t0)) - 2.0; }

RealField SymmetricSolution::field(const Chart& annulus) const
{
    return sample_real(annulus, [this](double t, double) { return v(t); });
}

std::pair<double, double> symmetric_boundary_equations(double alpha, double t0, double C0, double R)
{
    const double c = std::abs(C0);
    auto f = [&](double u) { return alpha * alpha * std::tanh(alpha * u) - c * std::cosh(alpha * u); };
    return {f(t0), f(std::log(R) - t0)};
}

namespace {

// Smallest positive root of alpha^2 sinh(alpha L/2) / cosh^2(alpha L/2) = |C0|.
std::optional<double> symmetric_seed(double C0, double L)
{
    const double c = std::abs(C0);
    auto psi = [&](double a) {
        const double x = 0.5 * a * L;
        return a * a * std::tanh(x) / std::cosh(x) - c;
    };
    // psi decays like alpha^2 exp(-alpha L / 2); scan until it is safely below c.
    double top = 1.0 / L;
    while (psi(top) + c > 1e-3 * c || top < 8.0 / L) top *= 2.0;
    const int steps = 20000;
    double prev_a = top / steps, prev = psi(prev_a);
    for (int k = 2; k <= steps; ++k) {
        const double a = top * k / steps;
        const double cur = psi(a);
        if ((prev < 0.0) != (cur < 0.0)) {
            boost::uintmax_t iters = 200;
            auto r = boost::math::tools::toms748_solve(psi, prev_a, a, prev, cur,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
            return 0.5 * (r.first + r.second);
        }
        prev_a = a;
        prev = cur;
    }
    return std::nullopt;
}

}  // namespace

SymmetricSolution solve_symmetric(const LiouvilleProblem& problem, std::optional<SymmetricSeed> seed)
{
    problem.validate();
    const double L = std::log(problem.R);
    const double c = std::abs(problem.C0);
    if (!seed) {
        const auto a = symmetric_seed(problem.C0, L);
        if (!a) throw DivergenceError("solve_symmetric: no symmetric solution for these (R, C0)");
        seed = SymmetricSeed{*a, 0.5 * L};
    }
    double alpha = seed->alpha, t0 = seed->t0;
    auto derivs = [&](double u, double& fa, double& fu) {
        const double x = alpha * u;
        const double sech2 = 1.0 / (std::cosh(x) * std::cosh(x));
        fa = 2.0 * alpha * std::tanh(x) + alpha * alpha * u * sech2 - c * u * std::sinh(x);
        fu = alpha * alpha * alpha * sech2 - c * alpha * std::sinh(x);
    };
    auto norm = [&](double a, double t) {
        const auto [f1, f2] = symmetric_boundary_equations(a, t, c, problem.R);
        return std::max(std::abs(f1), std::abs(f2));
    };
    const double tol = 1e-14 * std::max(1.0, c);
    for (int it = 0; it < 100; ++it) {
        const auto [f1, f2] = symmetric_boundary_equations(alpha, t0, c, problem.R);
        const double r = std::max(std::abs(f1), std::abs(f2));
        if (r < tol) return {alpha, t0, c, problem.R};
        double a1, u1, a2, u2;
        derivs(t0, a1, u1);
        derivs(L - t0, a2, u2);
        // d/dt0 of the second equation carries a minus sign (u = L - t0).
        Eigen::Matrix2d J;
        J << a1, u1, a2, -u2;
        const Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(-f1, -f2));
        if (!step.allFinite()) break;
        double lam = 1.0;
        while (lam > 1e-6) {
            const double na = alpha + lam * step[0], nt = t0 + lam * step[1];
            if (na > 0.0 && norm(na, nt) < r) {
                alpha = na;
                t0 = nt;
                break;
            }
            lam *= 0.5;
        }
        if (lam <= 1e-6) {
            // A stalled step at round-off level is convergence, not divergence.
            if (r < 1e-12 * std::max(1.0, c)) return {alpha, t0, c, problem.R};
            break;
        }
    }
    throw DivergenceError("solve_symmetric: Newton iteration on (alpha, t0) did not converge");
}

double BoundaryResidual::max_abs() const
{
    double m = 0.0;
    for (double x : inner) m = std::max(m, std::abs(x));
    for (double x : outer) m = std::max(m, std::abs(x));
    return m;
}

BoundaryResidual boundary_residual(const RealField& v, const LiouvilleProblem& problem, int order)
{
    const Chart& c = v.chart();
    if (!c.is_annulus()) throw InputError("boundary_residual: expects an annulus field");
    if (std::abs(c.R() - problem.R) > 1e-12 * problem.R) throw InputError("boundary_residual: field and problem disagree on R");
    const double R = c.R();
    Stencil1D d1(c.rows(), c.row_step(), 1, order);
    const auto stride = static_cast<std::ptrdiff_t>(c.cols());
    BoundaryResidual out;
    const int last = c.rows() - 1;
    for (int j = 0; j < c.cols(); ++j) {
        const double vt0 = d1.at(&v(0, j), stride, 0);
        const double vtL = d1.at(&v(0, j), stride, last);
        out.inner.push_back(vt0 - (2.0 * std::exp(-0.5 * v(0, j)) - 2.0));
        out.outer.push_back(-vtL / R - ((2.0 / (R * R)) * std::exp(-0.5 * v(last, j)) + 2.0 / R));
    }
    return out;
}

RealField interior_residual(const RealField& v, const LiouvilleProblem& problem, int order)
{
    const Chart& c = v.chart();
    RealField out = laplacian(v, order);
    const double c2 = 2.0 * problem.C0 * problem.C0;
    for (int i = 0; i < c.rows(); ++i) {
        const double e = std::exp(-2.0 * c.row_coord(i));
        for (int j = 0; j < c.cols(); ++j) out(i, j) = e * out(i, j) + c2 * std::exp(v(i, j));
    }
    return out;
}

double interior_residual_max(const RealField& v, const LiouvilleProblem& problem, int order)
{
    return max_abs_interior(interior_residual(v, problem, order), 1);
}

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::overflow: return "overflow";
    }
    return "unknown";
}

namespace {

class Discretization {
public:
    Discretization(const LiouvilleProblem& p, const Chart& chart, int order)
        : p_(p),
          c_(chart),
          rr_(chart.rows(), chart.row_step(), 2, order),
          cc_(chart.cols(), chart.col_step(), 2, order, chart.cols()),
          r1_(chart.rows(), chart.row_step(), 1, order)
    {
        for (int i = 0; i < chart.rows(); ++i) {
            row_taps_.push_back(i == 0 || i == chart.rows() - 1 ? r1_.taps(i) : rr_.taps(i));
        }
        for (int j = 0; j < chart.cols(); ++j) col_taps_.push_back(cc_.taps(j));
    }

    std::size_t size() const { return c_.size(); }

    Eigen::VectorXd residual(const Eigen::VectorXd& v) const
    {
        Eigen::VectorXd F(v.size());
        const int nr = c_.rows(), nt = c_.cols(), last = nr - 1;
        const double R = c_.R(), c2 = 2.0 * p_.C0 * p_.C0;
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nt; ++j) {
                const std::size_t k = c_.index(i, j);
                if (i == 0 || i == last) {
                    double vt = 0.0;
                    for (const auto& tap : row_taps_[i]) vt += tap.weight * v[c_.index(tap.index, j)];
                    F[k] = i == 0 ? vt - (2.0 * std::exp(-0.5 * v[k]) - 2.0)
                                  : -vt / R - ((2.0 / (R * R)) * std::exp(-0.5 * v[k]) + 2.0 / R);
                } else {
                    double lap = 0.0;
                    for (const auto& tap : row_taps_[i]) lap += tap.weight * v[c_.index(tap.index, j)];
                    for (const auto& tap : col_taps_[j]) lap += tap.weight * v[c_.index(i, tap.index)];
                    F[k] = std::exp(-2.0 * c_.row_coord(i)) * lap + c2 * std::exp(v[k]);
                }
            }
        }
        return F;
    }

    Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& v) const
    {
        std::vector<Eigen::Triplet<double>> trip;
        const int nr = c_.rows(), nt = c_.cols(), last = nr - 1;
        const double R = c_.R(), c2 = 2.0 * p_.C0 * p_.C0;
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nt; ++j) {
                const auto k = static_cast<int>(c_.index(i, j));
                if (i == 0 || i == last) {
                    const double s = i == 0 ? 1.0 : -1.0 / R;
                    for (const auto& tap : row_taps_[i]) trip.emplace_back(k, c_.index(tap.index, j), s * tap.weight);
                    const double e = std::exp(-0.5 * v[k]);
                    trip.emplace_back(k, k, i == 0 ? e : e / (R * R));
                } else {
                    const double e = std::exp(-2.0 * c_.row_coord(i));
                    for (const auto& tap : row_taps_[i]) trip.emplace_back(k, c_.index(tap.index, j), e * tap.weight);
                    for (const auto& tap : col_taps_[j]) trip.emplace_back(k, c_.index(i, tap.index), e * tap.weight);
                    trip.emplace_back(k, k, c2 * std::exp(v[k]));
                }
            }
        }
        Eigen::SparseMatrix<double> J(size(), size());
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    }

private:
    const LiouvilleProblem& p_;
    const Chart& c_;
    Stencil1D rr_, cc_, r1_;
    std::vector<std::vector<Stencil1D::Tap>> row_taps_, col_taps_;
};

}  // namespace

LiouvilleSolution solve_full(const LiouvilleProblem& problem, const SolveOptions& opt)
{
    const Chart chart = problem.chart();
    if (opt.tol <= 0.0) throw ConfigError("solve_full: tol must be positive");
    if (opt.max_iter < 1) throw ConfigError("solve_full: max_iter must be >= 1");

    LiouvilleSolution sol;
    sol.problem = problem;
    RealField init(chart, opt.constant_value);
    if (opt.initial == "symmetric") {
        try {
            init = solve_symmetric(problem).field(chart);
            sol.initial_used = "symmetric";
        } catch (const DivergenceError&) {
            sol.initial_used = "constant";
        }
    } else if (opt.initial == "constant") {
        sol.initial_used = "constant";
    } else if (opt.initial == "field") {
        if (!opt.initial_field || !opt.initial_field->chart().same_shape(chart)) {
            throw ConfigError("solve_full: initial field missing or on a different grid");
        }
        init = *opt.initial_field;
        sol.initial_used = "field";
    } else {
        throw ConfigError("solve_full: initial must be symmetric, constant or field");
    }
    for (double x : init.values()) {
        if (!std::isfinite(x)) throw ConfigError("solve_full: initial guess is not finite");
    }

    const Discretization disc(problem, chart, opt.order);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(init.values().data(), chart.size());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;

    Eigen::VectorXd F = disc.residual(v);
    double r = F.lpNorm<Eigen::Infinity>();
    sol.status = SolveStatus::max_iterations;
    if (v.maxCoeff() > opt.v_cap) sol.status = SolveStatus::overflow;
    for (int it = 0; it < opt.max_iter && sol.status == SolveStatus::max_iterations; ++it) {
        if (r < opt.tol) {
            sol.status = SolveStatus::converged;
            break;
        }
        const auto J = disc.jacobian(v);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw RankError("solve_full: Jacobian factorization failed");
        const Eigen::VectorXd dv = lu.solve(-F);
        double lam = 1.0;
        bool accepted = false, overflowed = false;
        while (lam >= opt.damping_floor) {
            const Eigen::VectorXd trial = v + lam * dv;
            if (trial.maxCoeff() > opt.v_cap || !trial.allFinite()) {
                overflowed = true;
                lam *= 0.5;
                continue;
            }
            const Eigen::VectorXd Ft = disc.residual(trial);
            const double rt = Ft.lpNorm<Eigen::Infinity>();
            if (rt < r) {
                sol.newton_trace.push_back({r, lam * dv.lpNorm<Eigen::Infinity>(), lam});
                v = trial;
                F = Ft;
                r = rt;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        sol.iterations = it + 1;
        if (!accepted) {
            sol.newton_trace.push_back({r, 0.0, lam});
            sol.status = overflowed ? SolveStatus::overflow : SolveStatus::stalled;
        }
    }
    if (sol.status == SolveStatus::max_iterations && r < opt.tol) sol.status = SolveStatus::converged;

    for (std::size_t k = 1; k < sol.newton_trace.size(); ++k) {
        const double s0 = sol.newton_trace[k - 1].step_norm, s1 = sol.newton_trace[k].step_norm;
        if (s0 > 0.0 && s0 < 1e-3 && s1 > 0.0) sol.quadratic_constant = std::max(sol.quadratic_constant, s1 / (s0 * s0));
    }
    sol.v = RealField(chart, std::vector<double>(v.data(), v.data() + v.size()));
    sol.residual_interior = interior_residual_max(sol.v, problem, opt.order);
    sol.residual_boundary = boundary_residual(sol.v, problem, opt.order).max_abs();
    return sol;
}

RealField lift_to_slab(const RealField& v, int copies)
{
    const Chart& a = v.chart();
    if (!a.is_annulus()) throw InputError("lift_to_slab: expects an annulus field");
    SlabSpec spec;
    spec.R = a.R();
    spec.n_im = a.rows();
    spec.n_re = a.cols() + 1;
    spec.copies = copies;
    const Chart slab = Chart::slab(spec);
    const int n = a.cols();
    return RealField::generate(slab, [&](int i, int j) {
        // z = exp(-i xi): theta = -Re xi, t = Im xi.
        return v(i, ((n - j) % n + n) % n) + 2.0 * slab.row_coord(i);
    });
}

SlabResidual slab_residual(const RealField& vt, double C0, int order)
{
    const Chart& c = vt.chart();
    SlabResidual out;
    RealField pde = laplacian(vt, order);
    for (std::size_t k = 0; k < pde.size(); ++k) pde[k] += 2.0 * C0 * C0 * std::exp(vt[k]);
    out.interior = max_abs_interior(pde, 1);
    const RealField dy = d_row(vt, order);
    const int last = c.rows() - 1;
    for (int j = 0; j < c.cols(); ++j) {
        out.lower = std::max(out.lower, std::abs(dy(0, j) - 2.0 * std::exp(-0.5 * vt(0, j))));
        out.upper = std::max(out.upper, std::abs(-dy(last, j) - 2.0 * std::exp(-0.5 * vt(last, j))));
    }
    return out;
}

ComplexField q_function(const RealField& vt, int order)
{
    const ComplexField d1 = d_dzeta(to_complex(vt), order);
    const ComplexField d2 = d_dzeta(d1, order);
    ComplexField Q(vt.chart());
    for (std::size_t k = 0; k < Q.size(); ++k) Q[k] = d2[k] - 0.5 * d1[k] * d1[k];
    return Q;
}

double q_holomorphy_residual(const ComplexField& Q, int margin, int order)
{
    return max_abs_interior(d_dzetabar(Q, order), margin);
}

AreaCheck area_perimeter_check(const RealField& v)
{
    const Chart& c = v.chart();
    if (!c.is_annulus()) throw InputError("area_perimeter_check: expects an annulus field");
    RealField dens(c);
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) dens(i, j) = 2.0 * std::exp(-2.0 * c.row_coord(i) - v(i, j));
    }
    AreaCheck out;
    out.lhs = integrate_chart(dens);
    std::vector<double> in(c.cols()), ou(c.cols());
    const int last = c.rows() - 1;
    for (int j = 0; j < c.cols(); ++j) {
        in[j] = std::exp(-0.5 * v(0, j));
        ou[j] = std::exp(-0.5 * v(last, j)) / c.R();
    }
    out.rhs = integrate_periodic(in, c.col_step()) + integrate_periodic(ou, c.col_step());
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

}  // namespace fbma
