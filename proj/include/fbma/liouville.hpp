#pragma once

#include "fbma/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbma {

// Boundary value problem on the closed annulus A(1, R), in t = log r:
//   exp(-2t) (v_tt + v_thth) + 2 C0^2 exp(v) = 0,
//   v_r = 2 exp(-v/2) - 2               on r = 1,
//   -v_r = (2/R^2) exp(-v/2) + 2/R      on r = R,
// with v_r = exp(-t) v_t. Only C0^2 enters.

struct LiouvilleProblem {
    double R = 2.0;
    double C0 = 1.0;
    int n_r = 129;
    int n_theta = 256;

    void validate() const;
    AnnulusSpec spec() const { return {R, 0.0, n_r, n_theta}; }
    Chart chart() const;
};

/// v(t) = log((alpha^2 / C0^2) sech^2(alpha (t - t0))) - 2t.
struct SymmetricSolution {
    double alpha = 1.0;
    double t0 = 0.0;
    double C0 = 1.0;
    double R = 2.0;

    double w(double t) const;
    double v(double t) const { return w(t) - 2.0 * t; }
    double v_t(double t) const;
    RealField field(const Chart& annulus) const;
};

/// Residual of both boundary equations for (alpha, t0): each reads
/// alpha^2 tanh(alpha u) - |C0| cosh(alpha u) with u = t0 and u = log R - t0.
std::pair<double, double> symmetric_boundary_equations(double alpha, double t0, double C0, double R);

struct SymmetricSeed {
    double alpha = 0.0;
    double t0 = 0.0;
};

/// Damped Newton on (alpha, t0). Without a seed the smallest positive root of
/// the t0 = (log R)/2 reduction is used. Throws DivergenceError when no
/// symmetric solution is found.
SymmetricSolution solve_symmetric(const LiouvilleProblem& problem, std::optional<SymmetricSeed> seed = {});

struct BoundaryResidual {
    std::vector<double> inner;  // per theta node
    std::vector<double> outer;
    double max_abs() const;
};

/// Boundary-condition residuals with one-sided differences of formal order `order`.
BoundaryResidual boundary_residual(const RealField& v, const LiouvilleProblem& problem, int order = 4);

/// exp(-2t)(v_tt + v_thth) + 2 C0^2 exp(v) at every node (boundary rows included).
RealField interior_residual(const RealField& v, const LiouvilleProblem& problem, int order = 4);

/// Max-norm of the interior residual over rows 1..n_r-2.
double interior_residual_max(const RealField& v, const LiouvilleProblem& problem, int order = 4);

struct NewtonStep {
    double residual = 0.0;   // max-norm of F before the step
    double step_norm = 0.0;  // max-norm of the accepted update
    double damping = 1.0;
};

enum class SolveStatus { converged, max_iterations, stalled, overflow };
std::string to_string(SolveStatus s);

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 50;
    std::string initial = "symmetric";  // "symmetric", "constant", or "field"
    double constant_value = 0.0;
    std::optional<RealField> initial_field;
    int order = 4;
    double damping_floor = 1.0 / (1 << 20);
    double v_cap = 700.0;
};

struct LiouvilleSolution {
    LiouvilleProblem problem;
    RealField v;
    double residual_interior = 0.0;
    double residual_boundary = 0.0;
    std::vector<NewtonStep> newton_trace;
    SolveStatus status = SolveStatus::max_iterations;
    int iterations = 0;
    std::string initial_used;
    /// max ||s_{k+1}|| / ||s_k||^2 over the tail where ||s_k|| < 1e-3 (0 if none).
    double quadratic_constant = 0.0;

    bool converged() const { return status == SolveStatus::converged; }
};

/// Damped Newton on the discretized problem; sparse LU for each step.
LiouvilleSolution solve_full(const LiouvilleProblem& problem, const SolveOptions& options = {});

/// vtilde(xi) = v(exp(-i xi)) + 2 Im xi on a slab with `copies` periods.
RealField lift_to_slab(const RealField& v, int copies = 1);

struct SlabResidual {
    double interior = 0.0;  // max |vt_xx + vt_yy + 2 C0^2 exp(vt)| over interior rows
    double lower = 0.0;     // max |vt_y - 2 exp(-vt/2)| at Im xi = 0
    double upper = 0.0;     // max |-vt_y - 2 exp(-vt/2)| at Im xi = log R
};
SlabResidual slab_residual(const RealField& vtilde, double C0, int order = 4);

/// Q = vt_xixi - (vt_xi)^2 / 2 on the slab.
ComplexField q_function(const RealField& vtilde, int order = 4);

/// max |dQ/d xibar| over rows [margin, rows - margin). The nested one-sided
/// closures lose accuracy within `order` rows of each edge, hence the default.
double q_holomorphy_residual(const ComplexField& Q, int margin = 4, int order = 4);

struct AreaCheck {
    double lhs = 0.0;  // 2 * area
    double rhs = 0.0;  // boundary length
    double gap = 0.0;
};

/// 2 int int exp(-2t - v) dt dth  vs  int exp(-v(0)/2) dth + (1/R) int exp(-v(L)/2) dth.
AreaCheck area_perimeter_check(const RealField& v);

}  // namespace fbma
