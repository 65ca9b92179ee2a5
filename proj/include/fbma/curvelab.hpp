#pragma once

#include "fbma/weierstrass.hpp"

#include <span>
#include <string>
#include <vector>

namespace fbma {

// Frenet convention: t' = kappa n, n' = -kappa t + tau b, b' = -tau n
// (primes are arclength derivatives), b = t x n.

struct SpaceCurve {
    std::vector<Vec3> points;
    bool closed = false;
    double length = 0.0;
    std::vector<double> arclength;  // cumulative, starts at 0
    std::vector<Vec3> t, n, b;
    std::vector<double> kappa, tau, kappa_prime;
    /// Curvature vector d^2 X / ds^2 (defined also where kappa vanishes).
    std::vector<Vec3> curvature_vector;
    /// Derivative of the sample parameter's arclength, |dX/du| with u = node index.
    std::vector<double> speed;
    double kappa_floor = 0.0;
    double tau_floor = 0.0;
    /// More than half of the nodes have kappa below the floor.
    bool degenerate = false;

    std::size_t size() const { return points.size(); }
};

struct FrenetOptions {
    int order = 8;          // formal accuracy of the parameter derivatives
    bool resample = false;  // resample to uniform arclength first
};

/// Frenet data from derivatives in the sample parameter; curvature and
/// torsion use the parametrization-invariant formulas, so the sampling need
/// not be uniform in arclength as long as it is smooth.
SpaceCurve frenet_analyze(std::span<const Vec3> points, bool closed, const FrenetOptions& options = {});

/// Uniform-arclength resampling by cubic interpolation in cumulative chord
/// length. `count` = 0 keeps the node count.
std::vector<Vec3> resample_arclength(std::span<const Vec3> points, bool closed, int count = 0);

enum class CurveVerdict { spherical, planar_circle, not_spherical };
std::string to_string(CurveVerdict v);

struct CriterionResult {
    /// (1/kappa)^2 + ((1/kappa)')^2 / tau^2 per node; NaN off the generic branch.
    std::vector<double> value;
    std::vector<char> generic;  // |tau| >= tau_floor and kappa >= kappa_floor
    CurveVerdict verdict = CurveVerdict::not_spherical;
    double radius = 0.0;
    double deviation = 0.0;  // relative max deviation of the tested constant
};

CriterionResult spherical_criterion(const SpaceCurve& curve, double rel_tol = 1e-4);

struct SphereNormalResult {
    std::vector<Vec3> normal;  // unit outward sphere normal per node (NaN off branch)
    Vec3 center = Vec3::Zero();
    double center_spread = 0.0;  // max distance of per-node centers from the mean
    int sign = 1;                // center = X - sign * R * normal
};

/// Sphere normal from Frenet data on generic-branch nodes and the implied
/// center; the sign is chosen by the smaller center spread. Throws
/// InconsistencyError when both signs spread within 10% of each other, and
/// DomainError when the curve has no generic node.
SphereNormalResult sphere_normal_field(const SpaceCurve& curve, double R);

struct ChartPoint {
    double row = 0.0;  // row coordinate (t or Im xi)
    double col = 0.0;  // column coordinate (theta or Re xi)
};

struct CurveOnSurface {
    SpaceCurve curve;
    std::vector<ChartPoint> chart_trace;
    std::vector<Vec3> surface_normal;  // N
    std::vector<Vec3> conormal;        // nu = N x t, so {N, t, nu} is positive
    std::vector<double> geodesic_curvature;
    std::vector<double> normal_curvature;
    std::vector<double> curvature_line_residual;  // <dN/ds, nu>
};

/// Curve through grid nodes of the host (exact node data).
CurveOnSurface curve_on_surface(const SurfacePatch& host, std::span<const GridNode> path, bool closed,
                                const FrenetOptions& options = {});
/// Curve through arbitrary chart points (bicubic Lagrange interpolation of
/// positions and normals). Throws DomainError when a point leaves the chart.
CurveOnSurface curve_on_surface(const SurfacePatch& host, std::span<const ChartPoint> path, bool closed,
                                const FrenetOptions& options = {});

/// Row i of the host as a closed (annulus) or open (slab) curve.
CurveOnSurface row_curve(const SurfacePatch& host, int row, const FrenetOptions& options = {});

enum class SphereBranch { generic_torsion, planar, piecewise, plane };
std::string to_string(SphereBranch b);

struct SpherePiece {
    SphereBranch branch = SphereBranch::planar;
    std::size_t first = 0, last = 0;  // node range (inclusive)
    Vec3 center = Vec3::Zero();
    double spread = 0.0;
};

struct SphereCertificate {
    SphereBranch branch = SphereBranch::planar;
    double c = 0.0;  // mean geodesic curvature
    Vec3 center = Vec3::Zero();
    double radius = 0.0;  // 1 / |c|; infinite for the plane branch
    /// Plane branch: unit normal and offset <normal, x> = offset.
    Vec3 plane_normal = Vec3::Zero();
    double plane_offset = 0.0;
    double orthogonality_residual = 0.0;
    double sphericity_residual = 0.0;
    std::vector<double> contact_angle;
    std::vector<SpherePiece> pieces;
    double geodesic_deviation = 0.0;
    double curvature_line_max = 0.0;
    double flat_fraction = 0.0;
};

struct CertifyOptions {
    double constancy_tol = 1e-4;      // relative deviation of geodesic curvature; also the c = 0 cutoff
    double line_tol = 1e-4;           // |<dN/ds, nu>| relative to max curvature
    double flat_threshold = 1e-6;     // |kappa_n| relative to max curvature
    double flat_fraction = 0.05;      // allowed fraction of near-flat nodes
    double center_tol = 1e-4;         // piece centers relative to the radius
};

/// Orthogonal sphere (or plane) of a constant-geodesic-curvature line of
/// curvature. Throws NotCertifiableError when a hypothesis fails.
SphereCertificate certify_orthogonal_sphere(const CurveOnSurface& gamma, const CertifyOptions& options = {});

}  // namespace fbma
