#pragma once

#include "fbma/curvelab.hpp"
#include "fbma/liouville.hpp"
#include "fbma/rigid_motion.hpp"
#include "fbma/weierstrass.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbma {

// Surface from a slab Liouville field: first fundamental form Lambda^2 |dxi|^2
// with Lambda^2 = exp(-vt), second fundamental form the constant quadratic
// differential of C0. Frame rows are (e1, e2, N) with X_x = Lambda e1,
// X_y = Lambda e2 (xi = x + i y) and N = e1 x e2.

struct FrameSeed {
    Vec3 position = Vec3::Zero();
    Vec3 e1 = Vec3::UnitX();
    Vec3 N = Vec3::UnitZ();
};

struct FrameOptions {
    double compatibility_tol = 1e-6;  // max |lap vt + 2 C0^2 exp(vt)| accepted
    double lambda_floor = 1e-12;
    int order = 4;                    // finite-difference order for log Lambda
};

struct FrameField {
    Chart chart;  // slab
    double C0 = 0.0;
    std::vector<Vec3> positions, e1, e2, N;
    std::vector<double> Lambda;
    double compatibility_residual = 0.0;
    double max_drift = 0.0;         // largest pre-correction |F F^T - I| of one RK4 step
    double total_correction = 0.0;  // summed Gram-Schmidt correction magnitude

    /// Patch view: normals N, lambda Lambda, II the constant Hopf coefficient.
    SurfacePatch patch() const;
};

/// Integrates the Gauss-Weingarten system with classical RK4: the Re xi = 0
/// column first (along Im xi), then every row along Re xi.
FrameField frame_integrate(const RealField& vtilde, double C0, const FrameSeed& seed = {}, const FrameOptions& options = {});

/// max | vt + 2 log Lambda_emp | with Lambda_emp measured from the tangents of
/// the integrated positions (scaled by `lambda_scale`), where vt is the slab
/// lift of the annulus field v.
double verify_metric_condition(const RealField& v, const FrameField& frame, double lambda_scale = 1.0);

/// Level curve Im xi = const (slab) or t = const (annulus) at `row` as a surface
/// curve: one closed period when the row closes to 1e-11 relative, the whole row otherwise
/// (a seam defect well below the 1e-8 level still shows up as spurious torsion).
CurveOnSurface level_curve(const SurfacePatch& patch, int row);

struct SphereFinding {
    SphereCertificate inner, outer;  // level curves Im xi = 0 and Im xi = log R
    Vec3 O1 = Vec3::Zero(), O2 = Vec3::Zero();
    double distance = 0.0;
    bool concentric = false;
};

struct SphereOptions {
    double unit_tol = 1e-4;         // | |c| - 1 | accepted on both boundaries
    double concentric_tol = 1e-4;
    CertifyOptions certify;
};

/// Certifies the two boundary level curves; throws InconsistencyError when
/// their geodesic curvature is not of unit modulus.
SphereFinding find_spheres(const SurfacePatch& slab_patch, const SphereOptions& options = {});

enum class PieceClass { identity, rotation, non_closing };
std::string to_string(PieceClass c);

struct FundamentalDecomposition {
    RigidMotion T;
    PieceClass classification = PieceClass::non_closing;
    int N = 0;  // piece count (1 for identity)
    int k = 0;
    Vec3 axis = Vec3::Zero();
    double angle = 0.0;
    double fit_rms = 0.0;                 // RMS of T X(H0) vs X(H0 + 2 pi)
    std::vector<double> power_residuals;  // RMS of T^n X(H0) vs X(H0 + 2 pi n)
    double closure_error = 0.0;           // |T^N - id| (rotation and translation)
    SurfacePatch piece;                   // X(H0)
    std::string note;
};

struct DecomposeOptions {
    int n_max = 64;
    double angle_tol = 1e-6;        // |N angle - 2 pi k|
    double identity_tol = 1e-6;     // rotation angle and translation size for T = id
    std::optional<Vec3> fixed_center;  // when set, T must fix it (concentric spheres)
    double center_tol = 1e-4;
};

/// T from the first two periods; classification by continued fractions of
/// angle / 2 pi with denominators up to n_max.
FundamentalDecomposition decompose(const SurfacePatch& slab_patch, const DecomposeOptions& options = {});

struct BoundarySegment {
    std::string label;
    bool spherical = true;  // false for cut seams
    std::vector<GridNode> nodes;
    bool closed = false;
    int out_row = 0;  // chart direction pointing out of the piece
    int out_col = 0;
};

struct SegmentIntegrals {
    std::string label;
    bool spherical = true;
    double length = 0.0;
    Vec3 flux = Vec3::Zero();    // int nu ds
    Vec3 torque = Vec3::Zero();  // int Y x nu ds
    double support = 0.0;        // int <Y, nu> ds
};

struct FluxReport {
    double area = 0.0;
    std::vector<SegmentIntegrals> segments;
    double divergence_lhs = 0.0;  // 2 |piece|
    double divergence_rhs = 0.0;  // sum of int <Y, nu> ds
    double divergence_gap = 0.0;
    double seam_support = 0.0;    // sum over seams of int <Y, nu> ds
    double max_spherical_flux = 0.0;
    bool flux_checked = false;   // set for non-concentric spheres
    bool flux_vanishes = false;  // every spherical segment has |int nu ds| < flux_tol
};

/// Area, conormal flux, torque, and the divergence identity of a piece, with
/// Y = X - origin and outward unit conormals nu. With non-concentric spheres
/// the vanishing of each spherical flux is also tested.
FluxReport flux_and_torque(const SurfacePatch& piece, const std::vector<BoundarySegment>& boundaries, const Vec3& origin,
                           bool spheres_concentric = true, double flux_tol = 1e-6);

/// Segments of a full annular piece: the two boundary rows, closed, no seams.
std::vector<BoundarySegment> annulus_boundaries(const Chart& chart);

/// Columns [j0, j1] of a slab patch as a piece of its own.
SurfacePatch column_piece(const SurfacePatch& slab_patch, int j0, int j1);

/// Segments of a column piece: open boundary arcs gamma_1, gamma_2 and the
/// seams C_1 (first column), C_2 (last column).
std::vector<BoundarySegment> piece_boundaries(const Chart& piece_chart);

}  // namespace fbma
