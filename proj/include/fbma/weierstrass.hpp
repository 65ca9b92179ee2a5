#pragma once

#include "fbma/field.hpp"
#include "fbma/rigid_motion.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fbma {

// Orientation convention used throughout the library: the unit normal is the
// stereographic lift of g with g = 0 at the south pole,
//     N = (2 Re g, 2 Im g, |g|^2 - 1) / (1 + |g|^2),
// and a quadratic differential Phi dzeta^2 encodes the second fundamental form
// as  II = Re{Phi dzeta^2} = -<d^2 X, N>.  With this pairing Phi = g_zeta * omega.

inline constexpr double kPoleThreshold = 1e8;
inline constexpr double kZeroThreshold = 1e-8;

/// Weierstrass data on a chart: g and the coefficient omega of the one-form
/// omega(zeta) d zeta in the chart's native coordinate (z or xi).
struct WeierstrassData {
    ComplexField g;
    ComplexField omega;
    /// Optional exact derivative dg/dzeta; finite differences are used otherwise.
    std::optional<ComplexField> dg;

    const Chart& chart() const { return g.chart(); }

    /// Shape match, finiteness, and pole/zero compatibility at sampled poles.
    void validate() const;

    /// Samples g, omega (and optionally g') as functions of the native coordinate.
    static WeierstrassData from_functions(const Chart& chart, const std::function<Complex(Complex)>& g,
                                          const std::function<Complex(Complex)>& omega,
                                          const std::function<Complex(Complex)>& dg = {});

    /// Data g = C0 h, omega = -d xi / h_xi built from a locally univalent h on a slab.
    static WeierstrassData from_developing_map(const Chart& slab, double C0,
                                               const std::function<Complex(Complex)>& h,
                                               const std::function<Complex(Complex)>& h_xi);
};

struct SurfacePatch {
    Chart chart;
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<double> lambda;  // ds^2 = lambda^2 |d(native coordinate)|^2
    std::vector<Complex> II;     // Phi per node, see the convention above
    /// Per-row closure defect of the angular integration (annulus charts only).
    std::vector<Vec3> row_closure_defects;

    const Vec3& position(int i, int j) const { return positions[chart.index(i, j)]; }
    const Vec3& normal(int i, int j) const { return normals[chart.index(i, j)]; }
};

struct GridNode {
    int row = 0;
    int col = 0;
};

/// Integrates Re of (1/2 (1 - g^2), i/2 (1 + g^2), g) omega along a spanning
/// tree of grid edges, starting from `base`. The tree is the base column
/// followed by every row, with fourth-order edge quadrature (cubic through
/// four nodes); on the annulus the angular walk stops one edge short of
/// closing and the closing edge is reported as the row's closure defect.
/// Pole nodes (|g| > 1e8) are routed around by a breadth-first tree with
/// trapezoidal edges; data that cannot be routed raises SingularDataError.
SurfacePatch integrate_immersion(const WeierstrassData& data, GridNode base = {}, const Vec3& base_position = Vec3::Zero());

/// Stereographic unit normal of g (poles map to the north pole).
Vec3 stereographic(const Complex& g);
std::vector<Vec3> gauss_sphere_map(const WeierstrassData& data);

/// Re of the loop integral of the three component one-forms along a closed
/// sequence of grid-adjacent nodes (trapezoidal rule in the chart parameter).
Vec3 period_integral(const WeierstrassData& data, std::span<const GridNode> loop);

/// Closed loop along row i (the circle |z| = const on the annulus).
std::vector<GridNode> circle_loop(const Chart& chart, int row);
/// Closed rectangle through rows [i0, i1] and columns [j0, j1], counterclockwise.
std::vector<GridNode> rectangle_loop(int i0, int i1, int j0, int j1);

/// Builds a patch from an explicit parametrization of the chart (used for
/// reference surfaces that are not minimal, e.g. round spheres). Tangents
/// come from fourth-order differences; lambda is the mean tangent length and
/// II is left empty.
SurfacePatch patch_from_parametrization(const Chart& chart, const std::function<Vec3(double row, double col)>& X);

/// Chart used to differentiate positions: slab positions are generally not
/// periodic in Re xi (only the metric is), so slab charts lose their wrap.
Chart position_chart(const Chart& chart);

/// Derivative of a position field along the chart rows or columns.
std::vector<Vec3> position_derivative(const Chart& chart, const std::vector<Vec3>& positions, bool along_rows, int deriv,
                                      int order = 4);

/// Residual diagnostics of an integrated patch.
struct PatchResiduals {
    double conformality = 0.0;    // max |<X_a, X_b>| and ||X_a|^2 - |X_b|^2| over lambda^2
    double metric = 0.0;          // max | |X_a|^2 / lambda^2 - 1 |
    double normal = 0.0;          // max |N - cross-product normal|
    double harmonicity = 0.0;     // max |X_aa + X_bb| / lambda^2 (interior nodes)
};
PatchResiduals patch_residuals(const SurfacePatch& patch, int order = 2);

}  // namespace fbma
