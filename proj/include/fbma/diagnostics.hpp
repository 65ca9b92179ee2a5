#pragma once

#include "fbma/polyline.hpp"
#include "fbma/weierstrass.hpp"

#include <span>
#include <string>
#include <vector>

namespace fbma {

// Hopf differential on the annulus chart. With zeta = log z = t + i theta the
// coefficient f = z^2 Phi is computed as f = -2 <X_zetazeta, N>, which is the
// quadratic differential Phi of the weierstrass convention written in zeta.

struct HopfData {
    ComplexField Phi;           // z-chart coefficient, f / z^2
    ComplexField f;             // z^2 Phi
    double C0_est = 0.0;        // mean of Re f
    double deviation = 0.0;     // max |f - C0_est|
    double imag_max = 0.0;      // max |Im f|
    double holomorphy = 0.0;    // max |df/dzbar| over interior rows
};

struct HopfOptions {
    double conformality_tol = 1e-3;  // patch_residuals().conformality accepted
    int order = 4;
};

/// Throws NotCertifiableError on a non-conformal patch, InputError off the annulus.
HopfData hopf_extract(const SurfacePatch& patch, const HopfOptions& options = {});

struct WindingResult {
    int n = 0;
    double raw = 0.0;     // real part of the contour integral
    double defect = 0.0;  // |raw - n| plus |imaginary part|
};

/// (1 / 2 pi i) closed integral of g' / (g - a), trapezoidal in the sample
/// parameter with fourth-order periodic differences for g'. Throws
/// IllConditionedError when a lies within `min_distance` of the curve (defaults
/// to one sample spacing) or the rounding defect reaches 0.1.
WindingResult winding_number(std::span<const Complex> curve, Complex a, double min_distance = -1.0);

struct InjectivityPoint {
    Complex a;
    int n_inner = 0;
    int n_outer = 0;
    int difference = 0;  // n_outer - n_inner
    double defect = 0.0;
};

struct InjectivityReport {
    std::vector<InjectivityPoint> points;
    int skipped = 0;  // test points too close to a boundary image
    double max_defect = 0.0;
    double min_derivative = 0.0;  // min |g_z| over the chart
    bool inner_simple = true;
    bool outer_simple = true;
    bool boundary_embedded = true;
    bool nonnegative = true;  // every difference >= 0
    int max_difference = 0;
    bool consistent = false;  // differences in {0, 1}, boundaries embedded, g' nonvanishing
    std::string verdict;      // "consistent with injectivity", "not injective", "boundary not embedded", ...
};

struct InjectivityOptions {
    int grid = 64;
    double exclusion = 2.0;        // in boundary segment lengths
    double derivative_floor = 1e-8;
};

/// Winding differences over a grid of test points covering both boundary
/// images g(|z| = 1) and g(|z| = R).
InjectivityReport injectivity_report(const WeierstrassData& data, const InjectivityOptions& options = {});

struct GaussMapKappa {
    std::vector<double> kappa_g;
    std::vector<double> bracket;      // (2 / (1 + |g|^2)) (1 / |g_th|) Im(g_thth / g_th - (2|g|^2 / (1 + |g|^2)) g_th / g)
    std::vector<double> g_theta_abs;  // |g_th|
};

/// kappa_g = bracket * |g_th|^2 / |c| per node from exact theta-derivatives.
/// For g sampled with increasing theta on a patch whose normal is the
/// stereographic lift of g, this is the geodesic curvature against the
/// conormal t x N, i.e. minus the curvelab value (which uses N x t). Only
/// valid in the theta parametrization of a circle |z| = r with f = c.
GaussMapKappa gauss_map_kappa_g(std::span<const Complex> g, std::span<const Complex> g_theta,
                                std::span<const Complex> g_thetatheta, double c);

/// Same, with theta-derivatives from fourth-order periodic differences of g
/// sampled uniformly over one period.
GaussMapKappa gauss_map_kappa_g(std::span<const Complex> g, double c);

}  // namespace fbma
