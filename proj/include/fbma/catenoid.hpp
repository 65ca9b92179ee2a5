#pragma once

#include "fbma/weierstrass.hpp"

namespace fbma {

/// Critical catenoid in the unit ball: X = a (cosh s cos th, cosh s sin th, s),
/// |s| <= s0, with s0 tanh s0 = 1 and a^2 (cosh^2 s0 + s0^2) = 1.
struct CriticalCatenoid {
    double s0 = 0.0;
    double a = 0.0;
    double R = 0.0;   // modulus of the parameter annulus, exp(2 s0)
    double C0 = 0.0;  // Hopf constant, equal to a

    /// Point with height parameter s and angle theta.
    Vec3 point(double s, double theta) const;
};

/// Newton iteration for s tanh s = 1 (converged to machine precision).
double solve_s_tanh_s();

CriticalCatenoid critical_catenoid();

/// Annulus data g = z / rho, omega = a rho / z^2 (rho = exp(s0)); the
/// immersion is the critical catenoid with the inner circle at s = -s0.
WeierstrassData catenoid_annulus_data(const Chart& annulus, const CriticalCatenoid& cat);

/// Slab data g = C0 h, omega = -1 / h_xi with h = (exp(s0) / C0) exp(i xi).
WeierstrassData catenoid_slab_data(const Chart& slab, const CriticalCatenoid& cat);

/// Analytic catenoid sampled on an annulus chart: node (t, theta) maps to
/// s = t - s0 and the angle theta.
std::vector<Vec3> catenoid_positions(const Chart& annulus, const CriticalCatenoid& cat);

}  // namespace fbma
