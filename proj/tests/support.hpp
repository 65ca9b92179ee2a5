#pragma once

#include "fbma/catenoid.hpp"
#include "fbma/liouville.hpp"
#include "fbma/rebuild.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fbma::testing {

inline constexpr double kPi = std::numbers::pi;

inline double observed_order(double coarse, double fine, double ratio = 2.0)
{
    return std::log(coarse / fine) / std::log(ratio);
}

/// Catenoid Liouville solution on an n x 2(n - 1) grid.
inline LiouvilleSolution catenoid_solution(int n)
{
    const CriticalCatenoid cat = critical_catenoid();
    return solve_full(LiouvilleProblem{cat.R, cat.C0, n, 2 * (n - 1)});
}

/// Closed curve on the sphere of radius r about `center`, generic torsion.
inline std::vector<Vec3> spherical_lissajous(int n, double r = 1.0, const Vec3& center = Vec3::Zero())
{
    std::vector<Vec3> pts(n);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * kPi * k / n;
        const Vec3 u(std::cos(s), std::sin(2.0 * s) * 0.7 + 0.2, 0.5 * std::sin(3.0 * s) + 0.3);
        pts[k] = center + r * u.normalized();
    }
    return pts;
}

}  // namespace fbma::testing
