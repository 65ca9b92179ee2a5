#include "fbma/catenoid.hpp"

#include "fbma/error.hpp"

#include <cmath>

namespace fbma {

Vec3 CriticalCatenoid::point(double s, double theta) const
{
    return a * Vec3(std::cosh(s) * std::cos(theta), std::cosh(s) * std::sin(theta), s);
}

double solve_s_tanh_s()
{
    double s = 1.2;
    for (int it = 0; it < 50; ++it) {
        const double f = s * std::tanh(s) - 1.0;
        const double c = std::cosh(s);
        const double step = f / (std::tanh(s) + s / (c * c));
        s -= step;
        if (std::abs(step) < 1e-16 * s) break;
    }
    return s;
}

CriticalCatenoid critical_catenoid()
{
    CriticalCatenoid c;
    c.s0 = solve_s_tanh_s();
    const double ch = std::cosh(c.s0);
    c.a = std::sinh(c.s0) / (ch * ch);
    c.R = std::exp(2.0 * c.s0);
    c.C0 = c.a;
    return c;
}

WeierstrassData catenoid_annulus_data(const Chart& annulus, const CriticalCatenoid& cat)
{
    if (!annulus.is_annulus()) throw InputError("catenoid_annulus_data: expects an annulus chart");
    const double rho = std::exp(cat.s0);
    return WeierstrassData::from_functions(
        annulus, [rho](Complex z) { return z / rho; }, [&](Complex z) { return cat.a * rho / (z * z); },
        [rho](Complex) { return Complex(1.0 / rho, 0.0); });
}

WeierstrassData catenoid_slab_data(const Chart& slab, const CriticalCatenoid& cat)
{
    const double k = std::exp(cat.s0) / cat.C0;
    const Complex I(0.0, 1.0);
    return WeierstrassData::from_developing_map(
        slab, cat.C0, [k, I](Complex xi) { return k * std::exp(I * xi); },
        [k, I](Complex xi) { return I * k * std::exp(I * xi); });
}

std::vector<Vec3> catenoid_positions(const Chart& annulus, const CriticalCatenoid& cat)
{
    std::vector<Vec3> out(annulus.size());
    for (int i = 0; i < annulus.rows(); ++i) {
        for (int j = 0; j < annulus.cols(); ++j) {
            out[annulus.index(i, j)] = cat.point(annulus.row_coord(i) - cat.s0, annulus.col_coord(j));
        }
    }
    return out;
}

}  // namespace fbma
