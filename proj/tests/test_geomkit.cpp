#include "support.hpp"

#include "fbma/error.hpp"
#include "fbma/field_io.hpp"
#include "fbma/mesh_io.hpp"
#include "fbma/quadrature.hpp"
#include "fbma/rigid_motion.hpp"
#include "fbma/stencil.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace fbma;
using fbma::testing::kPi;
using fbma::testing::observed_order;

TEST_CASE("annulus grid spans log R")
{
    const Chart c = make_annulus_grid({11.017, 0.0, 129, 256});
    CHECK(c.rows() == 129);
    CHECK(c.cols() == 256);
    CHECK(c.row_coord(0) == 0.0);
    CHECK(c.row_coord(128) == doctest::Approx(std::log(11.017)).epsilon(1e-14));
    CHECK(c.col_step() == doctest::Approx(2.0 * kPi / 256));
    CHECK(c.col_periodic());
    CHECK(std::abs(c.coordinate(128, 0) - Complex(11.017, 0.0)) < 1e-12);
}

TEST_CASE("grid legality")
{
    CHECK_NOTHROW(make_annulus_grid({2.0, 0.0, 3, 4}));
    CHECK_THROWS_AS(make_annulus_grid({1.0, 0.0, 65, 128}), ConfigError);
    CHECK_THROWS_AS(make_annulus_grid({0.5, 0.0, 65, 128}), ConfigError);
    CHECK_THROWS_AS(make_annulus_grid({2.0, 0.0, 2, 128}), ConfigError);
    CHECK_THROWS_AS(make_annulus_grid({2.0, 0.0, 65, 3}), ConfigError);
    CHECK_THROWS_AS(make_annulus_grid({std::nan(""), 0.0, 65, 128}), ConfigError);
}

TEST_CASE("slab chart has copies periods of columns")
{
    const Chart s = make_slab_grid({3.0, 0.0, 17, 33, 2, true});
    CHECK(s.cols() == 65);
    CHECK(s.cols_per_turn() == 32);
    CHECK(s.col_coord(64) == doctest::Approx(4.0 * kPi));
    CHECK(s.row_coord(16) == doctest::Approx(std::log(3.0)));
    const Chart b = s.column_block(8, 24);
    CHECK(b.cols() == 17);
    CHECK_FALSE(b.col_periodic());
    CHECK(b.col_coord(0) == doctest::Approx(s.col_coord(8)));
}

TEST_CASE("Wirtinger derivatives of z^2 and conj z")
{
    double err_prev = 0.0;
    for (int n : {33, 65}) {
        const Chart c = Chart::annulus({2.0, 0.0, n, 2 * (n - 1)});
        const ComplexField f = sample(c, [](Complex z) { return z * z; });
        const ComplexField exact = sample(c, [](Complex z) { return 2.0 * z; });
        const ComplexField dz = d_dz(f);
        double err = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) err = std::max(err, std::abs(dz[k] - exact[k]));
        CHECK(err < 0.05);
        if (err_prev > 0.0) CHECK(observed_order(err_prev, err) >= 1.9);
        err_prev = err;

        const ComplexField g = sample(c, [](Complex z) { return std::conj(z); });
        CHECK(max_abs(d_dz(g, 4).values()) < 1e-5);
        const ComplexField gb = d_dzbar(g, 4);
        for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(gb[k] - 1.0) < 1e-5);
    }
}

TEST_CASE("slab derivative of exp(i xi)")
{
    const Chart s = Chart::slab({2.0, 0.0, 33, 65, 1, true});
    const ComplexField h = sample(s, [](Complex x) { return std::exp(Complex(0, 1) * x); });
    const ComplexField d = d_dzeta(h, 4);
    double err = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) err = std::max(err, std::abs(d[k] - Complex(0, 1) * h[k]));
    CHECK(err < 1e-5);
}

TEST_CASE("random quadratic polynomials in z and conj z")
{
    std::mt19937 rng(3);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 20; ++trial) {
        Complex a[6];
        for (auto& x : a) x = Complex(N(rng), N(rng));
        auto f = [&](Complex z) {
            const Complex w = std::conj(z);
            return a[0] + a[1] * z + a[2] * w + a[3] * z * z + a[4] * z * w + a[5] * w * w;
        };
        auto fz = [&](Complex z) { return a[1] + 2.0 * a[3] * z + a[4] * std::conj(z); };
        auto fzb = [&](Complex z) { return a[2] + a[4] * z + 2.0 * a[5] * std::conj(z); };
        double e[2][2] = {};
        int level = 0;
        for (int n : {33, 65}) {
            const Chart c = Chart::annulus({2.0, 0.0, n, 2 * (n - 1)});
            const ComplexField F = sample(c, f);
            const ComplexField dz = d_dz(F), dzb = d_dzbar(F);
            for (int i = 0; i < c.rows(); ++i) {
                for (int j = 0; j < c.cols(); ++j) {
                    const Complex z = c.coordinate(i, j);
                    e[level][0] = std::max(e[level][0], std::abs(dz(i, j) - fz(z)));
                    e[level][1] = std::max(e[level][1], std::abs(dzb(i, j) - fzb(z)));
                }
            }
            ++level;
        }
        CHECK(observed_order(e[0][0], e[1][0]) >= 1.9);
        CHECK(observed_order(e[0][1], e[1][1]) >= 1.9);
    }
}

TEST_CASE("plane Laplacian of harmonic and quadratic fields")
{
    const std::vector<std::function<double(Complex)>> harmonic = {
        [](Complex z) { return std::log(std::abs(z)); },  [](Complex z) { return z.real(); },
        [](Complex z) { return (z * z).real(); },          [](Complex z) { return (z * z * z).imag(); },
        [](Complex z) { return (z * z).imag(); },
    };
    for (const auto& h : harmonic) {
        double prev = 0.0;
        for (int n : {33, 65, 129}) {
            const Chart c = Chart::annulus({2.0, 0.0, n, 2 * (n - 1)});
            const RealField v = sample_real(c, [&](double t, double q) { return h(std::exp(Complex(t, q))); });
            const double err = max_abs_interior(plane_laplacian(v), 1);
            if (prev > 1e-11) CHECK(observed_order(prev, err) >= 1.9);
            prev = err;
        }
    }
    const Chart c = Chart::annulus({2.0, 0.0, 65, 128});
    const RealField r2 = sample_real(c, [](double t, double) { return std::exp(2.0 * t); });
    const RealField L = plane_laplacian(r2, 4);
    for (int i = 1; i + 1 < c.rows(); ++i) CHECK(L(i, 5) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("Fornberg weights reproduce the centered second difference")
{
    const std::vector<double> nodes = {-1.0, 0.0, 1.0};
    const auto w = fornberg_weights(0.0, nodes, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    CHECK(w[2] == doctest::Approx(1.0));
    const Stencil1D d(11, 0.1, 1, 4);
    std::vector<double> x(11);
    for (int k = 0; k < 11; ++k) x[k] = std::pow(0.1 * k, 4);
    const auto dx = d.apply<double>(x);
    for (int k = 0; k < 11; ++k) CHECK(dx[k] == doctest::Approx(4.0 * std::pow(0.1 * k, 3)).epsilon(1e-10));
}

TEST_CASE("quadrature")
{
    double prev = 0.0;
    for (int n : {40, 80}) {
        std::vector<double> f(n + 1);
        for (int k = 0; k <= n; ++k) f[k] = std::exp(2.0 * k / n);
        const double err = std::abs(integrate_line(f, 2.0 / n) - (std::exp(2.0) - 1.0));
        CHECK(err < 2e-6);
        if (prev > 0.0) CHECK(observed_order(prev, err) >= 3.8);
        prev = err;
    }
    std::vector<double> p(64);
    for (int k = 0; k < 64; ++k) p[k] = std::exp(std::cos(2.0 * kPi * k / 64));
    CHECK(integrate_periodic(p, 2.0 * kPi / 64) == doctest::Approx(2.0 * kPi * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
    const Chart c = Chart::annulus({2.0, 0.0, 33, 64});
    const RealField one = sample_real(c, [](double, double) { return 1.0; });
    CHECK(integrate_chart(one) == doctest::Approx(2.0 * kPi * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("rigid motion registration")
{
    std::mt19937 rng(5);
    std::normal_distribution<double> N;
    std::vector<Vec3> cloud(50);
    for (auto& p : cloud) p = Vec3(N(rng), N(rng), N(rng));
    const RigidFit self = fit_rigid_motion(cloud, cloud);
    CHECK(self.rms < 1e-12);
    CHECK(self.motion.angle() < 1e-12);

    const RigidMotion T = RigidMotion::about_axis(Vec3::UnitZ(), kPi / 2, Vec3(1, 2, 3));
    const RigidFit fit = fit_rigid_motion(cloud, T.apply(cloud));
    CHECK((fit.motion.rotation - T.rotation).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((fit.motion.translation - T.translation).norm() < 1e-10);
    CHECK(fit.motion.rotation.determinant() == doctest::Approx(1.0));

    std::vector<Vec3> line = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    CHECK_THROWS_AS(fit_rigid_motion(line, line), RankError);
    CHECK((T.power(4).rotation - Mat3::Identity()).norm() < 1e-12);
    CHECK(((T * T.inverse()).translation).norm() < 1e-12);
}

TEST_CASE("CSV round trip preserves values and chart")
{
    const Chart c = Chart::annulus({3.0, 0.0, 9, 16});
    const RealField f = sample_real(c, [](double t, double q) { return std::sin(q) * t + 1.0 / 3.0; });
    std::stringstream ss;
    write_csv(ss, f);
    const RealField g = read_real_csv(ss);
    CHECK(g.chart().same_shape(c));
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(g[k] == f[k]);

    const ComplexField z = sample(c, [](Complex w) { return w * w; });
    std::stringstream zs;
    write_csv(zs, z);
    const ComplexField z2 = read_complex_csv(zs);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(z2[k] == z[k]);

    std::stringstream bad("t,theta,value\n0,0,1\n0,oops,2\n");
    CHECK_THROWS_AS(read_real_csv(bad), InputError);
}

TEST_CASE("OBJ export has one quad per cell and wraps in theta")
{
    const CriticalCatenoid cat = critical_catenoid();
    const Chart c = Chart::annulus({cat.R, 0.0, 9, 16});
    const SurfacePatch p = integrate_immersion(catenoid_annulus_data(c, cat));
    std::stringstream ss;
    write_obj(ss, p);
    const ObjMesh m = read_obj(ss);
    CHECK(m.vertices.size() == c.size());
    CHECK(m.normals.size() == c.size());
    CHECK(m.faces.size() == static_cast<std::size_t>((c.rows() - 1) * c.cols()));
    for (std::size_t k = 0; k < c.size(); ++k) CHECK((m.vertices[k] - p.positions[k]).norm() == 0.0);
    // face winding agrees with the stored normals
    const auto& f = m.faces[0];
    const Vec3 fn = (m.vertices[f[1]] - m.vertices[f[0]]).cross(m.vertices[f[2]] - m.vertices[f[0]]);
    CHECK(fn.dot(m.normals[f[0]]) > 0.0);
}
