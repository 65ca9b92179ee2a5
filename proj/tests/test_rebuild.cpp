#include "support.hpp"

#include "fbma/error.hpp"

#include <doctest.h>

using namespace fbma;
using fbma::testing::catenoid_solution;
using fbma::testing::kPi;
using fbma::testing::observed_order;

namespace {

struct Built {
    LiouvilleSolution solution;
    FrameField frame;
    SurfacePatch patch;
};

const Built& catenoid65()
{
    static const Built b = [] {
        const CriticalCatenoid cat = critical_catenoid();
        LiouvilleSolution s = catenoid_solution(65);
        FrameField f = frame_integrate(lift_to_slab(s.v, 2), cat.C0);
        SurfacePatch p = f.patch();
        return Built{std::move(s), std::move(f), std::move(p)};
    }();
    return b;
}

// Slab patch whose consecutive periods differ by a rotation of `angle` about x3.
SurfacePatch screw_patch(double angle, int copies = 2)
{
    const Chart s = Chart::slab({2.0, 0.0, 9, 33, copies, true});
    return patch_from_parametrization(s, [=](double y, double x) {
        const double a = angle * x / (2.0 * kPi);
        const Vec3 p(1.0 + 0.2 * y + 0.1 * std::cos(x), 0.1 * std::sin(x), y + 0.2 * std::sin(x));
        return Vec3(std::cos(a) * p.x() - std::sin(a) * p.y(), std::sin(a) * p.x() + std::cos(a) * p.y(), p.z());
    });
}

}  // namespace

TEST_CASE("frame integration reproduces the Weierstrass catenoid")
{
    const CriticalCatenoid cat = critical_catenoid();
    const Built& b = catenoid65();
    const Chart& c = b.frame.chart;
    CHECK(b.frame.compatibility_residual < 1e-6);
    CHECK(b.frame.max_drift < 1e-8);

    const SurfacePatch w = integrate_immersion(catenoid_slab_data(c, cat));
    CHECK(fit_rigid_motion(b.patch.positions, w.positions).rms < 1e-4);

    std::vector<Vec3> exact(c.size());
    for (int i = 0; i < c.rows(); ++i) {
        for (int j = 0; j < c.cols(); ++j) exact[c.index(i, j)] = cat.point(c.row_coord(i) - cat.s0, -c.col_coord(j));
    }
    CHECK(fit_rigid_motion(b.patch.positions, exact).rms < 1e-4);

    // frame stays orthonormal and right-handed
    for (std::size_t k = 0; k < c.size(); k += 97) {
        CHECK(std::abs(b.frame.e1[k].dot(b.frame.e2[k])) < 1e-12);
        CHECK((b.frame.e1[k].cross(b.frame.e2[k]) - b.frame.N[k]).norm() < 1e-12);
    }
}

TEST_CASE("metric of the integrated surface matches exp(v)")
{
    const Built& b = catenoid65();
    CHECK(verify_metric_condition(b.solution.v, b.frame) < 1e-5);
    CHECK(verify_metric_condition(b.solution.v, b.frame, 1.01) == doctest::Approx(2.0 * std::log(1.01)).epsilon(1e-3));
}

TEST_CASE("frame integration refuses incompatible data")
{
    const Chart s = Chart::slab({2.0, 0.0, 17, 33, 1, true});
    const RealField sphere_like(s, 0.0);  // lap + 2 exp = 2, not a Liouville solution
    CHECK_THROWS_AS(frame_integrate(sphere_like, 1.0), InconsistencyError);
    FrameSeed bad;
    bad.N = Vec3::UnitX();
    CHECK_THROWS_AS(frame_integrate(lift_to_slab(catenoid65().solution.v, 1), critical_catenoid().C0, bad), ConfigError);
}

TEST_CASE("boundary spheres of the reconstructed catenoid")
{
    const Built& b = catenoid65();
    const SphereFinding sp = find_spheres(b.patch);
    CHECK(std::abs(std::abs(sp.inner.c) - 1.0) < 1e-4);
    CHECK(std::abs(std::abs(sp.outer.c) - 1.0) < 1e-4);
    CHECK(sp.inner.radius == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sp.concentric);
    CHECK(sp.distance < 1e-4);
    CHECK(sp.inner.orthogonality_residual < 1e-4);
    CHECK(sp.outer.orthogonality_residual < 1e-4);
}

TEST_CASE("level curves close up on the catenoid")
{
    const Built& b = catenoid65();
    const CurveOnSurface g = level_curve(b.patch, 0);
    CHECK(g.curve.closed == (g.curve.size() == static_cast<std::size_t>(b.patch.chart.cols_per_turn())));
    CHECK(g.curve.length == doctest::Approx((g.curve.closed ? 1 : 2) * 2 * kPi * critical_catenoid().a *
                                            std::cosh(critical_catenoid().s0))
                                .epsilon(1e-5));
}

TEST_CASE("fundamental piece decomposition")
{
    SUBCASE("catenoid closes after one period")
    {
        const Built& b = catenoid65();
        const FundamentalDecomposition d = decompose(b.patch);
        CHECK(d.classification == PieceClass::identity);
        CHECK(d.N == 1);
        CHECK(d.fit_rms < 1e-6);
    }
    SUBCASE("three-piece rotational data")
    {
        const FundamentalDecomposition d = decompose(screw_patch(2 * kPi / 3));
        CHECK(d.classification == PieceClass::rotation);
        CHECK(d.N == 3);
        CHECK(d.k == 1);
        CHECK(std::abs(std::abs(d.axis.z()) - 1.0) < 1e-9);
        CHECK(d.fit_rms < 1e-12);
    }
    SUBCASE("one radian per period never closes")
    {
        const FundamentalDecomposition d = decompose(screw_patch(1.0));
        CHECK(d.classification == PieceClass::non_closing);
        CHECK_FALSE(d.note.empty());
    }
    SUBCASE("a single period cannot be decomposed")
    {
        CHECK_THROWS(decompose(screw_patch(1.0, 1)));
    }
}

TEST_CASE("flux identities on the catenoid")
{
    const CriticalCatenoid cat = critical_catenoid();
    const Built& b = catenoid65();
    const SphereFinding sp = find_spheres(b.patch);
    const FundamentalDecomposition d = decompose(b.patch);
    const FluxReport r = flux_and_torque(d.piece, annulus_boundaries(d.piece.chart), sp.O1);
    CHECK(r.divergence_gap < 1e-5);
    CHECK(r.area == doctest::Approx(kPi * cat.a * cat.a * (2 * cat.s0 + std::sinh(2 * cat.s0))).epsilon(1e-5));
    const double vertical = 2 * kPi * cat.a * cat.a * cat.s0 * std::cosh(cat.s0);
    REQUIRE(r.segments.size() == 2);
    // the two boundary fluxes are equal and opposite along the axis
    for (const auto& s : r.segments) {
        CHECK(s.flux.norm() == doctest::Approx(vertical).epsilon(1e-4));
        CHECK(s.torque.norm() < 1e-5);
        CHECK(s.length == doctest::Approx(2 * kPi * cat.a * std::cosh(cat.s0)).epsilon(1e-5));
    }
    CHECK((r.segments[0].flux + r.segments[1].flux).norm() < 1e-5);
    CHECK(r.seam_support == 0.0);
}

TEST_CASE("seam contributions cancel between adjacent pieces")
{
    const Built& b = catenoid65();
    // off-center origin, so that <Y, nu> does not vanish on the meridian seams
    const Vec3 origin = find_spheres(b.patch).O1 + Vec3(0.3, -0.1, 0.2);
    const int P = b.patch.chart.cols_per_turn();
    double seam = 0.0;
    for (auto [j0, j1] : {std::pair{0, P / 2}, std::pair{P / 2, P}}) {
        const SurfacePatch piece = column_piece(b.patch, j0, j1);
        const FluxReport r = flux_and_torque(piece, piece_boundaries(piece.chart), origin);
        CHECK(r.divergence_gap < 1e-5);
        CHECK(std::abs(r.seam_support) > 1e-2);
        seam += r.seam_support;
    }
    CHECK(std::abs(seam) < 1e-6);
}

TEST_CASE("flat annulus satisfies the divergence identity")
{
    const double r1 = 0.5, r2 = 1.5;
    const Chart c = Chart::annulus({r2 / r1, 0.0, 65, 512});
    const SurfacePatch p = patch_from_parametrization(c, [=](double t, double q) {
        return Vec3(r1 * std::exp(t) * std::cos(q), r1 * std::exp(t) * std::sin(q), 0.0);
    });
    const FluxReport r = flux_and_torque(p, annulus_boundaries(c), Vec3::Zero());
    CHECK(r.divergence_lhs == doctest::Approx(2 * kPi * (r2 * r2 - r1 * r1)).epsilon(1e-7));
    CHECK(r.divergence_gap < 1e-6);
}
