#include "fbma/rigid_motion.hpp"

#include "fbma/error.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace fbma {

RigidMotion RigidMotion::about_axis(const Vec3& axis, double angle, const Vec3& translation)
{
    RigidMotion m;
    m.rotation = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
    m.translation = translation;
    return m;
}

std::vector<Vec3> RigidMotion::apply(std::span<const Vec3> points) const
{
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const Vec3& p : points) out.push_back((*this)(p));
    return out;
}

RigidMotion RigidMotion::operator*(const RigidMotion& other) const
{
    return {rotation * other.rotation, rotation * other.translation + translation};
}

RigidMotion RigidMotion::inverse() const
{
    const Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
}

RigidMotion RigidMotion::power(int n) const
{
    RigidMotion base = n < 0 ? inverse() : *this;
    RigidMotion out;
    for (int k = 0; k < std::abs(n); ++k) out = base * out;
    return out;
}

double RigidMotion::orthogonality_error() const
{
    return (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
}

double RigidMotion::angle() const
{
    // atan2 keeps full precision near 0 and pi, unlike acos of the trace
    const Vec3 w(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0), rotation(1, 0) - rotation(0, 1));
    return std::atan2(0.5 * w.norm(), 0.5 * (rotation.trace() - 1.0));
}

Vec3 RigidMotion::axis() const
{
    const Eigen::AngleAxisd aa(rotation);
    return aa.axis();
}

RigidFit fit_rigid_motion(std::span<const Vec3> source, std::span<const Vec3> target)
{
    if (source.size() != target.size()) throw InputError("fit_rigid_motion: point lists differ in length");
    if (source.size() < 3) throw RankError("fit_rigid_motion: need at least 3 points");

    const double n = static_cast<double>(source.size());
    Vec3 cs = Vec3::Zero();
    Vec3 ct = Vec3::Zero();
    for (std::size_t k = 0; k < source.size(); ++k) {
        cs += source[k];
        ct += target[k];
    }
    cs /= n;
    ct /= n;

    Mat3 cov = Mat3::Zero();   // sum (t - ct)(s - cs)^T
    Mat3 scat = Mat3::Zero();  // source scatter, for the rank test
    for (std::size_t k = 0; k < source.size(); ++k) {
        const Vec3 ds = source[k] - cs;
        cov += (target[k] - ct) * ds.transpose();
        scat += ds * ds.transpose();
    }

    const Eigen::JacobiSVD<Mat3> scat_svd(scat);
    const auto sv = scat_svd.singularValues();
    if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) {
        throw RankError("fit_rigid_motion: source points are collinear or coincident");
    }

    const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;

    RigidFit fit;
    fit.motion.rotation = svd.matrixU() * d * svd.matrixV().transpose();
    fit.motion.translation = ct - fit.motion.rotation * cs;

    double ss = 0.0;
    for (std::size_t k = 0; k < source.size(); ++k) ss += (fit.motion(source[k]) - target[k]).squaredNorm();
    fit.rms = std::sqrt(ss / n);
    return fit;
}

double rms_distance(std::span<const Vec3> a, std::span<const Vec3> b)
{
    if (a.size() != b.size() || a.empty()) throw InputError("rms_distance: size mismatch");
    double ss = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) ss += (a[k] - b[k]).squaredNorm();
    return std::sqrt(ss / static_cast<double>(a.size()));
}

}  // namespace fbma
