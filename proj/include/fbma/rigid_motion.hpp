#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

namespace fbma {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// x -> rotation * x + translation, rotation in SO(3).
struct RigidMotion {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidMotion identity() { return {}; }
    static RigidMotion about_axis(const Vec3& axis, double angle, const Vec3& translation = Vec3::Zero());

    Vec3 operator()(const Vec3& x) const { return rotation * x + translation; }
    std::vector<Vec3> apply(std::span<const Vec3> points) const;

    /// (this * other)(x) = this(other(x)).
    RigidMotion operator*(const RigidMotion& other) const;
    RigidMotion inverse() const;
    RigidMotion power(int n) const;

    /// Max-norm of R R^T - I.
    double orthogonality_error() const;
    /// Rotation angle in [0, pi].
    double angle() const;
    /// Unit rotation axis (undefined direction when angle ~ 0).
    Vec3 axis() const;
};

struct RigidFit {
    RigidMotion motion;
    double rms = 0.0;
};

/// Least-squares proper rigid motion taking `source` onto `target`
/// (orthogonal Procrustes via SVD of the cross-covariance, reflection-corrected).
/// Throws RankError for fewer than 3 points or collinear sources.
RigidFit fit_rigid_motion(std::span<const Vec3> source, std::span<const Vec3> target);

double rms_distance(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace fbma
