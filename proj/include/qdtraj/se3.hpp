#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace qdtraj {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform: rotation (unit quaternion) followed by translation.
/// The constructor renormalizes the quaternion; every operation below keeps it unit.
struct Pose {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();

    Pose() = default;
    Pose(const Vec3& p, const Quat& q);

    static Pose identity() { return {}; }
    static Pose translation(const Vec3& t) { return {t, Quat::Identity()}; }
    static Pose rotation(const Vec3& axis, double angle);
    /// URDF convention: fixed-axis roll about x, then pitch about y, then yaw about z.
    static Pose from_xyz_rpy(const Vec3& xyz, const Vec3& rpy);

    Eigen::Matrix3d rotation_matrix() const { return orientation.toRotationMatrix(); }
};

/// Exact equality; q and -q are the same orientation.
bool operator==(const Pose& a, const Pose& b);

/// a then b in a's frame chain: maps b-frame coordinates into a's parent frame.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);
Vec3 transform_point(const Pose& p, const Vec3& x);
Vec3 rotate_vector(const Pose& p, const Vec3& v);

/// Pre-multiplies q by the rotation of `angle` radians about the unit `axis`.
/// Throws ErrorCode::invalid_argument when |axis| deviates from 1 by more than 1e-9.
Quat axis_angle_rotate(const Quat& q, const Vec3& axis, double angle);

/// Angle of the relative rotation between two orientations, accounting for q ~ -q.
double rotation_angle_between(const Quat& a, const Quat& b);

/// Distance between quaternions as 4-vectors, minimised over the sign of b.
double quaternion_distance(const Quat& a, const Quat& b);

/// Sign-canonical copy: w >= 0, and for w == 0 the first non-zero of (x, y, z) positive.
Quat canonical(const Quat& q);

/// (w, x, y, z) storage order used in every serialized form.
std::array<double, 4> to_wxyz(const Quat& q);
Quat from_wxyz(const std::array<double, 4>& wxyz);

struct CellKey {
    std::int64_t i = 0;
    std::int64_t j = 0;
    std::int64_t k = 0;

    auto operator<=>(const CellKey&) const = default;
};

/// Closed-open cubic cells: key = floor(coordinate / cell_size) on each axis.
CellKey bin_descriptor(const Vec3& position, double cell_size);

/// Chebyshev distance between two cells, in cells.
std::int64_t chebyshev_distance(const CellKey& a, const CellKey& b);

struct CellKeyHash {
    std::size_t operator()(const CellKey& key) const noexcept;
};

} // namespace qdtraj
