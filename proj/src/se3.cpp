#include "qdtraj/se3.hpp"

#include "qdtraj/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace qdtraj {

namespace {

// Leaves already-unit quaternions bit-for-bit untouched so that serialization round-trips exactly.
Quat unit(const Quat& q)
{
    if (std::abs(q.squaredNorm() - 1.0) <= 1e-15)
        return q;
    return q.normalized();
}

} // namespace

Pose::Pose(const Vec3& p, const Quat& q) : position(p), orientation(unit(q)) {}

bool operator==(const Pose& a, const Pose& b)
{
    if (a.position != b.position)
        return false;
    return a.orientation.coeffs() == b.orientation.coeffs() || a.orientation.coeffs() == -b.orientation.coeffs();
}

Pose Pose::rotation(const Vec3& axis, double angle)
{
    return {Vec3::Zero(), axis_angle_rotate(Quat::Identity(), axis, angle)};
}

Pose Pose::from_xyz_rpy(const Vec3& xyz, const Vec3& rpy)
{
    const Quat q = Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ())
        * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY())
        * Eigen::AngleAxisd(rpy.x(), Vec3::UnitX());
    return {xyz, q};
}

Pose compose(const Pose& a, const Pose& b)
{
    return {a.position + a.orientation * b.position, a.orientation * b.orientation};
}

Pose invert(const Pose& p)
{
    const Quat inv = p.orientation.conjugate();
    return {-(inv * p.position), inv};
}

Vec3 transform_point(const Pose& p, const Vec3& x) { return p.orientation * x + p.position; }

Vec3 rotate_vector(const Pose& p, const Vec3& v) { return p.orientation * v; }

Quat axis_angle_rotate(const Quat& q, const Vec3& axis, double angle)
{
    if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9)
        throw Error(ErrorCode::invalid_argument, "rotation axis must be a unit vector");
    if (!std::isfinite(angle))
        throw Error(ErrorCode::non_finite, "rotation angle is not finite");
    if (angle == 0.0)
        return unit(q);
    return unit(Quat(Eigen::AngleAxisd(angle, axis)) * q);
}

double rotation_angle_between(const Quat& a, const Quat& b)
{
    // atan2 form keeps full precision near zero, where acos of the dot product does not.
    const Quat r = a.normalized().conjugate() * b.normalized();
    return 2.0 * std::atan2(r.vec().norm(), std::abs(r.w()));
}

double quaternion_distance(const Quat& a, const Quat& b)
{
    const double plus = (a.coeffs() - b.coeffs()).norm();
    const double minus = (a.coeffs() + b.coeffs()).norm();
    return std::min(plus, minus);
}

Quat canonical(const Quat& q)
{
    const std::array<double, 4> c{q.w(), q.x(), q.y(), q.z()};
    for (double v : c) {
        if (v > 0.0)
            return q;
        if (v < 0.0)
            return Quat(-q.w(), -q.x(), -q.y(), -q.z());
    }
    return q;
}

std::array<double, 4> to_wxyz(const Quat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

Quat from_wxyz(const std::array<double, 4>& wxyz)
{
    return unit(Quat(wxyz[0], wxyz[1], wxyz[2], wxyz[3]));
}

CellKey bin_descriptor(const Vec3& position, double cell_size)
{
    if (!(cell_size > 0.0) || !std::isfinite(cell_size))
        throw Error(ErrorCode::invalid_argument, "cell size must be positive");
    if (!position.allFinite())
        throw Error(ErrorCode::non_finite, "descriptor position is not finite");
    auto bin = [cell_size](double v) { return static_cast<std::int64_t>(std::floor(v / cell_size)); };
    return {bin(position.x()), bin(position.y()), bin(position.z())};
}

std::int64_t chebyshev_distance(const CellKey& a, const CellKey& b)
{
    return std::max({std::abs(a.i - b.i), std::abs(a.j - b.j), std::abs(a.k - b.k)});
}

std::size_t CellKeyHash::operator()(const CellKey& key) const noexcept
{
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {key.i, key.j, key.k}) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

} // namespace qdtraj
