#include "qdtraj/object_model.hpp"

#include "qdtraj/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace qdtraj {

std::string_view to_string(JointKind kind)
{
    switch (kind) {
    case JointKind::revolute: return "revolute";
    case JointKind::prismatic: return "prismatic";
    case JointKind::fixed: return "fixed";
    }
    return "fixed";
}

Pose ObjectJoint::motion(double value) const
{
    switch (kind) {
    case JointKind::revolute: return {Vec3::Zero(), Quat(Eigen::AngleAxisd(value, axis))};
    case JointKind::prismatic: return Pose::translation(axis * value);
    case JointKind::fixed: break;
    }
    return Pose::identity();
}

ArticulatedObject::ArticulatedObject(std::string name, Pose base_pose, std::vector<RigidPart> parts, std::vector<ObjectJoint> joints)
    : _name(std::move(name)), _base_pose(base_pose), _parts(std::move(parts)), _joints(std::move(joints))
{
    if (_parts.empty())
        throw Error(ErrorCode::malformed_tree, "object has no parts");
    for (std::size_t p = 0; p < _parts.size(); ++p) {
        const auto& part = _parts[p];
        if (part.boxes.empty())
            throw Error(ErrorCode::missing_geometry, "part '" + part.name + "' has no box geometry");
        for (const auto& box : part.boxes) {
            if (!(box.half_extents.array() > 0.0).all() || !box.half_extents.allFinite())
                throw Error(ErrorCode::invalid_argument, "part '" + part.name + "' has a box with non-positive extents");
        }
        for (std::size_t q = 0; q < p; ++q) {
            if (_parts[q].name == part.name)
                throw Error(ErrorCode::malformed_tree, "duplicate part name '" + part.name + "'");
        }
    }

    std::vector<int> parent_joint(_parts.size(), -1);
    for (std::size_t j = 0; j < _joints.size(); ++j) {
        auto& joint = _joints[j];
        if (joint.parent >= _parts.size() || joint.child >= _parts.size())
            throw Error(ErrorCode::malformed_tree, "joint '" + joint.name + "' references an unknown part");
        if (parent_joint[joint.child] != -1)
            throw Error(ErrorCode::malformed_tree, "part '" + _parts[joint.child].name + "' has more than one parent joint");
        parent_joint[joint.child] = static_cast<int>(j);
        if (joint.movable()) {
            if (std::abs(joint.axis.norm() - 1.0) > 1e-9)
                throw Error(ErrorCode::invalid_argument, "joint '" + joint.name + "' axis is not unit length");
            if (!(joint.limits.lower < joint.limits.upper))
                throw Error(ErrorCode::missing_limits, "joint '" + joint.name + "' requires lower < upper");
            _movable.push_back(j);
        }
        else {
            joint.limits = {0.0, 0.0};
        }
    }

    std::size_t roots = 0;
    for (std::size_t p = 0; p < _parts.size(); ++p) {
        if (parent_joint[p] == -1) {
            _base = p;
            ++roots;
        }
    }
    if (roots != 1)
        throw Error(ErrorCode::malformed_tree, "joint graph must have exactly one root part, found " + std::to_string(roots));

    // Breadth-first from the root; a cycle leaves parts unreached.
    std::vector<bool> reached(_parts.size(), false);
    std::deque<std::size_t> queue{_base};
    reached[_base] = true;
    while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < _joints.size(); ++j) {
            if (_joints[j].parent == p && !reached[_joints[j].child]) {
                reached[_joints[j].child] = true;
                _order.push_back(j);
                queue.push_back(_joints[j].child);
            }
        }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end())
        throw Error(ErrorCode::malformed_tree, "joint graph contains a cycle or disconnected parts");
}

const ObjectJoint& ArticulatedObject::movable_joint(std::size_t movable_index) const
{
    if (movable_index >= _movable.size())
        throw Error(ErrorCode::invalid_task, "movable joint index " + std::to_string(movable_index) + " out of range");
    return _joints[_movable[movable_index]];
}

std::optional<std::size_t> ArticulatedObject::find_part(std::string_view name) const
{
    for (std::size_t p = 0; p < _parts.size(); ++p) {
        if (_parts[p].name == name)
            return p;
    }
    return std::nullopt;
}

std::optional<std::size_t> ArticulatedObject::find_movable_joint(std::string_view name) const
{
    for (std::size_t m = 0; m < _movable.size(); ++m) {
        if (_joints[_movable[m]].name == name)
            return m;
    }
    return std::nullopt;
}

ArticulatedObject ArticulatedObject::with_base_pose(const Pose& base_pose) const
{
    ArticulatedObject copy = *this;
    copy._base_pose = base_pose;
    return copy;
}

std::vector<Pose> ArticulatedObject::chain(const JointValues& values, const Pose& root) const
{
    if (values.size() != _movable.size())
        throw Error(ErrorCode::invalid_argument,
            "expected " + std::to_string(_movable.size()) + " joint values, got " + std::to_string(values.size()));

    std::vector<double> per_joint(_joints.size(), 0.0);
    for (std::size_t m = 0; m < _movable.size(); ++m) {
        const auto& joint = _joints[_movable[m]];
        const double v = values[m];
        if (!(v >= joint.limits.lower && v <= joint.limits.upper))
            throw Error(ErrorCode::out_of_limits, "joint '" + joint.name + "' value " + std::to_string(v) + " outside ["
                    + std::to_string(joint.limits.lower) + ", " + std::to_string(joint.limits.upper) + "]");
        per_joint[_movable[m]] = v;
    }

    std::vector<Pose> poses(_parts.size());
    poses[_base] = root;
    for (std::size_t j : _order) {
        const auto& joint = _joints[j];
        poses[joint.child] = compose(compose(poses[joint.parent], joint.origin), joint.motion(per_joint[j]));
    }
    return poses;
}

std::vector<Pose> ArticulatedObject::part_poses(const JointValues& values) const { return chain(values, _base_pose); }

std::vector<Pose> ArticulatedObject::part_poses_in_object_frame(const JointValues& values) const
{
    return chain(values, Pose::identity());
}

JointValues ArticulatedObject::rest_configuration() const
{
    JointValues values;
    values.reserve(_movable.size());
    for (std::size_t j : _movable)
        values.push_back(std::clamp(0.0, _joints[j].limits.lower, _joints[j].limits.upper));
    return values;
}

bool ArticulatedObject::operator==(const ArticulatedObject& other) const
{
    return _name == other._name && _base_pose == other._base_pose && _parts == other._parts && _joints == other._joints;
}

Aabb part_aabb(const RigidPart& part, const Pose& part_pose)
{
    Aabb box{Vec3::Constant(std::numeric_limits<double>::infinity()), Vec3::Constant(-std::numeric_limits<double>::infinity())};
    for (const auto& prim : part.boxes) {
        const Pose world = compose(part_pose, prim.local_pose);
        for (int corner = 0; corner < 8; ++corner) {
            const Vec3 sign((corner & 1) ? 1.0 : -1.0, (corner & 2) ? 1.0 : -1.0, (corner & 4) ? 1.0 : -1.0);
            const Vec3 p = transform_point(world, prim.half_extents.cwiseProduct(sign));
            box.lower = box.lower.cwiseMin(p);
            box.upper = box.upper.cwiseMax(p);
        }
    }
    return box;
}

void validate_task(const ArticulatedObject& object, const ActivationTask& task)
{
    if (task.joint_index >= object.movable_joints().size())
        throw Error(ErrorCode::invalid_task, "task joint index " + std::to_string(task.joint_index) + " out of range (object has "
                + std::to_string(object.movable_joints().size()) + " movable joints)");
    const auto& joint = object.movable_joint(task.joint_index);
    if (!std::isfinite(task.s_init) || !std::isfinite(task.s_target) || task.s_init == task.s_target)
        throw Error(ErrorCode::invalid_task, "task requires finite s_init != s_target");
    for (double s : {task.s_init, task.s_target}) {
        if (s < joint.limits.lower || s > joint.limits.upper)
            throw Error(ErrorCode::invalid_task, "task value " + std::to_string(s) + " outside limits of joint '" + joint.name + "'");
    }
    if (!task.other_joint_values.empty()) {
        if (task.other_joint_values.size() != object.movable_joints().size())
            throw Error(ErrorCode::invalid_task, "other_joint_values must cover every movable joint");
        for (std::size_t m = 0; m < task.other_joint_values.size(); ++m) {
            const auto& lim = object.movable_joint(m).limits;
            if (m != task.joint_index && (task.other_joint_values[m] < lim.lower || task.other_joint_values[m] > lim.upper))
                throw Error(ErrorCode::invalid_task, "rest value outside limits of joint '" + object.movable_joint(m).name + "'");
        }
    }
}

JointValues task_configuration(const ArticulatedObject& object, const ActivationTask& task, double s)
{
    JointValues values = task.other_joint_values.empty() ? object.rest_configuration() : task.other_joint_values;
    values.at(task.joint_index) = s;
    return values;
}

std::size_t moving_part(const ArticulatedObject& object, const ActivationTask& task)
{
    return object.movable_joint(task.joint_index).child;
}

} // namespace qdtraj
