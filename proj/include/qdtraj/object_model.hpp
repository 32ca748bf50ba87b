#pragma once

#include "qdtraj/se3.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdtraj {

struct BoxPrimitive {
    Vec3 half_extents = Vec3::Constant(0.5);
    Pose local_pose;

    bool operator==(const BoxPrimitive&) const = default;
};

struct RigidPart {
    std::string name;
    std::vector<BoxPrimitive> boxes;

    bool operator==(const RigidPart&) const = default;
};

enum class JointKind { revolute, prismatic, fixed };

std::string_view to_string(JointKind kind);

struct JointLimits {
    double lower = 0.0;
    double upper = 0.0;

    bool operator==(const JointLimits&) const = default;
};

struct ObjectJoint {
    std::string name;
    JointKind kind = JointKind::fixed;
    std::size_t parent = 0;
    std::size_t child = 0;
    /// Child frame at zero joint value, in the parent frame.
    Pose origin;
    /// Unit axis in the child joint frame.
    Vec3 axis = Vec3::UnitX();
    JointLimits limits;

    bool movable() const { return kind != JointKind::fixed; }
    /// Child-frame motion for the given joint value.
    Pose motion(double value) const;

    bool operator==(const ObjectJoint&) const = default;
};

/// Values of the movable joints, indexed like ArticulatedObject::movable_joints().
using JointValues = std::vector<double>;

struct Aabb {
    Vec3 lower;
    Vec3 upper;
};

/// Kinematic tree of box-primitive parts. Immutable after construction; the
/// constructor validates the tree (single root, one parent joint per non-root part).
class ArticulatedObject {
public:
    ArticulatedObject(std::string name, Pose base_pose, std::vector<RigidPart> parts, std::vector<ObjectJoint> joints);

    const std::string& name() const { return _name; }
    const Pose& base_pose() const { return _base_pose; }
    const std::vector<RigidPart>& parts() const { return _parts; }
    const std::vector<ObjectJoint>& joints() const { return _joints; }
    const std::vector<std::size_t>& movable_joints() const { return _movable; }
    const ObjectJoint& movable_joint(std::size_t movable_index) const;
    std::size_t base_part() const { return _base; }
    std::optional<std::size_t> find_part(std::string_view name) const;
    std::optional<std::size_t> find_movable_joint(std::string_view name) const;

    /// Same object placed at a different base pose.
    ArticulatedObject with_base_pose(const Pose& base_pose) const;

    /// World pose of every part. Throws ErrorCode::out_of_limits for a value outside its joint limits.
    std::vector<Pose> part_poses(const JointValues& values) const;
    /// Part poses relative to the object base frame.
    std::vector<Pose> part_poses_in_object_frame(const JointValues& values) const;

    /// Movable joints at 0, clamped into their limits.
    JointValues rest_configuration() const;

    bool operator==(const ArticulatedObject& other) const;

private:
    std::vector<Pose> chain(const JointValues& values, const Pose& root) const;

    std::string _name;
    Pose _base_pose;
    std::vector<RigidPart> _parts;
    std::vector<ObjectJoint> _joints;
    std::vector<std::size_t> _movable;
    std::size_t _base = 0;
    // Joint indices in parent-before-child order.
    std::vector<std::size_t> _order;
};

/// Bounding box, in the frame of `part_pose`'s parent, of every box of one part.
Aabb part_aabb(const RigidPart& part, const Pose& part_pose);

/// A request to move one movable joint from s_init to s_target.
struct ActivationTask {
    std::size_t joint_index = 0;
    double s_init = 0.0;
    double s_target = 0.0;
    /// Values for the other movable joints; empty means rest_configuration().
    JointValues other_joint_values;
};

/// Throws ErrorCode::invalid_task when the task does not fit the object.
void validate_task(const ArticulatedObject& object, const ActivationTask& task);

/// Full configuration with the task joint at `s`.
JointValues task_configuration(const ArticulatedObject& object, const ActivationTask& task, double s);

/// Child part moved by the task joint.
std::size_t moving_part(const ArticulatedObject& object, const ActivationTask& task);

struct UrdfParseResult {
    ArticulatedObject object;
    std::vector<std::string> warnings;
};

/// Parses the supported URDF subset (box collision geometry; revolute, prismatic and fixed joints).
UrdfParseResult parse_urdf(const std::string& xml);
UrdfParseResult load_urdf(const std::string& path);

inline constexpr int kModelVersion = 1;

nlohmann::json object_to_json(const ArticulatedObject& object);
ArticulatedObject object_from_json(const nlohmann::json& doc);

struct ExperimentalBoxSpec {
    Vec3 body_size{0.40, 0.50, 0.36};
    // Door: thickness (x), width (y), height (z).
    Vec3 door_size{0.02, 0.44, 0.30};
    Vec3 door_handle_size{0.04, 0.02, 0.12};
    // Distance from the door's free edge to the handle centre.
    double door_handle_inset = 0.06;
    Vec3 tray_size{0.30, 0.40, 0.02};
    Vec3 tray_handle_size{0.02, 0.12, 0.04};
    double hinge_upper = 1.5707963267948966;
    double slide_travel = 0.20;
    Pose base_pose;
};

/// Frame body, hinged front door with a protruding handle, and a top sliding tray
/// with a front handle. Movable joints: 0 = "hinge0" (z-axis door hinge), 1 = "slider0".
ArticulatedObject make_experimental_box(const ExperimentalBoxSpec& spec = {});

} // namespace qdtraj
