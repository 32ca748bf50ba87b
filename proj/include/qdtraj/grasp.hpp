#pragma once

#include "qdtraj/object_model.hpp"

#include <optional>

namespace qdtraj {

/// Two-finger parallel gripper reduced to a closing segment and a palm box.
struct GripperModel {
    double aperture_max = 0.08;
    double chord_min = 0.002;
    double chord_clearance = 0.002;
    /// Palm collision proxy, in the TCP frame.
    BoxPrimitive body_box{Vec3(0.04, 0.05, 0.03), Pose::translation({0.0, 0.0, -0.085})};
    Vec3 closing_axis = Vec3::UnitY();
    Vec3 approach_axis = Vec3::UnitZ();
    /// End-effector frame to TCP.
    Pose tcp_offset;
};

/// Throws ErrorCode::invalid_argument when the model violates 0 < chord_min < aperture_max or clearance >= 0.
void validate_gripper(const GripperModel& gripper);

struct GraspOutcome {
    bool success = false;
    double chord = 0.0;
    std::optional<std::size_t> grasped_part;
    bool collision = false;
};

/// Length of the part of segment [start, end] inside the solid box (slab method).
/// `part_pose` is the world pose of the part owning `box`. Tangent contact yields 0.
double segment_box_chord(const Vec3& seg_start, const Vec3& seg_end, const BoxPrimitive& box, const Pose& part_pose);

/// Separating-axis test between two oriented boxes given in world poses (box centre frames).
/// Touching faces do not count as overlap.
bool boxes_overlap(const Vec3& half_a, const Pose& pose_a, const Vec3& half_b, const Pose& pose_b);

/// World pose of the palm box for an end-effector pose.
Pose palm_pose(const GripperModel& gripper, const Pose& ee_pose);

/// True when the palm at `ee_pose` overlaps any box of any part other than `grasped_part`.
bool palm_collides(const ArticulatedObject& object, const std::vector<Pose>& part_poses, const GripperModel& gripper,
    const Pose& ee_pose, std::size_t grasped_part);

/// Chord-and-collision grasp test. `ee_pose` is in world coordinates.
GraspOutcome evaluate_grasp(const ArticulatedObject& object, const JointValues& joint_values, const GripperModel& gripper,
    const Pose& ee_pose, std::size_t target_part);

/// Same test against precomputed world part poses.
GraspOutcome evaluate_grasp(const ArticulatedObject& object, const std::vector<Pose>& part_poses, const GripperModel& gripper,
    const Pose& ee_pose, std::size_t target_part);

} // namespace qdtraj
