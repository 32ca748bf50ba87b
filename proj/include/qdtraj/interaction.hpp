#pragma once

#include "qdtraj/grasp.hpp"
#include "qdtraj/object_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace qdtraj {

enum class ActionSpace { adaptive, where2act, vatmart };

std::string_view to_string(ActionSpace space);
ActionSpace action_space_from_string(std::string_view name);

enum class PrimitiveFrame { gripper, world };

/// End-effector path in the object base frame with the object joint value at each step.
struct TrajectoryPrimitive {
    std::vector<Pose> frames;
    std::vector<double> joint_values;
};

struct EvalResult {
    bool grasp_success = false;
    double s_drop = 0.0;
    double fitness = 0.0;
    std::optional<TrajectoryPrimitive> trajectory;
    CellKey descriptor;
};

struct InteractionConfig {
    int n_steps = 100;
    /// Centre of the reachable sphere, world frame.
    Vec3 workspace_center{0.8, -0.2, 0.333};
    double workspace_radius = 0.855;
    /// Largest tolerated gap between commanded and part-attached TCP position (baselines).
    double slip_tolerance = 0.005;
    double primitive_stroke = 0.30;
    PrimitiveFrame primitive_frame = PrimitiveFrame::gripper;
    int vatmart_waypoints = 8;
    double vatmart_translation_bound = 0.05;
    double vatmart_rotation_bound = 0.3;
    double cell_size = 0.01;
};

/// Throws ErrorCode::invalid_argument on n_steps < 2 or non-positive bounds.
void validate_interaction(const InteractionConfig& cfg);

/// Push, Pull, Right, Left, Up, Down.
inline constexpr std::array<std::array<double, 3>, 6> kPrimitiveDirections{{
    {1.0, 0.0, 0.0},
    {-1.0, 0.0, 0.0},
    {0.0, 1.0, 0.0},
    {0.0, -1.0, 0.0},
    {0.0, 0.0, 1.0},
    {0.0, 0.0, -1.0},
}};

/// Velocity of a point rigidly attached to the task's moving part per unit joint rate, world frame.
Vec3 joint_point_jacobian(const ArticulatedObject& object, const ActivationTask& task, const JointValues& joint_values, const Vec3& point);

/// Object joint drags a compliant end effector: the grasp frame rides rigidly on the part
/// until it leaves the workspace sphere or the palm hits another part.
/// `genotype_pose` is the starting end-effector frame in the object base frame.
EvalResult evaluate_adaptive(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Pose& genotype_pose, const InteractionConfig& cfg);

/// Straight-line push of `primitive_stroke` along one of the six fixed directions.
EvalResult evaluate_where2act(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Pose& genotype_pose, int primitive_index, const InteractionConfig& cfg);

/// Random residual waypoints drawn from a counter-based stream keyed by (global_seed, genotype_seed).
EvalResult evaluate_vatmart(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Pose& genotype_pose, std::uint64_t global_seed, std::uint64_t genotype_seed, const InteractionConfig& cfg);

} // namespace qdtraj
