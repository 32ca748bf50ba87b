#include "qdtraj/interaction.hpp"

#include "qdtraj/error.hpp"
#include "qdtraj/random.hpp"

#include <algorithm>
#include <cmath>

namespace qdtraj {

std::string_view to_string(ActionSpace space)
{
    switch (space) {
    case ActionSpace::adaptive: return "adaptive";
    case ActionSpace::where2act: return "where2act";
    case ActionSpace::vatmart: return "vatmart";
    }
    return "adaptive";
}

ActionSpace action_space_from_string(std::string_view name)
{
    if (name == "adaptive")
        return ActionSpace::adaptive;
    if (name == "where2act")
        return ActionSpace::where2act;
    if (name == "vatmart")
        return ActionSpace::vatmart;
    throw Error(ErrorCode::invalid_argument, "unknown action space '" + std::string(name) + "'");
}

void validate_interaction(const InteractionConfig& cfg)
{
    if (cfg.n_steps < 2)
        throw Error(ErrorCode::invalid_argument, "n_steps must be >= 2");
    if (!(cfg.workspace_radius > 0.0) || !(cfg.slip_tolerance > 0.0) || !(cfg.primitive_stroke > 0.0) || cfg.vatmart_waypoints < 1
        || !(cfg.vatmart_translation_bound >= 0.0) || !(cfg.vatmart_rotation_bound >= 0.0) || !(cfg.cell_size > 0.0))
        throw Error(ErrorCode::invalid_argument, "interaction bounds must be positive");
    if (!cfg.workspace_center.allFinite())
        throw Error(ErrorCode::non_finite, "workspace centre is not finite");
}

namespace {

Vec3 jacobian_from_child(const ObjectJoint& joint, const Pose& child_pose, const Vec3& point)
{
    // The child frame origin lies on the joint axis, and the axis is invariant under its own motion.
    const Vec3 axis = rotate_vector(child_pose, joint.axis);
    if (joint.kind == JointKind::prismatic)
        return axis;
    return axis.cross(point - child_pose.position);
}

/// Shared state of one evaluation, everything expressed in the object base frame.
struct Rollout {
    const ArticulatedObject& object;
    const ActivationTask& task;
    const GripperModel& gripper;
    const InteractionConfig& cfg;
    const ObjectJoint& joint;
    std::size_t part;
    Vec3 center;
    Pose grasp_in_part;

    Rollout(const ArticulatedObject& o, const ActivationTask& t, const GripperModel& g, const InteractionConfig& c)
        : object(o), task(t), gripper(g), cfg(c), joint(o.movable_joint(t.joint_index)), part(moving_part(o, t)),
          center(transform_point(invert(o.base_pose()), c.workspace_center))
    {
    }

    std::vector<Pose> poses_at(double s) const { return object.part_poses_in_object_frame(task_configuration(object, task, s)); }

    Pose ee_at(const std::vector<Pose>& poses) const { return compose(poses[part], grasp_in_part); }

    Vec3 tcp_position(const Pose& ee) const { return compose(ee, gripper.tcp_offset).position; }

    bool detached(const std::vector<Pose>& poses, const Pose& ee) const
    {
        if ((ee.position - center).norm() > cfg.workspace_radius)
            return true;
        return palm_collides(object, poses, gripper, ee, part);
    }

    /// Grasp test at s_init; on success fixes the grasp frame relative to the moving part.
    bool grasp(const Pose& genotype_pose, EvalResult& result)
    {
        validate_task(object, task);
        result.descriptor = bin_descriptor(genotype_pose.position, cfg.cell_size);
        result.s_drop = task.s_init;
        const auto poses = poses_at(task.s_init);
        result.grasp_success = evaluate_grasp(object, poses, gripper, genotype_pose, part).success;
        if (!result.grasp_success)
            return false;
        grasp_in_part = compose(invert(poses[part]), genotype_pose);
        return true;
    }

    double signed_progress(double s_drop) const
    {
        return std::clamp((s_drop - task.s_init) / (task.s_target - task.s_init), 0.0, 1.0);
    }

    /// Drives the joint so the part-attached TCP tracks `commanded` positions through the
    /// point Jacobian. Detaches when the tracking gap exceeds the slip tolerance, the TCP
    /// leaves the workspace, or the palm collides; stops at a joint limit.
    void track(const Pose& genotype_pose, const std::vector<Vec3>& commanded, EvalResult& result) const
    {
        TrajectoryPrimitive traj;
        traj.frames.push_back(genotype_pose);
        traj.joint_values.push_back(task.s_init);

        double s = task.s_init;
        auto poses = poses_at(s);
        Vec3 actual = tcp_position(genotype_pose);
        for (const Vec3& target : commanded) {
            const Vec3 jac = jacobian_from_child(joint, poses[part], actual);
            const double jj = jac.squaredNorm();
            const double ds = jj > 1e-18 ? jac.dot(target - actual) / jj : 0.0;
            double next = s + ds;
            const bool at_limit = next < joint.limits.lower || next > joint.limits.upper;
            if (at_limit)
                next = std::clamp(next, joint.limits.lower, joint.limits.upper);

            auto next_poses = poses_at(next);
            const Pose ee = ee_at(next_poses);
            const Vec3 tcp = tcp_position(ee);
            if ((target - tcp).norm() > cfg.slip_tolerance || detached(next_poses, ee))
                break;

            s = next;
            poses = std::move(next_poses);
            actual = tcp;
            traj.frames.push_back(ee);
            traj.joint_values.push_back(s);
            if (at_limit)
                break;
        }
        result.s_drop = s;
        result.fitness = signed_progress(s);
        result.trajectory = std::move(traj);
    }
};

} // namespace

Vec3 joint_point_jacobian(const ArticulatedObject& object, const ActivationTask& task, const JointValues& joint_values, const Vec3& point)
{
    const auto& joint = object.movable_joint(task.joint_index);
    const auto poses = object.part_poses(joint_values);
    return jacobian_from_child(joint, poses[joint.child], point);
}

EvalResult evaluate_adaptive(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Pose& genotype_pose, const InteractionConfig& cfg)
{
    EvalResult result;
    Rollout rollout(object, task, gripper, cfg);
    if (!rollout.grasp(genotype_pose, result))
        return result;

    TrajectoryPrimitive traj;
    traj.frames.push_back(genotype_pose);
    traj.joint_values.push_back(task.s_init);

    const int n = cfg.n_steps;
    int reached = 0;
    for (int k = 1; k <= n; ++k) {
        const double s = k == n ? task.s_target : task.s_init + (static_cast<double>(k) / n) * (task.s_target - task.s_init);
        const auto poses = rollout.poses_at(s);
        const Pose ee = rollout.ee_at(poses);
        if (rollout.detached(poses, ee))
            break;
        traj.frames.push_back(ee);
        traj.joint_values.push_back(s);
        reached = k;
    }
    result.s_drop = traj.joint_values.back();
    // Step fraction rather than a ratio of joint values keeps k/n thresholds exact.
    result.fitness = static_cast<double>(reached) / n;
    result.trajectory = std::move(traj);
    return result;
}

EvalResult evaluate_where2act(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Pose& genotype_pose, int primitive_index, const InteractionConfig& cfg)
{
    if (primitive_index < 0 || primitive_index >= static_cast<int>(kPrimitiveDirections.size()))
        throw Error(ErrorCode::invalid_argument, "primitive index must be in [0, 5], got " + std::to_string(primitive_index));

    EvalResult result;
    Rollout rollout(object, task, gripper, cfg);
    if (!rollout.grasp(genotype_pose, result))
        return result;

    const auto& d = kPrimitiveDirections[primitive_index];
    Vec3 direction(d[0], d[1], d[2]);
    const Pose tcp0 = compose(genotype_pose, gripper.tcp_offset);
    if (cfg.primitive_frame == PrimitiveFrame::gripper)
        direction = rotate_vector(tcp0, direction);
    const Vec3 step = direction * (cfg.primitive_stroke / cfg.n_steps);

    std::vector<Vec3> commanded;
    commanded.reserve(cfg.n_steps);
    for (int k = 1; k <= cfg.n_steps; ++k)
        commanded.push_back(tcp0.position + static_cast<double>(k) * step);
    rollout.track(genotype_pose, commanded, result);
    return result;
}

EvalResult evaluate_vatmart(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Pose& genotype_pose, std::uint64_t global_seed, std::uint64_t genotype_seed, const InteractionConfig& cfg)
{
    EvalResult result;
    Rollout rollout(object, task, gripper, cfg);
    if (!rollout.grasp(genotype_pose, result))
        return result;

    CounterRng rng = CounterRng::keyed(global_seed, genotype_seed);
    const int substeps = std::max(1, cfg.n_steps / cfg.vatmart_waypoints);
    const double tb = cfg.vatmart_translation_bound;
    const double rb = cfg.vatmart_rotation_bound;

    std::vector<Vec3> commanded;
    commanded.reserve(static_cast<std::size_t>(substeps) * cfg.vatmart_waypoints);
    Pose waypoint = compose(genotype_pose, gripper.tcp_offset);
    for (int w = 0; w < cfg.vatmart_waypoints; ++w) {
        Vec3 translation;
        for (int axis = 0; axis < 3; ++axis)
            translation[axis] = rng.uniform(-tb, tb);
        const Vec3 axis = random_unit_vector(rng);
        const double angle = rng.uniform(-rb, rb);
        // Residuals are expressed in the previous commanded frame.
        const Pose next = compose(waypoint, Pose(translation, axis_angle_rotate(Quat::Identity(), axis, angle)));
        for (int j = 1; j <= substeps; ++j)
            commanded.push_back(waypoint.position + (static_cast<double>(j) / substeps) * (next.position - waypoint.position));
        waypoint = next;
    }
    rollout.track(genotype_pose, commanded, result);
    return result;
}

} // namespace qdtraj
