#include "qdtraj/grasp.hpp"

#include "qdtraj/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdtraj {

void validate_gripper(const GripperModel& gripper)
{
    if (!(gripper.chord_min > 0.0 && gripper.chord_min < gripper.aperture_max))
        throw Error(ErrorCode::invalid_argument, "gripper requires 0 < chord_min < aperture_max");
    if (!(gripper.chord_clearance >= 0.0))
        throw Error(ErrorCode::invalid_argument, "gripper chord_clearance must be >= 0");
    if (!(gripper.body_box.half_extents.array() > 0.0).all())
        throw Error(ErrorCode::invalid_argument, "gripper body box extents must be positive");
    if (std::abs(gripper.closing_axis.norm() - 1.0) > 1e-9 || std::abs(gripper.approach_axis.norm() - 1.0) > 1e-9)
        throw Error(ErrorCode::invalid_argument, "gripper axes must be unit vectors");
}

double segment_box_chord(const Vec3& seg_start, const Vec3& seg_end, const BoxPrimitive& box, const Pose& part_pose)
{
    const Pose inv = invert(compose(part_pose, box.local_pose));
    const Vec3 p0 = transform_point(inv, seg_start);
    const Vec3 p1 = transform_point(inv, seg_end);
    const Vec3 d = p1 - p0;

    double t_enter = 0.0;
    double t_exit = 1.0;
    for (int axis = 0; axis < 3; ++axis) {
        const double h = box.half_extents[axis];
        if (d[axis] == 0.0) {
            if (std::abs(p0[axis]) >= h)
                return 0.0;
            continue;
        }
        double t0 = (-h - p0[axis]) / d[axis];
        double t1 = (h - p0[axis]) / d[axis];
        if (t0 > t1)
            std::swap(t0, t1);
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
        if (t_exit <= t_enter)
            return 0.0;
    }
    return (t_exit - t_enter) * d.norm();
}

bool boxes_overlap(const Vec3& half_a, const Pose& pose_a, const Vec3& half_b, const Pose& pose_b)
{
    constexpr double eps = 1e-12;
    const Eigen::Matrix3d ra = pose_a.rotation_matrix();
    const Eigen::Matrix3d rb = pose_b.rotation_matrix();
    // B's axes in A's frame.
    const Eigen::Matrix3d r = ra.transpose() * rb;
    const Eigen::Matrix3d abs_face = r.cwiseAbs();
    // Padded copy keeps near-parallel edge pairs from producing a degenerate cross axis.
    const Eigen::Matrix3d abs_r = abs_face.array() + eps;
    const Vec3 t = ra.transpose() * (pose_b.position - pose_a.position);

    for (int i = 0; i < 3; ++i) {
        if (std::abs(t[i]) >= half_a[i] + half_b.dot(abs_face.row(i)))
            return false;
    }
    for (int j = 0; j < 3; ++j) {
        if (std::abs(t.dot(r.col(j))) >= half_a.dot(abs_face.col(j)) + half_b[j])
            return false;
    }
    for (int i = 0; i < 3; ++i) {
        const int i1 = (i + 1) % 3;
        const int i2 = (i + 2) % 3;
        for (int j = 0; j < 3; ++j) {
            const int j1 = (j + 1) % 3;
            const int j2 = (j + 2) % 3;
            const double ra_proj = half_a[i1] * abs_r(i2, j) + half_a[i2] * abs_r(i1, j);
            const double rb_proj = half_b[j1] * abs_r(i, j2) + half_b[j2] * abs_r(i, j1);
            const double dist = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
            if (dist >= ra_proj + rb_proj)
                return false;
        }
    }
    return true;
}

Pose palm_pose(const GripperModel& gripper, const Pose& ee_pose)
{
    return compose(compose(ee_pose, gripper.tcp_offset), gripper.body_box.local_pose);
}

bool palm_collides(const ArticulatedObject& object, const std::vector<Pose>& part_poses, const GripperModel& gripper,
    const Pose& ee_pose, std::size_t grasped_part)
{
    const Pose palm = palm_pose(gripper, ee_pose);
    const auto& parts = object.parts();
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (p == grasped_part)
            continue;
        for (const auto& box : parts[p].boxes) {
            if (boxes_overlap(gripper.body_box.half_extents, palm, box.half_extents, compose(part_poses[p], box.local_pose)))
                return true;
        }
    }
    return false;
}

GraspOutcome evaluate_grasp(const ArticulatedObject& object, const std::vector<Pose>& part_poses, const GripperModel& gripper,
    const Pose& ee_pose, std::size_t target_part)
{
    const Pose tcp = compose(ee_pose, gripper.tcp_offset);
    const Vec3 half_stroke = rotate_vector(tcp, gripper.closing_axis) * (gripper.aperture_max / 2.0);
    const Vec3 a = tcp.position - half_stroke;
    const Vec3 b = tcp.position + half_stroke;

    GraspOutcome out;
    const auto& parts = object.parts();
    double best = 0.0;
    std::size_t touched = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        double chord = 0.0;
        for (const auto& box : parts[p].boxes)
            chord += segment_box_chord(a, b, box, part_poses[p]);
        if (chord > 0.0)
            ++touched;
        if (p == target_part)
            out.chord = chord;
        if (chord > best) {
            best = chord;
            out.grasped_part = p;
        }
    }
    out.collision = palm_collides(object, part_poses, gripper, ee_pose, target_part);
    out.success = touched == 1 && out.grasped_part == target_part && !out.collision && out.chord >= gripper.chord_min
        && out.chord <= gripper.aperture_max - gripper.chord_clearance;
    return out;
}

GraspOutcome evaluate_grasp(const ArticulatedObject& object, const JointValues& joint_values, const GripperModel& gripper,
    const Pose& ee_pose, std::size_t target_part)
{
    return evaluate_grasp(object, object.part_poses(joint_values), gripper, ee_pose, target_part);
}

} // namespace qdtraj
