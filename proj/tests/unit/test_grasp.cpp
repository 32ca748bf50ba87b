#include "qdtraj/error.hpp"
#include "qdtraj/grasp.hpp"
#include "qdtraj/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qdtraj;

namespace {

constexpr double kPi = std::numbers::pi;

/// Midpoint-rule membership oracle: fraction of `samples` evenly spaced points inside the box times length.
double membership_chord(const Vec3& a, const Vec3& b, const Vec3& half, const Pose& box_pose, int samples)
{
    const Pose inv = invert(box_pose);
    int inside = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) / samples;
        const Vec3 p = transform_point(inv, a + t * (b - a));
        if (std::abs(p.x()) < half.x() && std::abs(p.y()) < half.y() && std::abs(p.z()) < half.z())
            ++inside;
    }
    return static_cast<double>(inside) / samples * (b - a).norm();
}

/// Approach pointing down world -z, closing along world y.
Quat top_down() { return Pose::rotation(Vec3::UnitX(), kPi).orientation; }

ArticulatedObject slab(double thickness)
{
    return ArticulatedObject("slab", Pose(), {{"slab", {BoxPrimitive{Vec3(0.2, thickness / 2, 0.2), Pose()}}}}, {});
}

} // namespace

TEST(SegmentBoxChord, AxisAlignedPassThrough)
{
    const BoxPrimitive unit{Vec3::Constant(0.5), Pose()};
    EXPECT_DOUBLE_EQ(segment_box_chord({-1, 0, 0}, {1, 0, 0}, unit, Pose()), 1.0);
    EXPECT_DOUBLE_EQ(segment_box_chord({0, 0, 0}, {1, 0, 0}, unit, Pose()), 0.5);
}

TEST(SegmentBoxChord, OutsideAndTangentAreZero)
{
    const BoxPrimitive unit{Vec3::Constant(0.5), Pose()};
    EXPECT_EQ(segment_box_chord({-1, 2, 0}, {1, 2, 0}, unit, Pose()), 0.0);
    EXPECT_EQ(segment_box_chord({-1, 0.5, 0}, {1, 0.5, 0}, unit, Pose()), 0.0);
    EXPECT_EQ(segment_box_chord({0.6, 0, 0}, {2, 0, 0}, unit, Pose()), 0.0);
}

TEST(SegmentBoxChord, LocalBoxOffsetIsApplied)
{
    const BoxPrimitive shifted{Vec3::Constant(0.5), Pose::translation({3, 0, 0})};
    EXPECT_DOUBLE_EQ(segment_box_chord({2, 0, 0}, {4, 0, 0}, shifted, Pose()), 1.0);
    EXPECT_DOUBLE_EQ(segment_box_chord({2, 0, 0}, {4, 0, 0}, shifted, Pose::translation({0, 0, 0.25})), 1.0);
    EXPECT_EQ(segment_box_chord({2, 0, 0}, {4, 0, 0}, shifted, Pose::translation({0, 0, 0.75})), 0.0);
}

TEST(SegmentBoxChord, ObliqueThroughRotatedBoxMatchesMembershipOracle)
{
    const Vec3 half(0.3, 0.1, 0.2);
    const Pose pose(Vec3(0.1, -0.2, 0.05), Pose::rotation(Vec3(1, 1, 1).normalized(), 0.7).orientation);
    const Vec3 a(-0.5, -0.6, -0.3), b(0.6, 0.3, 0.4);
    const double chord = segment_box_chord(a, b, BoxPrimitive{half, Pose()}, pose);
    EXPECT_GT(chord, 0.0);
    EXPECT_NEAR(chord, membership_chord(a, b, half, pose, 1'000'000), 1e-4);
}

TEST(SegmentBoxChord, RandomPairsMatchMembershipOracle)
{
    Rng rng(41);
    int hits = 0;
    for (int n = 0; n < 40; ++n) {
        const Vec3 half(rng.uniform(0.01, 0.3), rng.uniform(0.01, 0.3), rng.uniform(0.01, 0.3));
        const Pose pose(Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)), random_unit_quaternion(rng));
        // Roughly antipodal endpoints so most segments cross the box region.
        const Vec3 a = 0.5 * random_unit_vector(rng);
        const Vec3 b = -a + 0.3 * random_unit_vector(rng);
        const double chord = segment_box_chord(a, b, BoxPrimitive{half, Pose()}, pose);
        EXPECT_NEAR(chord, membership_chord(a, b, half, pose, 100'000), 1e-4) << "case " << n;
        hits += chord > 0.0;
    }
    EXPECT_GT(hits, 10);
}

TEST(BoxesOverlap, SeparatedTouchingAndNested)
{
    const Vec3 h = Vec3::Constant(0.5);
    EXPECT_TRUE(boxes_overlap(h, Pose(), h, Pose::translation({0.9, 0, 0})));
    EXPECT_FALSE(boxes_overlap(h, Pose(), h, Pose::translation({1.0, 0, 0})));
    EXPECT_FALSE(boxes_overlap(h, Pose(), h, Pose::translation({1.5, 0.2, 0})));
    EXPECT_TRUE(boxes_overlap(h, Pose(), Vec3::Constant(0.1), Pose::translation({0.1, 0.1, 0.1})));
    // A 45-degree box reaches sqrt(2)/2 along x: the gap closes at x = 0.5 + 0.7071.
    const Pose turned(Vec3(1.25, 0, 0),Pose::rotation(Vec3::UnitZ(), kPi / 4).orientation);
    EXPECT_FALSE(boxes_overlap(h, Pose(), h, turned));
    EXPECT_TRUE(boxes_overlap(h, Pose(), h, Pose(Vec3(1.15, 0, 0), turned.orientation)));
}

TEST(ValidateGripper, RejectsBadModels)
{
    EXPECT_NO_THROW(validate_gripper(GripperModel{}));
    GripperModel g;
    g.chord_min = 0.09;
    EXPECT_THROW(validate_gripper(g), Error);
    g = GripperModel{};
    g.chord_clearance = -0.001;
    EXPECT_THROW(validate_gripper(g), Error);
    g = GripperModel{};
    g.closing_axis = Vec3(0, 2, 0);
    EXPECT_THROW(validate_gripper(g), Error);
}

TEST(EvaluateGrasp, OpenDoorEdgeIsGrasped)
{
    const auto box = make_experimental_box();
    // Door open at 90 degrees: the slab spans y in [0.20, 0.22] and x in [0.22, 0.66] with its top at z 0.33.
    const Pose ee(Vec3(0.64, 0.21, 0.30), top_down());
    const auto out = evaluate_grasp(box, JointValues{kPi / 2, 0.0}, GripperModel{}, ee, 1);
    EXPECT_NEAR(out.chord, 0.02, 1e-12);
    EXPECT_FALSE(out.collision);
    ASSERT_TRUE(out.grasped_part.has_value());
    EXPECT_EQ(*out.grasped_part, 1u);
    EXPECT_TRUE(out.success);
}

TEST(EvaluateGrasp, ChordMatchesMembershipOracle)
{
    const auto box = make_experimental_box();
    const auto poses = box.part_poses({kPi / 2, 0.0});
    const Pose ee(Vec3(0.64, 0.21, 0.30), top_down());
    const GripperModel g;
    const Vec3 axis = rotate_vector(ee, g.closing_axis) * (g.aperture_max / 2);
    const auto& slab_box = box.parts()[1].boxes[0];
    const double oracle = membership_chord(ee.position - axis, ee.position + axis, slab_box.half_extents, compose(poses[1], slab_box.local_pose), 1'000'000);
    EXPECT_NEAR(evaluate_grasp(box, poses, g, ee, 1).chord, oracle, 1e-4);
}

TEST(EvaluateGrasp, FarAwayFails)
{
    const auto box = make_experimental_box();
    const Pose ee(Vec3(1.64, 0.21, 0.30), top_down());
    const auto out = evaluate_grasp(box, JointValues{kPi / 2, 0.0}, GripperModel{}, ee, 1);
    EXPECT_EQ(out.chord, 0.0);
    EXPECT_FALSE(out.grasped_part.has_value());
    EXPECT_FALSE(out.success);
}

TEST(EvaluateGrasp, OverApertureSlabFails)
{
    const auto obj = slab(0.09);
    const auto out = evaluate_grasp(obj, JointValues{}, GripperModel{}, Pose(Vec3(0, 0, 0.1), top_down()), 0);
    EXPECT_NEAR(out.chord, 0.08, 1e-12);
    EXPECT_FALSE(out.success);
}

TEST(EvaluateGrasp, WrongPartAndPalmCollisionFail)
{
    const auto box = make_experimental_box();
    const Pose ee(Vec3(0.64, 0.21, 0.30), top_down());
    // Same pose judged against the tray.
    EXPECT_FALSE(evaluate_grasp(box, JointValues{kPi / 2, 0.0}, GripperModel{}, ee, 2).success);
    // Closing segment through the body: the palm sinks into the frame.
    const Pose inside(Vec3(0.0, 0.0, 0.2), top_down());
    const auto out = evaluate_grasp(box, JointValues{kPi / 2, 0.0}, GripperModel{}, inside, 1);
    EXPECT_FALSE(out.success);
    EXPECT_TRUE(out.collision);
}

TEST(EvaluateGrasp, FrameInvariance)
{
    const auto box = make_experimental_box();
    Rng rng(7);
    const GripperModel g;
    for (int n = 0; n < 300; ++n) {
        const Pose ee(Vec3(rng.uniform(0.1, 0.7), rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.4)), random_unit_quaternion(rng));
        const Pose shift(Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)), random_unit_quaternion(rng));
        const JointValues q{rng.uniform(0, kPi / 2), rng.uniform(0, 0.2)};
        const auto a = evaluate_grasp(box, q, g, ee, 1);
        const auto b = evaluate_grasp(box.with_base_pose(shift), q, g, compose(shift, ee), 1);
        EXPECT_NEAR(a.chord, b.chord, 1e-9);
        if (std::abs(a.chord - g.chord_min) > 1e-9 && std::abs(a.chord - (g.aperture_max - g.chord_clearance)) > 1e-9) {
            EXPECT_EQ(a.success, b.success);
            EXPECT_EQ(a.collision, b.collision);
        }
    }
}

TEST(EvaluateGrasp, MonotoneRejectionAlongClosingNormal)
{
    const auto obj = slab(0.03);
    const GripperModel g;
    // Closing axis is world y, the slab normal. Offsets grow away from the slab centre.
    bool failed = false;
    for (int i = 0; i <= 200; ++i) {
        const double offset = i * 0.0005;
        const auto out = evaluate_grasp(obj, JointValues{}, g, Pose(Vec3(0, offset, 0.1), top_down()), 0);
        if (failed) {
            EXPECT_FALSE(out.success) << "offset " << offset;
        }
        failed = failed || !out.success;
    }
    EXPECT_TRUE(failed);
}

TEST(EvaluateGrasp, Deterministic)
{
    const auto box = make_experimental_box();
    const Pose ee(Vec3(0.51, 0.22, 0.2), Quat(0.3, 0.1, -0.5, 0.8).normalized());
    const auto a = evaluate_grasp(box, JointValues{1.0, 0.1}, GripperModel{}, ee, 1);
    const auto b = evaluate_grasp(box, JointValues{1.0, 0.1}, GripperModel{}, ee, 1);
    EXPECT_EQ(a.chord, b.chord);
    EXPECT_EQ(a.success, b.success);
    EXPECT_EQ(a.collision, b.collision);
    EXPECT_EQ(a.grasped_part, b.grasped_part);
}
