#include "qdtraj/error.hpp"
#include "qdtraj/interaction.hpp"
#include "qdtraj/random.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qdtraj;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fixture(const std::string& name) { return std::string(QDTRAJ_FIXTURE_DIR) + "/" + name; }

Quat from_columns(const Vec3& x, const Vec3& y, const Vec3& z)
{
    Eigen::Matrix3d m;
    m.col(0) = x;
    m.col(1) = y;
    m.col(2) = z;
    return Quat(m);
}

const ActivationTask kHinge{0, kPi / 2, 0.0, {}};
const ActivationTask kSlider{1, 0.0, 0.2, {}};

/// Door handle of the builtin box at 90 degrees open, closing across its 2 cm side,
/// approaching along world -y.
Pose handle_grasp() { return {Vec3(0.60, 0.25, 0.18), from_columns(-Vec3::UnitZ(), Vec3::UnitX(), -Vec3::UnitY())}; }

/// Tray lip of the builtin box, closing vertically, approaching along +y. Gripper -x is world +x.
Pose tray_grasp() { return {Vec3(0.16, 0.0, 0.415), from_columns(-Vec3::UnitX(), Vec3::UnitZ(), Vec3::UnitY())}; }

/// Handle position at hinge value s, from the hinge line at (0.22, 0.22, 0.18) by a z rotation.
std::array<double, 3> handle_at(double s)
{
    const auto m = oracle::mul(oracle::translation(0.22, 0.22, 0.18), oracle::mul(oracle::rot_z(s - kPi / 2), oracle::translation(-0.22, -0.22, -0.18)));
    return oracle::apply(m, 0.60, 0.25, 0.18);
}

double distance_to(const std::array<double, 3>& p, const Vec3& c) { return std::hypot(p[0] - c.x(), p[1] - c.y(), p[2] - c.z()); }

/// Radius that puts the sphere boundary between hinge steps k and k + 1 of n.
double radius_between_steps(int k, int n, const Vec3& center)
{
    auto s = [&](int i) { return kPi / 2 - (static_cast<double>(i) / n) * (kPi / 2); };
    const double dk = distance_to(handle_at(s(k)), center);
    const double dk1 = distance_to(handle_at(s(k + 1)), center);
    EXPECT_GT(dk1, dk);
    for (int i = 0; i <= k; ++i)
        EXPECT_LT(distance_to(handle_at(s(i)), center), (dk + dk1) / 2);
    return (dk + dk1) / 2;
}

ArticulatedObject single_joint(JointKind kind, const Pose& origin, const Vec3& axis)
{
    ObjectJoint j;
    j.name = "j";
    j.kind = kind;
    j.parent = 0;
    j.child = 1;
    j.origin = origin;
    j.axis = axis;
    j.limits = {-1.0, 1.0};
    const BoxPrimitive cube{Vec3::Constant(0.05), Pose()};
    return ArticulatedObject("j", Pose(), {{"base", {cube}}, {"child", {cube}}}, {j});
}

} // namespace

TEST(JointPointJacobian, PrismaticIsAxis)
{
    const auto obj = single_joint(JointKind::prismatic, Pose::translation({0.3, 0.1, 0}), Vec3::UnitZ());
    const Vec3 j = joint_point_jacobian(obj, {0, 0.0, 0.5, {}}, {0.2}, Vec3(5, -3, 1));
    EXPECT_EQ(j, Vec3(0, 0, 1));
}

TEST(JointPointJacobian, RevoluteIsOmegaCrossR)
{
    const auto obj = single_joint(JointKind::revolute, Pose(), Vec3::UnitZ());
    const Vec3 j = joint_point_jacobian(obj, {0, 0.0, 0.5, {}}, {0.0}, Vec3(1, 0, 0));
    EXPECT_NEAR(j.x(), 0.0, 1e-15);
    EXPECT_NEAR(j.y(), 1.0, 1e-15);
    EXPECT_NEAR(j.z(), 0.0, 1e-15);
}

TEST(JointPointJacobian, OffsetAxisMatchesFiniteDifference)
{
    const Pose origin(Vec3(0.3, -0.2, 0.1), Pose::rotation(Vec3(1, 2, 3).normalized(), 0.8).orientation);
    const auto obj = single_joint(JointKind::revolute, origin, Vec3(0, 0.6, 0.8));
    const ActivationTask task{0, -0.5, 0.5, {}};
    Rng rng(2);
    for (int n = 0; n < 50; ++n) {
        const double s = rng.uniform(-0.9, 0.9);
        const Vec3 world(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec3 local = transform_point(invert(obj.part_poses({s})[1]), world);
        const double h = 1e-6;
        const Vec3 fd = (transform_point(obj.part_poses({s + h})[1], local) - transform_point(obj.part_poses({s - h})[1], local)) / (2 * h);
        EXPECT_LT((joint_point_jacobian(obj, task, {s}, world) - fd).norm(), 1e-5);
    }
}

TEST(EvaluateAdaptive, HandleGraspClosesTheDoor)
{
    const auto box = make_experimental_box();
    const auto r = evaluate_adaptive(box, kHinge, GripperModel{}, handle_grasp(), InteractionConfig{});
    ASSERT_TRUE(r.grasp_success);
    EXPECT_EQ(r.fitness, 1.0);
    EXPECT_EQ(r.s_drop, 0.0);
    ASSERT_TRUE(r.trajectory.has_value());
    EXPECT_EQ(r.trajectory->frames.size(), 101u);
    EXPECT_EQ(r.trajectory->joint_values.front(), kPi / 2);
    EXPECT_EQ(r.trajectory->joint_values.back(), 0.0);
    EXPECT_EQ(r.descriptor, bin_descriptor(handle_grasp().position, 0.01));
}

TEST(EvaluateAdaptive, WorkspaceExitAtSixtyFivePercent)
{
    const auto box = make_experimental_box();
    InteractionConfig cfg;
    // Centred on the start, the distance along the closing arc is a chord and grows with every step.
    cfg.workspace_center = handle_grasp().position;
    cfg.workspace_radius = radius_between_steps(65, 100, cfg.workspace_center);
    const auto r = evaluate_adaptive(box, kHinge, GripperModel{}, handle_grasp(), cfg);
    ASSERT_TRUE(r.grasp_success);
    EXPECT_EQ(r.fitness, 0.65);
    EXPECT_GE(r.fitness, 0.65);
    EXPECT_NEAR(r.s_drop * 180 / kPi, 90.0 - 58.5, 1e-9);
    EXPECT_EQ(r.trajectory->frames.size(), 66u);
}

TEST(EvaluateAdaptive, WorkspaceExitJustBeforeThreshold)
{
    const auto box = make_experimental_box();
    InteractionConfig cfg;
    cfg.n_steps = 1000;
    cfg.workspace_center = handle_grasp().position;
    cfg.workspace_radius = radius_between_steps(649, 1000, cfg.workspace_center);
    const auto r = evaluate_adaptive(box, kHinge, GripperModel{}, handle_grasp(), cfg);
    EXPECT_EQ(r.fitness, 0.649);
    EXPECT_LT(r.fitness, 0.65);
    cfg.workspace_radius = radius_between_steps(650, 1000, cfg.workspace_center);
    EXPECT_EQ(evaluate_adaptive(box, kHinge, GripperModel{}, handle_grasp(), cfg).fitness, 0.65);
}

TEST(EvaluateAdaptive, FailedGraspHasNoTrajectory)
{
    const auto box = make_experimental_box();
    const Pose far(Vec3(2, 2, 2), Quat::Identity());
    const auto r = evaluate_adaptive(box, kHinge, GripperModel{}, far, InteractionConfig{});
    EXPECT_FALSE(r.grasp_success);
    EXPECT_EQ(r.fitness, 0.0);
    EXPECT_FALSE(r.trajectory.has_value());
}

TEST(EvaluateWhere2Act, SliderPullAlongSlideAxis)
{
    const auto box = make_experimental_box();
    const auto r = evaluate_where2act(box, kSlider, GripperModel{}, tray_grasp(), 1, InteractionConfig{});
    ASSERT_TRUE(r.grasp_success);
    EXPECT_EQ(r.s_drop, 0.2);
    EXPECT_EQ(r.fitness, 1.0);
}

TEST(EvaluateWhere2Act, SliderUpIsOrthogonal)
{
    const auto box = make_experimental_box();
    const auto r = evaluate_where2act(box, kSlider, GripperModel{}, tray_grasp(), 4, InteractionConfig{});
    ASSERT_TRUE(r.grasp_success);
    EXPECT_EQ(r.s_drop, 0.0);
    EXPECT_EQ(r.fitness, 0.0);
    ASSERT_TRUE(r.trajectory.has_value());
    // Gap is 3 mm after one step and 6 mm after two.
    EXPECT_EQ(r.trajectory->frames.size(), 2u);
}

TEST(EvaluateWhere2Act, HingeLinePushIsPartial)
{
    const auto box = make_experimental_box();
    const double adaptive = evaluate_adaptive(box, kHinge, GripperModel{}, handle_grasp(), InteractionConfig{}).fitness;
    double best = 0.0;
    for (int p = 0; p < 6; ++p) {
        const auto r = evaluate_where2act(box, kHinge, GripperModel{}, handle_grasp(), p, InteractionConfig{});
        EXPECT_LT(r.fitness, adaptive) << "primitive " << p;
        best = std::max(best, r.fitness);
    }
    EXPECT_GT(best, 0.0);
}

TEST(EvaluateWhere2Act, HingeUpDetachesWhereLineLeavesArc)
{
    // Gripper "Up" is world -y, so the commanded line is x = 0.60. It sits 0.38 from the
    // hinge, inside the 0.3812 arc radius: a secant through the handle. The tracking gap
    // is the line's distance to the circle, sqrt(0.38^2 + d^2) - R, with d measured past
    // the foot of the hinge on the line. Detachment comes within a couple of 3 mm steps
    // of where that gap reaches the slip tolerance.
    const auto box = make_experimental_box();
    const auto r = evaluate_where2act(box, kHinge, GripperModel{}, handle_grasp(), 4, InteractionConfig{});
    const double radius = std::hypot(0.60 - 0.22, 0.25 - 0.22);
    const double d_max = std::sqrt(std::pow(radius + 0.005, 2) - 0.38 * 0.38);
    const double swept = std::atan2(0.03, 0.38) + std::atan2(d_max, 0.38);
    const double f_max = swept / (kPi / 2);
    const double step = (0.003 / radius) / (kPi / 2);
    EXPECT_LE(r.fitness, f_max);
    EXPECT_GE(r.fitness, f_max - 2 * step);
}

TEST(EvaluateWhere2Act, InvalidPrimitiveThrows)
{
    const auto box = make_experimental_box();
    EXPECT_THROW(evaluate_where2act(box, kSlider, GripperModel{}, tray_grasp(), 6, InteractionConfig{}), Error);
    EXPECT_THROW(evaluate_where2act(box, kSlider, GripperModel{}, tray_grasp(), -1, InteractionConfig{}), Error);
}

TEST(EvaluateVatmart, ZeroBoundDoesNotMove)
{
    const auto box = make_experimental_box();
    InteractionConfig cfg;
    cfg.vatmart_translation_bound = 0.0;
    cfg.vatmart_rotation_bound = 0.0;
    const auto r = evaluate_vatmart(box, kSlider, GripperModel{}, tray_grasp(), 3, 9, cfg);
    ASSERT_TRUE(r.grasp_success);
    EXPECT_EQ(r.s_drop, 0.0);
    EXPECT_EQ(r.fitness, 0.0);
}

TEST(EvaluateVatmart, Deterministic)
{
    const auto box = make_experimental_box();
    InteractionConfig cfg;
    cfg.slip_tolerance = 0.05;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = evaluate_vatmart(box, kSlider, GripperModel{}, tray_grasp(), 5, seed, cfg);
        const auto b = evaluate_vatmart(box, kSlider, GripperModel{}, tray_grasp(), 5, seed, cfg);
        EXPECT_EQ(a.fitness, b.fitness);
        EXPECT_EQ(a.s_drop, b.s_drop);
        ASSERT_EQ(a.trajectory->frames.size(), b.trajectory->frames.size());
        for (std::size_t k = 0; k < a.trajectory->frames.size(); ++k)
            EXPECT_EQ(a.trajectory->frames[k].position, b.trajectory->frames[k].position);
    }
}

TEST(EvaluateVatmart, SliderFixtureMatchesScriptOracle)
{
    // Frozen from tests/oracles/vatmart_oracle.py (numpy reimplementation of the sampler and tracker).
    struct Expected {
        std::uint64_t global_seed, genotype_seed;
        double s_drop, fitness;
        std::size_t frames;
    };
    const Expected strict[] = {
        {0, 11, 0.007779281456882309, 0.038896407284411544, 3},
        {1, 22, 0.0, 0.0, 2},
        {2, 33, 0.0, 0.0, 2},
        {3, 44, 0.002180460430020764, 0.01090230215010382, 3},
        {4, 55, 0.0, 0.0, 2},
    };
    const Expected loose[] = {
        {0, 11, 0.09031540831414281, 0.45157704157071404, 32},
        {1, 22, 0.0, 0.0, 2},
        {2, 33, 0.0, 0.0, 2},
        {3, 44, 0.0, 0.0, 21},
        {4, 55, 0.0, 0.0, 2},
    };
    const auto obj = load_urdf(fixture("slider_drawer.urdf")).object;
    const ActivationTask task{0, 0.0, 0.2, {}};
    const Pose grasp(Vec3(0.24, 0.0, 0.10), from_wxyz({0.5, 0.5, -0.5, -0.5}));
    for (double tolerance : {0.005, 0.05}) {
        InteractionConfig cfg;
        cfg.slip_tolerance = tolerance;
        for (const auto& e : tolerance == 0.005 ? strict : loose) {
            const auto r = evaluate_vatmart(obj, task, GripperModel{}, grasp, e.global_seed, e.genotype_seed, cfg);
            ASSERT_TRUE(r.grasp_success);
            EXPECT_NEAR(r.s_drop, e.s_drop, 1e-9) << e.global_seed;
            EXPECT_NEAR(r.fitness, e.fitness, 1e-9) << e.global_seed;
            EXPECT_EQ(r.trajectory->frames.size(), e.frames) << e.global_seed;
        }
    }
}

TEST(EvalResultProperties, InvariantsOverRandomGenotypes)
{
    const auto box = make_experimental_box();
    const InteractionConfig cfg;
    const GripperModel g;
    Rng rng(31);
    int grasps = 0;
    for (int n = 0; n < 3000; ++n) {
        const ActivationTask& task = n % 2 ? kHinge : kSlider;
        const Aabb v{Vec3(0.0, -0.3, 0.0), Vec3(0.75, 0.4, 0.5)};
        const Pose genotype(Vec3(rng.uniform(v.lower.x(), v.upper.x()), rng.uniform(v.lower.y(), v.upper.y()), rng.uniform(v.lower.z(), v.upper.z())),
            random_unit_quaternion(rng));
        const int primitive = static_cast<int>(rng.index(6));
        const EvalResult results[] = {
            evaluate_adaptive(box, task, g, genotype, cfg),
            evaluate_where2act(box, task, g, genotype, primitive, cfg),
            evaluate_vatmart(box, task, g, genotype, 1, n, cfg),
        };
        for (int space = 0; space < 3; ++space) {
            const auto& r = results[space];
            EXPECT_GE(r.fitness, 0.0);
            EXPECT_LE(r.fitness, 1.0);
            if (!r.grasp_success) {
                EXPECT_EQ(r.fitness, 0.0);
                EXPECT_FALSE(r.trajectory.has_value());
                continue;
            }
            ASSERT_TRUE(r.trajectory.has_value());
            const auto& t = *r.trajectory;
            ASSERT_EQ(t.frames.size(), t.joint_values.size());
            EXPECT_EQ(t.joint_values.front(), task.s_init);
            EXPECT_LT((t.frames.front().position - genotype.position).norm(), 1e-9);
            const double progress = std::clamp((r.s_drop - task.s_init) / (task.s_target - task.s_init), 0.0, 1.0);
            EXPECT_NEAR(r.fitness, progress, 1e-12);
            if (space == 0) {
                EXPECT_EQ(r.fitness == 1.0, r.s_drop == task.s_target);
            }
        }
        grasps += results[0].grasp_success;
    }
    EXPECT_GT(grasps, 20);
}

TEST(EvalResultProperties, AdaptiveFramesFollowThePart)
{
    const auto box = make_experimental_box();
    Rng rng(8);
    int checked = 0;
    for (int n = 0; n < 4000 && checked < 30; ++n) {
        const ActivationTask& task = n % 2 ? kHinge : kSlider;
        const Pose genotype(Vec3(rng.uniform(0.0, 0.75), rng.uniform(-0.3, 0.4), rng.uniform(0.0, 0.5)), random_unit_quaternion(rng));
        const auto r = evaluate_adaptive(box, task, GripperModel{}, genotype, InteractionConfig{});
        if (!r.grasp_success)
            continue;
        ++checked;
        const std::size_t part = moving_part(box, task);
        const auto& t = *r.trajectory;
        const Pose grasp_in_part = compose(invert(box.part_poses_in_object_frame(task_configuration(box, task, t.joint_values[0]))[part]), t.frames[0]);
        for (std::size_t k = 0; k < t.frames.size(); ++k) {
            const Pose expected = compose(box.part_poses_in_object_frame(task_configuration(box, task, t.joint_values[k]))[part], grasp_in_part);
            EXPECT_LT((expected.position - t.frames[k].position).norm(), 1e-9);
            EXPECT_LT(quaternion_distance(expected.orientation, t.frames[k].orientation), 1e-9);
        }
    }
    EXPECT_GE(checked, 30);
}

TEST(EvalResultProperties, AdaptiveDominatesWhere2ActOnReachableGrasps)
{
    const auto box = make_experimental_box();
    Rng rng(12);
    int checked = 0;
    for (int n = 0; n < 6000 && checked < 20; ++n) {
        const ActivationTask& task = n % 2 ? kHinge : kSlider;
        const Pose genotype(Vec3(rng.uniform(0.0, 0.75), rng.uniform(-0.3, 0.4), rng.uniform(0.0, 0.5)), random_unit_quaternion(rng));
        const auto a = evaluate_adaptive(box, task, GripperModel{}, genotype, InteractionConfig{});
        if (a.fitness != 1.0)
            continue;
        ++checked;
        for (int p = 0; p < 6; ++p)
            EXPECT_LE(evaluate_where2act(box, task, GripperModel{}, genotype, p, InteractionConfig{}).fitness, a.fitness);
    }
    EXPECT_GE(checked, 20);
}

TEST(ActionSpaceNames, RoundTrip)
{
    for (auto s : {ActionSpace::adaptive, ActionSpace::where2act, ActionSpace::vatmart})
        EXPECT_EQ(action_space_from_string(to_string(s)), s);
    EXPECT_THROW(action_space_from_string("teleport"), Error);
}

TEST(ValidateInteraction, RejectsBadBounds)
{
    EXPECT_NO_THROW(validate_interaction(InteractionConfig{}));
    InteractionConfig c;
    c.n_steps = 1;
    EXPECT_THROW(validate_interaction(c), Error);
    c = InteractionConfig{};
    c.workspace_radius = 0.0;
    EXPECT_THROW(validate_interaction(c), Error);
    c = InteractionConfig{};
    c.workspace_center = Vec3(NAN, 0, 0);
    EXPECT_THROW(validate_interaction(c), Error);
}
