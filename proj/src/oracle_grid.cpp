#include "qdtraj/harness.hpp"

#include "json_util.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <set>

namespace qdtraj {

using nlohmann::json;

std::string_view to_string(OrientationSet set)
{
    return set == OrientationSet::rotations24 ? "24-rotations" : "axis-aligned-6";
}

OrientationSet orientation_set_from_string(std::string_view name)
{
    if (name == "24-rotations")
        return OrientationSet::rotations24;
    if (name == "axis-aligned-6")
        return OrientationSet::axis6;
    throw Error(ErrorCode::invalid_argument, "orientation set must be '24-rotations' or 'axis-aligned-6'");
}

std::vector<Quat> orientation_set(OrientationSet set)
{
    std::vector<Quat> out;
    if (set == OrientationSet::axis6) {
        const double h = std::numbers::pi / 2;
        out.push_back(Quat::Identity());
        out.push_back(axis_angle_rotate(Quat::Identity(), Vec3::UnitX(), std::numbers::pi));
        out.push_back(axis_angle_rotate(Quat::Identity(), Vec3::UnitY(), h));
        out.push_back(axis_angle_rotate(Quat::Identity(), Vec3::UnitY(), -h));
        out.push_back(axis_angle_rotate(Quat::Identity(), Vec3::UnitX(), -h));
        out.push_back(axis_angle_rotate(Quat::Identity(), Vec3::UnitX(), h));
        return out;
    }
    // Signed permutation matrices with determinant +1.
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& p : perms) {
        for (int signs = 0; signs < 8; ++signs) {
            Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
            for (int r = 0; r < 3; ++r)
                m(r, p[r]) = (signs >> r) & 1 ? -1.0 : 1.0;
            if (m.determinant() < 0.0)
                continue;
            out.push_back(canonical(Quat(m).normalized()));
        }
    }
    return out;
}

namespace {

std::int64_t axis_points(double lower, double upper, double step)
{
    return static_cast<std::int64_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
}

} // namespace

std::uint64_t oracle_grid_size(const Aabb& volume, double grid_step, OrientationSet set)
{
    if (!(grid_step > 0.0) || !std::isfinite(grid_step))
        throw Error(ErrorCode::invalid_argument, "grid step must be positive");
    std::uint64_t n = set == OrientationSet::rotations24 ? 24 : 6;
    for (int a = 0; a < 3; ++a) {
        const double span = volume.upper[a] - volume.lower[a];
        if (!(span >= 0.0))
            throw Error(ErrorCode::degenerate_volume, "grid volume has a negative extent");
        const double points = std::floor(span / grid_step + 1e-9) + 1.0;
        if (points * static_cast<double>(n) > 1e18)
            return kMaxOracleEvaluations + 1;
        n *= static_cast<std::uint64_t>(points);
    }
    return n;
}

OracleGridReport oracle_grid(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper, const Aabb& volume,
    double grid_step, double cell_size, OrientationSet set, bool reverse_order)
{
    if (!(grid_step >= cell_size))
        throw Error(ErrorCode::invalid_argument, "grid step must be at least the cell size");
    const std::uint64_t total = oracle_grid_size(volume, grid_step, set);
    if (total > kMaxOracleEvaluations) {
        throw Error(ErrorCode::grid_too_large,
            "oracle grid needs " + std::to_string(total) + " grasp evaluations, limit is " + std::to_string(kMaxOracleEvaluations));
    }
    validate_task(object, task);

    const auto rotations = orientation_set(set);
    const std::int64_t ny = axis_points(volume.lower.y(), volume.upper.y(), grid_step);
    const std::int64_t nz = axis_points(volume.lower.z(), volume.upper.z(), grid_step);
    const auto nr = static_cast<std::int64_t>(rotations.size());
    const auto poses = object.part_poses_in_object_frame(task_configuration(object, task, task.s_init));
    const std::size_t part = moving_part(object, task);

    std::set<CellKey> cells;
    const auto count = static_cast<std::int64_t>(total);
    for (std::int64_t n = 0; n < count; ++n) {
        std::int64_t idx = reverse_order ? count - 1 - n : n;
        const std::int64_t r = idx % nr;
        idx /= nr;
        const std::int64_t iz = idx % nz;
        idx /= nz;
        const std::int64_t iy = idx % ny;
        const std::int64_t ix = idx / ny;
        const Vec3 position = volume.lower + grid_step * Vec3(static_cast<double>(ix), static_cast<double>(iy), static_cast<double>(iz));
        const Pose ee(position, rotations[static_cast<std::size_t>(r)]);
        if (evaluate_grasp(object, poses, gripper, ee, part).success)
            cells.insert(bin_descriptor(position, cell_size));
    }

    OracleGridReport report;
    report.grid_step = grid_step;
    report.cell_size = cell_size;
    report.orientations = set;
    report.volume = volume;
    report.evaluations = total;
    report.cells.assign(cells.begin(), cells.end());
    return report;
}

json oracle_report_json(const OracleGridReport& report)
{
    json cells = json::array();
    for (const auto& c : report.cells)
        cells.push_back({c.i, c.j, c.k});
    return {
        {"schema_version", 1},
        {"grid_step", report.grid_step},
        {"cell_size", report.cell_size},
        {"orientation_set", to_string(report.orientations)},
        {"volume", {{"lower", detail::vec3_to_json(report.volume.lower)}, {"upper", detail::vec3_to_json(report.volume.upper)}}},
        {"evaluations", report.evaluations},
        {"cells", std::move(cells)},
    };
}

} // namespace qdtraj
