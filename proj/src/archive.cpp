#include "json_util.hpp"
#include "qdtraj/qd_engine.hpp"

#include <algorithm>
#include <cstdio>

namespace qdtraj {

std::string trajectory_rows_json(const TrajectoryPrimitive& trajectory)
{
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < trajectory.frames.size(); ++k) {
        const Pose& f = trajectory.frames[k];
        const auto q = to_wxyz(canonical(f.orientation));
        rows.push_back({f.position.x(), f.position.y(), f.position.z(), q[0], q[1], q[2], q[3], trajectory.joint_values[k]});
    }
    return rows.dump();
}

std::string content_hash(std::string_view text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Archive::Archive(double cell_size) : _cell_size(cell_size)
{
    if (!(cell_size > 0.0))
        throw Error(ErrorCode::invalid_argument, "archive cell size must be positive");
}

std::string Archive::store(const TrajectoryPrimitive& trajectory)
{
    std::string text = trajectory_rows_json(trajectory);
    std::string ref = content_hash(text);
    auto [it, inserted] = _store.try_emplace(ref);
    if (inserted) {
        it->second.trajectory = trajectory;
        it->second.text = std::move(text);
    }
    ++it->second.references;
    return ref;
}

void Archive::release(const std::string& ref)
{
    if (ref.empty())
        return;
    auto it = _store.find(ref);
    if (it != _store.end() && --it->second.references <= 0)
        _store.erase(it);
}

InsertStats Archive::insert_batch(std::span<const std::pair<Genotype, EvalResult>> results)
{
    InsertStats stats;
    for (const auto& [genotype, result] : results) {
        auto it = _cells.find(result.descriptor);
        if (it != _cells.end()) {
            const ArchiveCell& incumbent = it->second;
            const bool wins = result.fitness > incumbent.fitness
                || (result.fitness == incumbent.fitness && result.grasp_success && !incumbent.grasp_success);
            if (!wins) {
                ++stats.rejections;
                continue;
            }
            release(incumbent.trajectory_ref);
            ++stats.improvements;
        }
        else {
            ++stats.new_cells;
        }
        ArchiveCell cell{result.descriptor, genotype, result.fitness, result.grasp_success, {}};
        if (result.trajectory)
            cell.trajectory_ref = store(*result.trajectory);
        _cells.insert_or_assign(result.descriptor, std::move(cell));
    }
    return stats;
}

const TrajectoryPrimitive* Archive::trajectory(const std::string& ref) const
{
    auto it = _store.find(ref);
    return it == _store.end() ? nullptr : &it->second.trajectory;
}

const std::string* Archive::trajectory_text(const std::string& ref) const
{
    auto it = _store.find(ref);
    return it == _store.end() ? nullptr : &it->second.text;
}

void Archive::restore(ArchiveCell cell, std::optional<std::pair<std::string, TrajectoryPrimitive>> trajectory)
{
    if (trajectory) {
        auto& slot = _store[trajectory->first];
        if (slot.references == 0) {
            slot.text = trajectory_rows_json(trajectory->second);
            slot.trajectory = std::move(trajectory->second);
        }
        ++slot.references;
    }
    _cells.insert_or_assign(cell.key, std::move(cell));
}

GenerationMetrics Archive::metrics(int generation, double success_threshold) const
{
    GenerationMetrics m;
    m.generation = generation;
    m.occupied = _cells.size();
    double sum = 0.0;
    for (const auto& [key, cell] : _cells) {
        if (cell.grasp_success)
            ++m.grasps;
        if (cell.grasp_success && cell.fitness >= success_threshold)
            ++m.trajectories;
        m.best_fitness = std::max(m.best_fitness, cell.fitness);
        sum += cell.fitness;
    }
    m.mean_fitness = _cells.empty() ? 0.0 : sum / static_cast<double>(_cells.size());
    return m;
}

} // namespace qdtraj
