#include "qdtraj/error.hpp"
#include "qdtraj/qd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qdtraj {

std::string_view to_string(GraspStrategy strategy)
{
    switch (strategy) {
    case GraspStrategy::explore: return "explore";
    case GraspStrategy::success: return "success";
    case GraspStrategy::random: return "random";
    }
    return "explore";
}

GraspStrategy grasp_strategy_from_string(std::string_view name)
{
    if (name == "explore")
        return GraspStrategy::explore;
    if (name == "success")
        return GraspStrategy::success;
    if (name == "random")
        return GraspStrategy::random;
    throw Error(ErrorCode::invalid_argument, "unknown grasp strategy '" + std::string(name) + "'");
}

void validate_qd(const QdConfig& cfg)
{
    auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_argument, what); };
    if (cfg.population_size < 2)
        fail("population_size must be >= 2");
    if (cfg.generations < 0)
        fail("generations must be >= 0");
    if (!(cfg.elite_fraction > 0.0 && cfg.elite_fraction <= 1.0))
        fail("elite_fraction must be in (0, 1]");
    if (!(cfg.success_threshold > 0.0 && cfg.success_threshold <= 1.0))
        fail("success_threshold must be in (0, 1]");
    if (!(cfg.sigma_pos >= 0.0) || !(cfg.theta_max >= 0.0) || !(cfg.init_margin >= 0.0))
        fail("mutation bounds and init margin must be non-negative");
    if (cfg.clone_count < 1)
        fail("clone_count must be >= 1");
    if (!(cfg.cell_size > 0.0))
        fail("cell_size must be positive");
    if (!(cfg.gene_mutation_rate >= 0.0 && cfg.gene_mutation_rate <= 1.0) || !(cfg.seed_mutation_rate >= 0.0 && cfg.seed_mutation_rate <= 1.0))
        fail("gene mutation rates must be probabilities");
}

Aabb initialization_volume(const ArticulatedObject& object, const ActivationTask& task, double margin)
{
    const auto poses = object.part_poses_in_object_frame(task_configuration(object, task, task.s_init));
    const std::size_t part = moving_part(object, task);
    Aabb box = part_aabb(object.parts()[part], poses[part]);
    box.lower.array() -= margin;
    box.upper.array() += margin;
    if (!((box.upper - box.lower).array() > 0.0).all())
        throw Error(ErrorCode::degenerate_volume, "initialization volume has zero extent");
    return box;
}

Genotype random_genotype(const Aabb& volume, Rng& rng)
{
    Genotype g;
    for (int axis = 0; axis < 3; ++axis)
        g.position[axis] = rng.uniform(volume.lower[axis], volume.upper[axis]);
    g.orientation = random_unit_quaternion(rng);
    g.primitive_gene = static_cast<int>(rng.index(kPrimitiveDirections.size()));
    g.noise_seed = rng.bits();
    return g;
}

std::vector<Genotype> initialize_population(const ArticulatedObject& object, const ActivationTask& task, int n,
    const QdConfig& cfg, Rng& rng)
{
    if (n < 1)
        throw Error(ErrorCode::invalid_argument, "population size must be >= 1");
    const Aabb volume = initialization_volume(object, task, cfg.init_margin);
    std::vector<Genotype> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(random_genotype(volume, rng));
    return out;
}

Genotype mutate(const Genotype& parent, const QdConfig& cfg, Rng& rng)
{
    Genotype child = parent;
    for (int axis = 0; axis < 3; ++axis)
        child.position[axis] += rng.uniform(-cfg.sigma_pos, cfg.sigma_pos);
    const Vec3 axis = random_unit_vector(rng);
    const double angle = rng.uniform(0.0, cfg.theta_max);
    child.orientation = axis_angle_rotate(parent.orientation, axis, angle);
    if (rng.bernoulli(cfg.gene_mutation_rate))
        child.primitive_gene = static_cast<int>(rng.index(kPrimitiveDirections.size()));
    if (rng.bernoulli(cfg.seed_mutation_rate))
        child.noise_seed = rng.bits();
    return child;
}

namespace {

/// Cells by decreasing (fitness, grasp flag); ties in random order.
std::vector<const ArchiveCell*> rank_cells(const Archive& archive, Rng& rng)
{
    std::vector<const ArchiveCell*> ranked;
    ranked.reserve(archive.size());
    for (const auto& [key, cell] : archive.cells())
        ranked.push_back(&cell);
    for (std::size_t i = ranked.size(); i > 1; --i)
        std::swap(ranked[i - 1], ranked[rng.index(i)]);
    std::stable_sort(ranked.begin(), ranked.end(), [](const ArchiveCell* a, const ArchiveCell* b) {
        if (a->fitness != b->fitness)
            return a->fitness > b->fitness;
        return a->grasp_success && !b->grasp_success;
    });
    return ranked;
}

/// `count` distinct indices from [0, size) by partial Fisher-Yates.
std::vector<std::size_t> sample_without_replacement(std::size_t size, std::size_t count, Rng& rng)
{
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    count = std::min(count, size);
    for (std::size_t i = 0; i < count; ++i)
        std::swap(idx[i], idx[i + rng.index(size - i)]);
    idx.resize(count);
    return idx;
}

} // namespace

std::vector<Genotype> select(const Archive& archive, GraspStrategy strategy, int n, const QdConfig& cfg, Rng& rng,
    const std::function<Genotype(Rng&)>& fresh)
{
    if (n < 1)
        throw Error(ErrorCode::invalid_argument, "selection size must be >= 1");
    std::vector<Genotype> out;
    out.reserve(static_cast<std::size_t>(n));
    const std::size_t total = static_cast<std::size_t>(n);
    if (strategy == GraspStrategy::random || archive.empty()) {
        while (out.size() < total)
            out.push_back(fresh(rng));
        return out;
    }

    const auto ranked = rank_cells(archive, rng);
    const std::size_t elite_n = total / 2;
    const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.elite_fraction * ranked.size())));

    if (strategy == GraspStrategy::explore) {
        // Draw with replacement from a block of top cells, each at most clone_count times;
        // an exhausted block rotates to the next one down the ranking.
        for (std::size_t start = 0; out.size() < elite_n && start < ranked.size(); start += block) {
            const std::size_t end = std::min(start + block, ranked.size());
            std::vector<std::size_t> available(end - start);
            std::iota(available.begin(), available.end(), start);
            std::vector<int> drawn(ranked.size(), 0);
            while (out.size() < elite_n && !available.empty()) {
                const std::size_t slot = rng.index(available.size());
                const std::size_t member = available[slot];
                out.push_back(ranked[member]->elite);
                if (++drawn[member] >= cfg.clone_count) {
                    available[slot] = available.back();
                    available.pop_back();
                }
            }
        }
    }
    else {
        for (std::size_t i : sample_without_replacement(block, elite_n, rng))
            out.push_back(ranked[i]->elite);
    }
    while (out.size() < elite_n)
        out.push_back(fresh(rng));

    const std::size_t random_n = total - elite_n;
    if (cfg.random_half_source == RandomHalfSource::archive) {
        if (strategy == GraspStrategy::explore) {
            for (std::size_t i = 0; i < random_n; ++i)
                out.push_back(ranked[rng.index(ranked.size())]->elite);
        }
        else {
            for (std::size_t i : sample_without_replacement(ranked.size(), random_n, rng))
                out.push_back(ranked[i]->elite);
        }
    }
    while (out.size() < total)
        out.push_back(fresh(rng));
    return out;
}

} // namespace qdtraj
