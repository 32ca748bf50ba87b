#include "qdtraj/error.hpp"
#include "qdtraj/qd_engine.hpp"

#include <atomic>
#include <chrono>
#include <thread>

namespace qdtraj {

EvalResult evaluate_genotype(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Genotype& genotype, ActionSpace space, const InteractionConfig& icfg, std::uint64_t global_seed)
{
    switch (space) {
    case ActionSpace::adaptive: return evaluate_adaptive(object, task, gripper, genotype.pose(), icfg);
    case ActionSpace::where2act: return evaluate_where2act(object, task, gripper, genotype.pose(), genotype.primitive_gene, icfg);
    case ActionSpace::vatmart: return evaluate_vatmart(object, task, gripper, genotype.pose(), global_seed, genotype.noise_seed, icfg);
    }
    throw Error(ErrorCode::invalid_argument, "unknown action space");
}

int resolve_workers(int requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<EvalResult> evaluate_population(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    std::span<const Genotype> population, ActionSpace space, const InteractionConfig& icfg, std::uint64_t global_seed, int workers)
{
    std::vector<EvalResult> results(population.size());
    auto evaluate_one = [&](std::size_t i) {
        try {
            results[i] = evaluate_genotype(object, task, gripper, population[i], space, icfg, global_seed);
        }
        catch (const Error&) {
            // A genotype the surrogate cannot evaluate counts as a failed grasp.
            results[i] = EvalResult{};
            results[i].descriptor = bin_descriptor(population[i].position, icfg.cell_size);
            results[i].s_drop = task.s_init;
        }
    };

    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(resolve_workers(workers)), population.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < population.size(); ++i)
            evaluate_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < population.size(); i = next++)
                    evaluate_one(i);
            });
        }
    }
    return results;
}

RunResult run(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper, const QdConfig& qd,
    const InteractionConfig& interaction, const GenerationObserver& observer)
{
    validate_qd(qd);
    validate_interaction(interaction);
    validate_gripper(gripper);
    validate_task(object, task);

    InteractionConfig icfg = interaction;
    icfg.cell_size = qd.cell_size;

    const auto start = std::chrono::steady_clock::now();
    Rng rng(qd.global_seed);
    const Aabb volume = initialization_volume(object, task, qd.init_margin);
    const auto fresh = [&volume](Rng& r) { return random_genotype(volume, r); };

    RunResult out{Archive(qd.cell_size), {}};
    std::vector<Genotype> population = initialize_population(object, task, qd.population_size, qd, rng);
    for (int gen = 0; gen <= qd.generations; ++gen) {
        if (gen > 0) {
            population = select(out.archive, qd.grasp_strategy, qd.population_size, qd, rng, fresh);
            if (qd.grasp_strategy != GraspStrategy::random) {
                for (auto& g : population)
                    g = mutate(g, qd, rng);
            }
        }
        auto results = evaluate_population(object, task, gripper, population, qd.action_space, icfg, qd.global_seed, qd.workers);

        std::vector<std::pair<Genotype, EvalResult>> batch;
        batch.reserve(population.size());
        for (std::size_t i = 0; i < population.size(); ++i)
            batch.emplace_back(population[i], std::move(results[i]));
        out.archive.insert_batch(batch);

        GenerationMetrics m = out.archive.metrics(gen, qd.success_threshold);
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.metrics.push_back(m);
        if (observer)
            observer(m, out.archive);
    }
    out.archive.generation_log = out.metrics;
    return out;
}

} // namespace qdtraj
