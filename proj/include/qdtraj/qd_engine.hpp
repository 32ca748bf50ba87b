#pragma once

#include "qdtraj/interaction.hpp"
#include "qdtraj/random.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdtraj {

/// Starting grasp frame in the object base frame, plus the discrete genes used by the
/// baseline action spaces.
struct Genotype {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();
    int primitive_gene = 0;
    std::uint64_t noise_seed = 0;

    Pose pose() const { return {position, orientation}; }
};

enum class GraspStrategy { explore, success, random };
enum class RandomHalfSource { archive, fresh };

std::string_view to_string(GraspStrategy strategy);
GraspStrategy grasp_strategy_from_string(std::string_view name);

struct QdConfig {
    int population_size = 512;
    int generations = 30;
    double sigma_pos = 0.02;
    double theta_max = 0.26;
    double init_margin = 0.15;
    /// Share of occupied cells forming the elite block. Scaled with population size:
    /// 0.1 at 10000 individuals corresponds to about 0.005 at 512.
    double elite_fraction = 0.005;
    int clone_count = 4;
    GraspStrategy grasp_strategy = GraspStrategy::explore;
    ActionSpace action_space = ActionSpace::adaptive;
    std::uint64_t global_seed = 0;
    double success_threshold = 0.65;
    double cell_size = 0.01;
    double gene_mutation_rate = 0.2;
    double seed_mutation_rate = 0.2;
    RandomHalfSource random_half_source = RandomHalfSource::archive;
    /// Evaluation threads; 0 picks the hardware default.
    int workers = 0;
};

/// Throws ErrorCode::invalid_argument for out-of-range settings.
void validate_qd(const QdConfig& cfg);

struct ArchiveCell {
    CellKey key;
    Genotype elite;
    double fitness = 0.0;
    bool grasp_success = false;
    /// Content hash into the archive's trajectory store; empty when no trajectory exists.
    std::string trajectory_ref;
};

struct GenerationMetrics {
    int generation = 0;
    std::size_t occupied = 0;
    std::size_t grasps = 0;
    std::size_t trajectories = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double seconds = 0.0;
};

struct InsertStats {
    std::size_t new_cells = 0;
    std::size_t improvements = 0;
    std::size_t rejections = 0;
};

/// Canonical JSON rows [x, y, z, qw, qx, qy, qz, s] of a trajectory.
std::string trajectory_rows_json(const TrajectoryPrimitive& trajectory);
/// 16-hex-digit FNV-1a 64 of the canonical rows text.
std::string content_hash(std::string_view text);

/// MAP-Elites grid over the starting position: one elite per cell, trajectories stored
/// out of line keyed by content hash.
class Archive {
public:
    explicit Archive(double cell_size = 0.01);

    double cell_size() const { return _cell_size; }
    const std::map<CellKey, ArchiveCell>& cells() const { return _cells; }
    std::size_t size() const { return _cells.size(); }
    bool empty() const { return _cells.empty(); }

    /// Candidates are processed in order. A candidate wins its cell on strictly higher
    /// fitness, or on equal fitness with a successful grasp against a failed one.
    InsertStats insert_batch(std::span<const std::pair<Genotype, EvalResult>> results);

    const TrajectoryPrimitive* trajectory(const std::string& ref) const;
    /// Canonical rows text by reference, as written to disk.
    const std::string* trajectory_text(const std::string& ref) const;
    std::size_t trajectory_count() const { return _store.size(); }

    GenerationMetrics metrics(int generation, double success_threshold) const;

    std::vector<GenerationMetrics> generation_log;

    /// Restores a cell verbatim (used when loading a persisted archive).
    void restore(ArchiveCell cell, std::optional<std::pair<std::string, TrajectoryPrimitive>> trajectory);

private:
    struct StoredTrajectory {
        TrajectoryPrimitive trajectory;
        std::string text;
        int references = 0;
    };

    std::string store(const TrajectoryPrimitive& trajectory);
    void release(const std::string& ref);

    double _cell_size;
    std::map<CellKey, ArchiveCell> _cells;
    std::map<std::string, StoredTrajectory> _store;
};

/// Axis-aligned box around the task's moving part at s_init, inflated by `margin`, object frame.
Aabb initialization_volume(const ArticulatedObject& object, const ActivationTask& task, double margin);

Genotype random_genotype(const Aabb& volume, Rng& rng);

std::vector<Genotype> initialize_population(const ArticulatedObject& object, const ActivationTask& task, int n,
    const QdConfig& cfg, Rng& rng);

Genotype mutate(const Genotype& parent, const QdConfig& cfg, Rng& rng);

/// Parent selection. `fresh` supplies new random genotypes for cold starts and shortfalls.
std::vector<Genotype> select(const Archive& archive, GraspStrategy strategy, int n, const QdConfig& cfg, Rng& rng,
    const std::function<Genotype(Rng&)>& fresh);

/// Evaluates one genotype under the configured action space.
EvalResult evaluate_genotype(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Genotype& genotype, ActionSpace space, const InteractionConfig& icfg, std::uint64_t global_seed);

/// Resolves a worker request: n > 0 as given, otherwise hardware concurrency.
int resolve_workers(int requested);

/// Evaluates a population in parallel; results keep population order.
std::vector<EvalResult> evaluate_population(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    std::span<const Genotype> population, ActionSpace space, const InteractionConfig& icfg, std::uint64_t global_seed, int workers);

struct RunResult {
    Archive archive;
    std::vector<GenerationMetrics> metrics;
};

/// Called after each generation's insertion with the generation's metrics row.
using GenerationObserver = std::function<void(const GenerationMetrics&, const Archive&)>;

/// Generation 0 evaluates an initial population; each further generation selects,
/// mutates, evaluates and inserts. Insertion order is population order, so the archive
/// does not depend on the worker count.
RunResult run(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper, const QdConfig& qd,
    const InteractionConfig& interaction, const GenerationObserver& observer = {});

} // namespace qdtraj
