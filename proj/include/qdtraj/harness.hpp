#pragma once

#include "qdtraj/error.hpp"
#include "qdtraj/qd_engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qdtraj {

/// Process exit codes of the command-line tool.
enum class ExitCode : int {
    ok = 0,
    internal = 1,
    configuration = 2,
    object_source = 3,
    invalid_task = 4,
    output_dir = 5,
    grid_too_large = 6,
};

ExitCode exit_code_for(ErrorCode code);

inline constexpr int kArchiveSchemaVersion = 1;
inline constexpr const char* kMetricsHeader = "generation,occupied,grasps,trajectories,best_fitness,mean_fitness,seconds";

/// Everything a run or a matrix needs. Task joint may be given by index or name; it is
/// resolved against the loaded object by `resolve_task`.
struct ExperimentSpec {
    std::optional<std::filesystem::path> urdf_path; ///< empty selects the builtin experimental box
    std::string joint = "0";
    double s_init = 0.0;
    double s_target = 0.0;
    std::vector<double> other_joint_values;
    QdConfig qd;
    InteractionConfig interaction;
    GripperModel gripper;
    std::vector<std::uint64_t> seeds{0};
    std::filesystem::path output_dir = "qdtraj_out";
};

/// Reads an ExperimentSpec JSON document into `spec`. Only keys present in the document
/// are touched; unknown keys throw ErrorCode::malformed_document.
void apply_config_json(const nlohmann::json& doc, ExperimentSpec& spec);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

/// Throws ErrorCode::io_failure or parse errors for a bad URDF.
ArticulatedObject load_object(const ExperimentSpec& spec);
/// Maps the joint field onto a movable joint; throws ErrorCode::invalid_task.
ActivationTask resolve_task(const ArticulatedObject& object, const ExperimentSpec& spec);

/// Throws ErrorCode::io_failure when `dir` cannot be created or written.
void ensure_writable_dir(const std::filesystem::path& dir);

std::string run_dir_name(GraspStrategy strategy, ActionSpace space, std::uint64_t seed);

struct ArchiveMeta {
    std::string object;
    ActivationTask task;
    std::string joint_name;
    GraspStrategy grasp_strategy = GraspStrategy::explore;
    ActionSpace action_space = ActionSpace::adaptive;
    std::uint64_t global_seed = 0;
    int population_size = 0;
    int generations = 0;
    double success_threshold = 0.65;
};

struct LoadedArchive {
    ArchiveMeta meta;
    Archive archive;
};

/// Deterministic archive.json text: cells sorted by key, quaternions canonical, no timings.
std::string archive_to_json_text(const Archive& archive, const ArchiveMeta& meta);
/// Parses archive.json text. Trajectories are looked up in `trajectory_dir` when given.
LoadedArchive archive_from_json_text(const std::string& text, const std::optional<std::filesystem::path>& trajectory_dir = std::nullopt);
TrajectoryPrimitive trajectory_from_json_text(const std::string& text);

void write_metrics_csv(std::ostream& out, const std::vector<GenerationMetrics>& metrics);
/// Writes archive.json, metrics.csv and trajectories/<hash>.json under `dir`.
void write_run(const std::filesystem::path& dir, const RunResult& result, const ArchiveMeta& meta);

struct RunSummary {
    GraspStrategy grasp_strategy;
    ActionSpace action_space;
    std::uint64_t seed;
    std::filesystem::path dir;
    std::vector<GenerationMetrics> metrics;
};

/// One run per seed under the experiment's strategy and action space.
std::vector<RunSummary> run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
/// Sample standard deviation; 0 for fewer than two values.
MeanStd mean_std(const std::vector<double>& values);

struct MatrixEntry {
    GraspStrategy grasp_strategy;
    ActionSpace action_space;
    std::vector<std::uint64_t> seeds;
    std::vector<double> grasps;
    std::vector<double> trajectories;
    std::optional<std::string> error;
};

struct MatrixReport {
    std::string object;
    std::string joint;
    double s_init = 0.0;
    double s_target = 0.0;
    int population_size = 0;
    int generations = 0;
    std::vector<MatrixEntry> entries;
};

nlohmann::json matrix_report_json(const MatrixReport& report);
/// Aligned text table: rows are grasp strategies, column pairs are action spaces.
std::string matrix_table(const MatrixReport& report);

/// All nine strategy x action-space combinations over every seed. A failing combination
/// is recorded and skipped. Writes run directories, matrix_report.json, matrix_table.txt
/// and fill_curves.csv.
MatrixReport run_matrix(const ExperimentSpec& spec, std::ostream* log = nullptr);

enum class OrientationSet { rotations24, axis6 };
std::string_view to_string(OrientationSet set);
OrientationSet orientation_set_from_string(std::string_view name);
/// The 24 proper rotations of the cube, or the 6 orientations pointing the approach axis
/// along +-x, +-y, +-z.
std::vector<Quat> orientation_set(OrientationSet set);

struct OracleGridReport {
    double grid_step = 0.0;
    double cell_size = 0.0;
    OrientationSet orientations = OrientationSet::rotations24;
    Aabb volume;
    std::uint64_t evaluations = 0;
    std::vector<CellKey> cells; ///< sorted, unique
};

inline constexpr std::uint64_t kMaxOracleEvaluations = 10'000'000;

std::uint64_t oracle_grid_size(const Aabb& volume, double grid_step, OrientationSet set);
/// Exhaustive grasp test over a regular grid covering `volume`; throws
/// ErrorCode::grid_too_large above kMaxOracleEvaluations. `reverse_order` walks the grid
/// backwards, which must not change the result.
OracleGridReport oracle_grid(const ArticulatedObject& object, const ActivationTask& task, const GripperModel& gripper,
    const Aabb& volume, double grid_step, double cell_size, OrientationSet set, bool reverse_order = false);
nlohmann::json oracle_report_json(const OracleGridReport& report);

} // namespace qdtraj
