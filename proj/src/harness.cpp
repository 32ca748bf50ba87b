#include "qdtraj/harness.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <numbers>

namespace qdtraj {

namespace fs = std::filesystem;
using nlohmann::json;

ExitCode exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_task:
    case ErrorCode::out_of_limits:
        return ExitCode::invalid_task;
    case ErrorCode::unsupported_joint:
    case ErrorCode::unsupported_geometry:
    case ErrorCode::missing_geometry:
    case ErrorCode::malformed_tree:
    case ErrorCode::missing_limits:
        return ExitCode::object_source;
    case ErrorCode::io_failure:
        return ExitCode::output_dir;
    case ErrorCode::grid_too_large:
        return ExitCode::grid_too_large;
    case ErrorCode::invalid_argument:
    case ErrorCode::non_finite:
    case ErrorCode::malformed_document:
    case ErrorCode::degenerate_volume:
        return ExitCode::configuration;
    }
    return ExitCode::internal;
}

namespace {

void check_keys(const json& doc, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    if (!doc.is_object())
        throw Error(ErrorCode::malformed_document, std::string(where) + " must be a JSON object");
    for (const auto& item : doc.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw Error(ErrorCode::malformed_document, "unknown key '" + item.key() + "' in " + std::string(where));
    }
}

template <typename T>
void read(const json& doc, const char* key, T& out)
{
    if (auto it = doc.find(key); it != doc.end())
        out = it->get<T>();
}

double deg(double degrees) { return degrees * std::numbers::pi / 180.0; }

void apply_qd(const json& doc, QdConfig& qd)
{
    check_keys(doc,
        {"population_size", "generations", "sigma_pos", "theta_max", "init_margin", "elite_fraction", "clone_count", "grasp_strategy",
            "action_space", "success_threshold", "cell_size", "gene_mutation_rate", "seed_mutation_rate", "random_half_source", "workers"},
        "qd");
    read(doc, "population_size", qd.population_size);
    read(doc, "generations", qd.generations);
    read(doc, "sigma_pos", qd.sigma_pos);
    read(doc, "theta_max", qd.theta_max);
    read(doc, "init_margin", qd.init_margin);
    read(doc, "elite_fraction", qd.elite_fraction);
    read(doc, "clone_count", qd.clone_count);
    read(doc, "success_threshold", qd.success_threshold);
    read(doc, "cell_size", qd.cell_size);
    read(doc, "gene_mutation_rate", qd.gene_mutation_rate);
    read(doc, "seed_mutation_rate", qd.seed_mutation_rate);
    read(doc, "workers", qd.workers);
    if (doc.contains("grasp_strategy"))
        qd.grasp_strategy = grasp_strategy_from_string(doc["grasp_strategy"].get<std::string>());
    if (doc.contains("action_space"))
        qd.action_space = action_space_from_string(doc["action_space"].get<std::string>());
    if (doc.contains("random_half_source")) {
        const auto name = doc["random_half_source"].get<std::string>();
        if (name == "archive")
            qd.random_half_source = RandomHalfSource::archive;
        else if (name == "fresh")
            qd.random_half_source = RandomHalfSource::fresh;
        else
            throw Error(ErrorCode::invalid_argument, "random_half_source must be 'archive' or 'fresh'");
    }
}

void apply_interaction(const json& doc, InteractionConfig& ic)
{
    check_keys(doc,
        {"n_steps", "workspace_center", "workspace_radius", "slip_tolerance", "primitive_stroke", "primitive_frame", "vatmart_waypoints",
            "vatmart_translation_bound", "vatmart_rotation_bound"},
        "interaction");
    read(doc, "n_steps", ic.n_steps);
    if (doc.contains("workspace_center"))
        ic.workspace_center = detail::vec3_from_json(doc["workspace_center"]);
    read(doc, "workspace_radius", ic.workspace_radius);
    read(doc, "slip_tolerance", ic.slip_tolerance);
    read(doc, "primitive_stroke", ic.primitive_stroke);
    read(doc, "vatmart_waypoints", ic.vatmart_waypoints);
    read(doc, "vatmart_translation_bound", ic.vatmart_translation_bound);
    read(doc, "vatmart_rotation_bound", ic.vatmart_rotation_bound);
    if (doc.contains("primitive_frame")) {
        const auto name = doc["primitive_frame"].get<std::string>();
        if (name == "gripper")
            ic.primitive_frame = PrimitiveFrame::gripper;
        else if (name == "world")
            ic.primitive_frame = PrimitiveFrame::world;
        else
            throw Error(ErrorCode::invalid_argument, "primitive_frame must be 'gripper' or 'world'");
    }
}

void apply_gripper(const json& doc, GripperModel& g)
{
    check_keys(doc, {"aperture_max", "chord_min", "chord_clearance", "body_half_extents", "body_pose", "tcp_offset"}, "gripper");
    read(doc, "aperture_max", g.aperture_max);
    read(doc, "chord_min", g.chord_min);
    read(doc, "chord_clearance", g.chord_clearance);
    if (doc.contains("body_half_extents"))
        g.body_box.half_extents = detail::vec3_from_json(doc["body_half_extents"]);
    if (doc.contains("body_pose"))
        g.body_box.local_pose = detail::pose_from_json(doc["body_pose"]);
    if (doc.contains("tcp_offset"))
        g.tcp_offset = detail::pose_from_json(doc["tcp_offset"]);
}

} // namespace

void apply_config_json(const json& doc, ExperimentSpec& spec)
{
    try {
        check_keys(doc,
            {"object", "joint", "s_init", "s_target", "s_init_deg", "s_target_deg", "other_joint_values", "seeds", "output_dir", "qd",
                "interaction", "gripper"},
            "config");
        if (auto it = doc.find("object"); it != doc.end()) {
            const auto source = it->get<std::string>();
            if (source == "builtin")
                spec.urdf_path.reset();
            else
                spec.urdf_path = source;
        }
        if (auto it = doc.find("joint"); it != doc.end())
            spec.joint = it->is_number_integer() ? std::to_string(it->get<long long>()) : it->get<std::string>();
        read(doc, "s_init", spec.s_init);
        read(doc, "s_target", spec.s_target);
        if (doc.contains("s_init_deg"))
            spec.s_init = deg(doc["s_init_deg"].get<double>());
        if (doc.contains("s_target_deg"))
            spec.s_target = deg(doc["s_target_deg"].get<double>());
        read(doc, "other_joint_values", spec.other_joint_values);
        read(doc, "seeds", spec.seeds);
        if (doc.contains("output_dir"))
            spec.output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("qd"))
            apply_qd(doc["qd"], spec.qd);
        if (doc.contains("interaction"))
            apply_interaction(doc["interaction"], spec.interaction);
        if (doc.contains("gripper"))
            apply_gripper(doc["gripper"], spec.gripper);
    }
    catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_document, std::string("config: ") + e.what());
    }
}

json spec_to_json(const ExperimentSpec& spec)
{
    const auto& q = spec.qd;
    const auto& ic = spec.interaction;
    const auto& g = spec.gripper;
    return {
        {"object", spec.urdf_path ? spec.urdf_path->string() : std::string("builtin")},
        {"joint", spec.joint},
        {"s_init", spec.s_init},
        {"s_target", spec.s_target},
        {"other_joint_values", spec.other_joint_values},
        {"seeds", spec.seeds},
        {"output_dir", spec.output_dir.string()},
        {"qd",
            {{"population_size", q.population_size}, {"generations", q.generations}, {"sigma_pos", q.sigma_pos}, {"theta_max", q.theta_max},
                {"init_margin", q.init_margin}, {"elite_fraction", q.elite_fraction}, {"clone_count", q.clone_count},
                {"grasp_strategy", to_string(q.grasp_strategy)}, {"action_space", to_string(q.action_space)},
                {"success_threshold", q.success_threshold}, {"cell_size", q.cell_size}, {"gene_mutation_rate", q.gene_mutation_rate},
                {"seed_mutation_rate", q.seed_mutation_rate},
                {"random_half_source", q.random_half_source == RandomHalfSource::archive ? "archive" : "fresh"}, {"workers", q.workers}}},
        {"interaction",
            {{"n_steps", ic.n_steps}, {"workspace_center", detail::vec3_to_json(ic.workspace_center)}, {"workspace_radius", ic.workspace_radius},
                {"slip_tolerance", ic.slip_tolerance}, {"primitive_stroke", ic.primitive_stroke},
                {"primitive_frame", ic.primitive_frame == PrimitiveFrame::gripper ? "gripper" : "world"},
                {"vatmart_waypoints", ic.vatmart_waypoints}, {"vatmart_translation_bound", ic.vatmart_translation_bound},
                {"vatmart_rotation_bound", ic.vatmart_rotation_bound}}},
        {"gripper",
            {{"aperture_max", g.aperture_max}, {"chord_min", g.chord_min}, {"chord_clearance", g.chord_clearance},
                {"body_half_extents", detail::vec3_to_json(g.body_box.half_extents)}, {"body_pose", detail::pose_to_json(g.body_box.local_pose)},
                {"tcp_offset", detail::pose_to_json(g.tcp_offset)}}},
    };
}

ArticulatedObject load_object(const ExperimentSpec& spec)
{
    if (!spec.urdf_path)
        return make_experimental_box();
    return load_urdf(spec.urdf_path->string()).object;
}

ActivationTask resolve_task(const ArticulatedObject& object, const ExperimentSpec& spec)
{
    ActivationTask task;
    task.s_init = spec.s_init;
    task.s_target = spec.s_target;
    task.other_joint_values = spec.other_joint_values;

    std::size_t index = 0;
    const auto* first = spec.joint.data();
    const auto* last = first + spec.joint.size();
    if (auto [ptr, ec] = std::from_chars(first, last, index); ec == std::errc() && ptr == last) {
        task.joint_index = index;
    }
    else if (auto found = object.find_movable_joint(spec.joint)) {
        task.joint_index = *found;
    }
    else {
        throw Error(ErrorCode::invalid_task, "no movable joint named '" + spec.joint + "'");
    }
    validate_task(object, task);
    return task;
}

void ensure_writable_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::io_failure, "cannot create directory " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / ".qdtraj_probe";
    {
        std::ofstream out(probe);
        if (!out)
            throw Error(ErrorCode::io_failure, "directory is not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

std::string run_dir_name(GraspStrategy strategy, ActionSpace space, std::uint64_t seed)
{
    return std::string(to_string(strategy)) + "-" + std::string(to_string(space)) + "-" + std::to_string(seed);
}

namespace {

/// Caps the worker count by QDTRAJ_WORKERS when set (0 means hardware default).
int capped_workers(int requested)
{
    int workers = resolve_workers(requested);
    if (const char* env = std::getenv("QDTRAJ_WORKERS")) {
        int cap = 0;
        const std::string_view text(env);
        if (auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap); ec != std::errc() || cap < 0)
            throw Error(ErrorCode::invalid_argument, "QDTRAJ_WORKERS must be a non-negative integer");
        if (cap > 0)
            workers = std::min(workers, cap);
    }
    return workers;
}

} // namespace

std::vector<RunSummary> run_experiment(const ExperimentSpec& spec, std::ostream* log)
{
    if (spec.seeds.empty())
        throw Error(ErrorCode::invalid_argument, "at least one seed is required");
    const auto object = load_object(spec);
    const auto task = resolve_task(object, spec);
    validate_qd(spec.qd);
    validate_interaction(spec.interaction);
    validate_gripper(spec.gripper);
    ensure_writable_dir(spec.output_dir);

    QdConfig qd = spec.qd;
    qd.workers = capped_workers(qd.workers);

    ArchiveMeta meta;
    meta.object = object.name();
    meta.task = task;
    meta.joint_name = object.movable_joint(task.joint_index).name;
    meta.grasp_strategy = qd.grasp_strategy;
    meta.action_space = qd.action_space;
    meta.population_size = qd.population_size;
    meta.generations = qd.generations;
    meta.success_threshold = qd.success_threshold;

    std::vector<RunSummary> out;
    for (std::uint64_t seed : spec.seeds) {
        qd.global_seed = seed;
        meta.global_seed = seed;
        const auto result = run(object, task, spec.gripper, qd, spec.interaction);
        const fs::path dir = spec.output_dir / run_dir_name(qd.grasp_strategy, qd.action_space, seed);
        write_run(dir, result, meta);
        const auto& last = result.metrics.back();
        if (log) {
            *log << run_dir_name(qd.grasp_strategy, qd.action_space, seed) << ": occupied " << last.occupied << ", grasps " << last.grasps
                 << ", trajectories " << last.trajectories << " (" << last.seconds << " s)\n";
        }
        out.push_back({qd.grasp_strategy, qd.action_space, seed, dir, result.metrics});
    }
    return out;
}

} // namespace qdtraj
