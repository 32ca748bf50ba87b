#include "qdtraj/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>

using namespace qdtraj;

namespace {

struct Flags {
    std::string config;
    std::string object;
    bool builtin_box = false;
    std::string task;
    std::string joint;
    double s_init = 0.0;
    double s_target = 0.0;
    double s_init_deg = 0.0;
    double s_target_deg = 0.0;
    std::string strategy;
    std::string action_space;
    int generations = 0;
    int pop = 0;
    std::vector<std::uint64_t> seeds;
    std::string out;
    double cell_size = 0.0;
    double threshold = 0.0;
    int workers = 0;
};

/// Failure with a process exit code attached.
struct Exit {
    ExitCode code;
    std::string message;
};

void add_common(CLI::App* cmd, Flags& f, std::map<std::string, CLI::Option*>& opts)
{
    opts["config"] = cmd->add_option("--config", f.config, "JSON config file; command-line flags take precedence");
    opts["object"] = cmd->add_option("--object", f.object, "URDF file of the articulated object");
    opts["builtin-box"] = cmd->add_flag("--builtin-box", f.builtin_box, "Use the builtin experimental box");
    opts["task"] = cmd->add_option("--task", f.task, "Builtin box task preset")->check(CLI::IsMember({"hinge", "slider"}));
    opts["joint"] = cmd->add_option("--joint", f.joint, "Task joint, movable-joint index or name");
    opts["s-init"] = cmd->add_option("--s-init", f.s_init, "Initial joint value (rad or m)");
    opts["s-target"] = cmd->add_option("--s-target", f.s_target, "Target joint value (rad or m)");
    opts["s-init-deg"] = cmd->add_option("--s-init-deg", f.s_init_deg, "Initial joint value in degrees")->excludes(opts["s-init"]);
    opts["s-target-deg"] = cmd->add_option("--s-target-deg", f.s_target_deg, "Target joint value in degrees")->excludes(opts["s-target"]);
    opts["generations"] = cmd->add_option("--generations", f.generations, "Number of generations after generation 0");
    opts["pop"] = cmd->add_option("--pop", f.pop, "Population size");
    opts["seed"] = cmd->add_option("--seed,--seeds", f.seeds, "Global seed(s)")->delimiter(',');
    opts["out"] = cmd->add_option("--out", f.out, "Output directory");
    opts["cell-size"] = cmd->add_option("--cell-size", f.cell_size, "Archive cell size in meters");
    opts["threshold"] = cmd->add_option("--threshold", f.threshold, "Success threshold on fitness");
    opts["workers"] = cmd->add_option("--workers", f.workers, "Evaluation threads (0 = hardware default)");
    opts["object"]->excludes(opts["builtin-box"]);
}

ExperimentSpec build_spec(const Flags& f, std::map<std::string, CLI::Option*>& opts)
{
    auto set = [&](const char* name) { return opts.count(name) && opts[name]->count() > 0; };
    ExperimentSpec spec;
    try {
        if (set("config")) {
            std::ifstream in(f.config);
            if (!in)
                throw Exit{ExitCode::configuration, "cannot read config file " + f.config};
            nlohmann::json doc;
            try {
                in >> doc;
            }
            catch (const nlohmann::json::exception& e) {
                throw Exit{ExitCode::configuration, "config file " + f.config + ": " + e.what()};
            }
            apply_config_json(doc, spec);
        }
        if (set("object"))
            spec.urdf_path = f.object;
        if (set("builtin-box"))
            spec.urdf_path.reset();
        if (set("task")) {
            if (spec.urdf_path)
                throw Exit{ExitCode::configuration, "--task presets apply to the builtin box only"};
            spec.joint = f.task == "hinge" ? "hinge0" : "slider0";
            spec.s_init = f.task == "hinge" ? std::numbers::pi / 2 : 0.0;
            spec.s_target = f.task == "hinge" ? 0.0 : 0.2;
        }
        if (set("joint"))
            spec.joint = f.joint;
        if (set("s-init"))
            spec.s_init = f.s_init;
        if (set("s-target"))
            spec.s_target = f.s_target;
        if (set("s-init-deg"))
            spec.s_init = f.s_init_deg * std::numbers::pi / 180.0;
        if (set("s-target-deg"))
            spec.s_target = f.s_target_deg * std::numbers::pi / 180.0;
        if (set("strategy"))
            spec.qd.grasp_strategy = grasp_strategy_from_string(f.strategy);
        if (set("action-space"))
            spec.qd.action_space = action_space_from_string(f.action_space);
        if (set("generations"))
            spec.qd.generations = f.generations;
        if (set("pop"))
            spec.qd.population_size = f.pop;
        if (set("seed"))
            spec.seeds = f.seeds;
        if (set("out"))
            spec.output_dir = f.out;
        if (set("cell-size"))
            spec.qd.cell_size = f.cell_size;
        if (set("threshold"))
            spec.qd.success_threshold = f.threshold;
        if (set("workers"))
            spec.qd.workers = f.workers;

        if (spec.seeds.empty())
            throw Error(ErrorCode::invalid_argument, "at least one seed is required");
        validate_qd(spec.qd);
        validate_interaction(spec.interaction);
        validate_gripper(spec.gripper);
    }
    catch (const Error& e) {
        throw Exit{ExitCode::configuration, e.what()};
    }
    return spec;
}

/// Loads the object and resolves the task without touching the filesystem for output.
std::pair<ArticulatedObject, ActivationTask> preflight(const ExperimentSpec& spec)
{
    std::optional<ArticulatedObject> object;
    try {
        object = load_object(spec);
    }
    catch (const Error& e) {
        throw Exit{ExitCode::object_source, e.what()};
    }
    try {
        return {*object, resolve_task(*object, spec)};
    }
    catch (const Error& e) {
        throw Exit{ExitCode::invalid_task, e.what()};
    }
}

void prepare_output(const ExperimentSpec& spec)
{
    try {
        ensure_writable_dir(spec.output_dir);
    }
    catch (const Error& e) {
        throw Exit{ExitCode::output_dir, e.what()};
    }
}

int fail(const Exit& e)
{
    std::cerr << "qdtraj: " << e.message << '\n';
    return static_cast<int>(e.code);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quality-diversity trajectory generation for articulated objects"};
    app.require_subcommand(1);

    Flags run_flags, matrix_flags, oracle_flags;
    std::map<std::string, CLI::Option*> run_opts, matrix_opts, oracle_opts;

    auto* run_cmd = app.add_subcommand("run", "One run per seed for a single strategy and action space");
    add_common(run_cmd, run_flags, run_opts);
    run_opts["strategy"] = run_cmd->add_option("--strategy", run_flags.strategy, "explore | success | random");
    run_opts["action-space"] = run_cmd->add_option("--action-space", run_flags.action_space, "adaptive | where2act | vatmart");

    auto* matrix_cmd = app.add_subcommand("matrix", "All strategy x action-space combinations over every seed");
    add_common(matrix_cmd, matrix_flags, matrix_opts);

    double grid_step = 0.02;
    std::string orientations = "24-rotations";
    double margin = -1.0;
    auto* oracle_cmd = app.add_subcommand("oracle-grid", "Exhaustive grasp check on a regular pose grid");
    add_common(oracle_cmd, oracle_flags, oracle_opts);
    oracle_cmd->add_option("--grid-step", grid_step, "Grid spacing in meters");
    oracle_cmd->add_option("--orientations", orientations, "24-rotations | axis-aligned-6")
        ->check(CLI::IsMember({"24-rotations", "axis-aligned-6"}));
    oracle_cmd->add_option("--margin", margin, "Volume inflation around the moving part (defaults to the init margin)");

    std::string export_urdf, export_out;
    auto* export_cmd = app.add_subcommand("export-object", "Convert a URDF (or the builtin box) to the JSON object model");
    export_cmd->add_option("--object", export_urdf, "URDF file; omit for the builtin box");
    export_cmd->add_option("--out", export_out, "Output JSON file; omit for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto spec = build_spec(run_flags, run_opts);
            preflight(spec);
            prepare_output(spec);
            run_experiment(spec, &std::cout);
            return 0;
        }
        if (matrix_cmd->parsed()) {
            const auto spec = build_spec(matrix_flags, matrix_opts);
            preflight(spec);
            prepare_output(spec);
            const auto report = run_matrix(spec, &std::cout);
            std::cout << '\n' << matrix_table(report);
            for (const auto& e : report.entries)
                if (e.error)
                    return static_cast<int>(ExitCode::internal);
            return 0;
        }
        if (oracle_cmd->parsed()) {
            const auto spec = build_spec(oracle_flags, oracle_opts);
            const auto [object, task] = preflight(spec);
            const Aabb volume = initialization_volume(object, task, margin >= 0.0 ? margin : spec.qd.init_margin);
            OracleGridReport report;
            try {
                report = oracle_grid(object, task, spec.gripper, volume, grid_step, spec.qd.cell_size, orientation_set_from_string(orientations));
            }
            catch (const Error& e) {
                throw Exit{e.code() == ErrorCode::grid_too_large ? ExitCode::grid_too_large : ExitCode::configuration, e.what()};
            }
            prepare_output(spec);
            std::ofstream out(spec.output_dir / "oracle_cells.json");
            out << oracle_report_json(report).dump(1) << '\n';
            if (!out)
                throw Exit{ExitCode::output_dir, "cannot write oracle_cells.json"};
            std::cout << report.evaluations << " grasp evaluations, " << report.cells.size() << " oracle cells\n";
            return 0;
        }
        if (export_cmd->parsed()) {
            ExperimentSpec spec;
            if (!export_urdf.empty())
                spec.urdf_path = export_urdf;
            std::optional<ArticulatedObject> object;
            try {
                object = load_object(spec);
            }
            catch (const Error& e) {
                throw Exit{ExitCode::object_source, e.what()};
            }
            const std::string text = object_to_json(*object).dump(2) + "\n";
            if (export_out.empty()) {
                std::cout << text;
            }
            else {
                std::ofstream out(export_out);
                out << text;
                if (!out)
                    throw Exit{ExitCode::output_dir, "cannot write " + export_out};
            }
            return 0;
        }
    }
    catch (const Exit& e) {
        return fail(e);
    }
    catch (const Error& e) {
        return fail({exit_code_for(e.code()), e.what()});
    }
    catch (const std::exception& e) {
        return fail({ExitCode::internal, e.what()});
    }
    return 0;
}
