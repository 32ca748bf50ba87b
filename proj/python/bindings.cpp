#include "qdtraj/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>

namespace py = pybind11;
using namespace qdtraj;
using nlohmann::json;

namespace {

using V3 = std::array<double, 3>;
using Q4 = std::array<double, 4>;

Vec3 vec(const V3& v) { return {v[0], v[1], v[2]}; }
V3 arr(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Pose pose(const V3& position, const Q4& wxyz) { return {vec(position), from_wxyz(wxyz)}; }

ExperimentSpec spec_from(const std::string& config_json)
{
    ExperimentSpec spec;
    apply_config_json(json::parse(config_json), spec);
    return spec;
}

json result_json(const EvalResult& r)
{
    json out = {
        {"grasp_success", r.grasp_success},
        {"s_drop", r.s_drop},
        {"fitness", r.fitness},
        {"descriptor", {r.descriptor.i, r.descriptor.j, r.descriptor.k}},
        {"trajectory", nullptr},
    };
    if (r.trajectory)
        out["trajectory"] = json::parse(trajectory_rows_json(*r.trajectory));
    return out;
}

json metrics_json(const std::vector<GenerationMetrics>& metrics)
{
    json rows = json::array();
    for (const auto& m : metrics) {
        rows.push_back({{"generation", m.generation}, {"occupied", m.occupied}, {"grasps", m.grasps}, {"trajectories", m.trajectories},
            {"best_fitness", m.best_fitness}, {"mean_fitness", m.mean_fitness}, {"seconds", m.seconds}});
    }
    return rows;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Native core of qdtraj. Structured arguments and results cross the boundary as JSON text.";

    py::register_exception<Error>(m, "QdtrajError", PyExc_ValueError);

    m.def("experimental_box", [] { return object_to_json(make_experimental_box()).dump(); });

    m.def("parse_urdf", [](const std::string& xml) {
        auto parsed = parse_urdf(xml);
        return py::make_tuple(object_to_json(parsed.object).dump(), parsed.warnings);
    });

    m.def(
        "part_poses",
        [](const std::string& object_json, const std::vector<double>& joint_values) {
            const auto object = object_from_json(json::parse(object_json));
            std::vector<std::pair<V3, Q4>> out;
            for (const auto& p : object.part_poses(joint_values))
                out.emplace_back(arr(p.position), to_wxyz(canonical(p.orientation)));
            return out;
        },
        py::arg("object_json"), py::arg("joint_values"));

    m.def(
        "segment_box_chord",
        [](const V3& start, const V3& end, const V3& half_extents, const V3& position, const Q4& wxyz) {
            return segment_box_chord(vec(start), vec(end), BoxPrimitive{vec(half_extents), Pose()}, pose(position, wxyz));
        },
        py::arg("start"), py::arg("end"), py::arg("half_extents"), py::arg("box_position"), py::arg("box_orientation"));

    m.def(
        "bin_descriptor",
        [](const V3& position, double cell_size) {
            const auto k = bin_descriptor(vec(position), cell_size);
            return std::array<std::int64_t, 3>{k.i, k.j, k.k};
        },
        py::arg("position"), py::arg("cell_size"));

    m.def("content_hash", [](const std::string& text) { return content_hash(text); });

    m.def(
        "evaluate",
        [](const std::string& config_json, const std::string& object_json, const std::string& action_space, const V3& position,
            const Q4& wxyz, int primitive_gene, std::uint64_t noise_seed, std::uint64_t global_seed) {
            const auto spec = spec_from(config_json);
            const auto object = object_json.empty() ? load_object(spec) : object_from_json(json::parse(object_json));
            const auto task = resolve_task(object, spec);
            Genotype g;
            g.position = vec(position);
            g.orientation = from_wxyz(wxyz);
            g.primitive_gene = primitive_gene;
            g.noise_seed = noise_seed;
            InteractionConfig icfg = spec.interaction;
            icfg.cell_size = spec.qd.cell_size;
            py::gil_scoped_release release;
            const auto r = evaluate_genotype(object, task, spec.gripper, g, action_space_from_string(action_space), icfg, global_seed);
            return result_json(r).dump();
        },
        py::arg("config_json"), py::arg("object_json"), py::arg("action_space"), py::arg("position"), py::arg("orientation"),
        py::arg("primitive_gene") = 0, py::arg("noise_seed") = 0, py::arg("global_seed") = 0);

    m.def(
        "run",
        [](const std::string& config_json, std::uint64_t seed) {
            const auto spec = spec_from(config_json);
            const auto object = load_object(spec);
            const auto task = resolve_task(object, spec);
            QdConfig qd = spec.qd;
            qd.global_seed = seed;
            ArchiveMeta meta{object.name(), task, object.movable_joint(task.joint_index).name, qd.grasp_strategy, qd.action_space, seed,
                qd.population_size, qd.generations, qd.success_threshold};
            std::optional<RunResult> result;
            {
                py::gil_scoped_release release;
                result = run(object, task, spec.gripper, qd, spec.interaction);
            }
            return py::make_tuple(archive_to_json_text(result->archive, meta), metrics_json(result->metrics).dump());
        },
        py::arg("config_json"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto spec = spec_from(config_json);
            std::vector<std::string> dirs;
            py::gil_scoped_release release;
            for (const auto& r : run_experiment(spec))
                dirs.push_back(r.dir.string());
            return dirs;
        },
        py::arg("config_json"));

    m.def(
        "run_matrix",
        [](const std::string& config_json) {
            const auto spec = spec_from(config_json);
            std::optional<MatrixReport> report;
            {
                py::gil_scoped_release release;
                report = run_matrix(spec);
            }
            return matrix_report_json(*report).dump();
        },
        py::arg("config_json"));

    m.def(
        "oracle_grid",
        [](const std::string& config_json, double grid_step, const std::string& orientations, double margin) {
            const auto spec = spec_from(config_json);
            const auto object = load_object(spec);
            const auto task = resolve_task(object, spec);
            const Aabb volume = initialization_volume(object, task, margin >= 0.0 ? margin : spec.qd.init_margin);
            py::gil_scoped_release release;
            const auto report = oracle_grid(object, task, spec.gripper, volume, grid_step, spec.qd.cell_size, orientation_set_from_string(orientations));
            return oracle_report_json(report).dump();
        },
        py::arg("config_json"), py::arg("grid_step") = 0.02, py::arg("orientations") = "24-rotations", py::arg("margin") = -1.0);

    m.def(
        "reserialize_archive",
        [](const std::string& text) {
            const auto loaded = archive_from_json_text(text);
            return archive_to_json_text(loaded.archive, loaded.meta);
        },
        py::arg("text"), "Parses archive.json text and writes it back out.");

    m.def("default_config", [] { return spec_to_json(ExperimentSpec{}).dump(); });
}
