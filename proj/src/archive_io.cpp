#include "qdtraj/harness.hpp"

#include "json_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qdtraj {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double value)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw Error(ErrorCode::io_failure, "cannot write " + path.string());
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::io_failure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string archive_to_json_text(const Archive& archive, const ArchiveMeta& meta)
{
    json cells = json::array();
    for (const auto& [key, cell] : archive.cells()) {
        const auto& g = cell.elite;
        cells.push_back({
            {"key", {key.i, key.j, key.k}},
            {"genotype",
                {{"position", detail::vec3_to_json(g.position)}, {"orientation", detail::quat_to_json(g.orientation)},
                    {"primitive_gene", g.primitive_gene}, {"noise_seed", g.noise_seed}}},
            {"fitness", cell.fitness},
            {"grasp_success", cell.grasp_success},
            {"trajectory", cell.trajectory_ref.empty() ? json(nullptr) : json(cell.trajectory_ref)},
        });
    }
    json doc = {
        {"schema_version", kArchiveSchemaVersion},
        {"object", meta.object},
        {"task",
            {{"joint_index", meta.task.joint_index}, {"joint", meta.joint_name}, {"s_init", meta.task.s_init}, {"s_target", meta.task.s_target},
                {"other_joint_values", meta.task.other_joint_values}}},
        {"run",
            {{"grasp_strategy", to_string(meta.grasp_strategy)}, {"action_space", to_string(meta.action_space)},
                {"global_seed", meta.global_seed}, {"population_size", meta.population_size}, {"generations", meta.generations},
                {"success_threshold", meta.success_threshold}}},
        {"cell_size", archive.cell_size()},
        {"cells", std::move(cells)},
    };
    return doc.dump(1) + "\n";
}

TrajectoryPrimitive trajectory_from_json_text(const std::string& text)
{
    TrajectoryPrimitive traj;
    try {
        const json rows = json::parse(text);
        if (!rows.is_array() || rows.empty())
            throw Error(ErrorCode::malformed_document, "trajectory must be a non-empty array of rows");
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != 8)
                throw Error(ErrorCode::malformed_document, "trajectory rows must have 8 entries [x,y,z,qw,qx,qy,qz,s]");
            const Vec3 p(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
            const Quat q = from_wxyz({row[3].get<double>(), row[4].get<double>(), row[5].get<double>(), row[6].get<double>()});
            traj.frames.emplace_back(p, q);
            traj.joint_values.push_back(row[7].get<double>());
        }
    }
    catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_document, std::string("trajectory: ") + e.what());
    }
    return traj;
}

LoadedArchive archive_from_json_text(const std::string& text, const std::optional<fs::path>& trajectory_dir)
{
    try {
        const json doc = json::parse(text);
        if (doc.at("schema_version").get<int>() != kArchiveSchemaVersion)
            throw Error(ErrorCode::malformed_document, "unsupported archive schema_version");

        LoadedArchive out{{}, Archive(doc.at("cell_size").get<double>())};
        auto& meta = out.meta;
        meta.object = doc.at("object").get<std::string>();
        const auto& task = doc.at("task");
        meta.task.joint_index = task.at("joint_index").get<std::size_t>();
        meta.joint_name = task.at("joint").get<std::string>();
        meta.task.s_init = task.at("s_init").get<double>();
        meta.task.s_target = task.at("s_target").get<double>();
        meta.task.other_joint_values = task.at("other_joint_values").get<JointValues>();
        const auto& run = doc.at("run");
        meta.grasp_strategy = grasp_strategy_from_string(run.at("grasp_strategy").get<std::string>());
        meta.action_space = action_space_from_string(run.at("action_space").get<std::string>());
        meta.global_seed = run.at("global_seed").get<std::uint64_t>();
        meta.population_size = run.at("population_size").get<int>();
        meta.generations = run.at("generations").get<int>();
        meta.success_threshold = run.at("success_threshold").get<double>();

        for (const auto& c : doc.at("cells")) {
            ArchiveCell cell;
            const auto& key = c.at("key");
            cell.key = {key.at(0).get<std::int64_t>(), key.at(1).get<std::int64_t>(), key.at(2).get<std::int64_t>()};
            const auto& g = c.at("genotype");
            cell.elite.position = detail::vec3_from_json(g.at("position"));
            cell.elite.orientation = detail::quat_from_json(g.at("orientation"));
            cell.elite.primitive_gene = g.at("primitive_gene").get<int>();
            cell.elite.noise_seed = g.at("noise_seed").get<std::uint64_t>();
            cell.fitness = c.at("fitness").get<double>();
            cell.grasp_success = c.at("grasp_success").get<bool>();
            std::optional<std::pair<std::string, TrajectoryPrimitive>> trajectory;
            if (!c.at("trajectory").is_null()) {
                cell.trajectory_ref = c["trajectory"].get<std::string>();
                if (trajectory_dir)
                    trajectory.emplace(cell.trajectory_ref, trajectory_from_json_text(read_text(*trajectory_dir / (cell.trajectory_ref + ".json"))));
            }
            out.archive.restore(std::move(cell), std::move(trajectory));
        }
        return out;
    }
    catch (const json::exception& e) {
        throw Error(ErrorCode::malformed_document, std::string("archive: ") + e.what());
    }
}

void write_metrics_csv(std::ostream& out, const std::vector<GenerationMetrics>& metrics)
{
    out << kMetricsHeader << '\n';
    for (const auto& m : metrics) {
        out << m.generation << ',' << m.occupied << ',' << m.grasps << ',' << m.trajectories << ',' << shortest(m.best_fitness) << ','
            << shortest(m.mean_fitness) << ',' << shortest(m.seconds) << '\n';
    }
}

void write_run(const fs::path& dir, const RunResult& result, const ArchiveMeta& meta)
{
    ensure_writable_dir(dir / "trajectories");
    write_text(dir / "archive.json", archive_to_json_text(result.archive, meta));
    std::ostringstream csv;
    write_metrics_csv(csv, result.metrics);
    write_text(dir / "metrics.csv", csv.str());
    for (const auto& [key, cell] : result.archive.cells()) {
        if (cell.trajectory_ref.empty())
            continue;
        const fs::path path = dir / "trajectories" / (cell.trajectory_ref + ".json");
        if (!fs::exists(path))
            write_text(path, *result.archive.trajectory_text(cell.trajectory_ref) + "\n");
    }
}

} // namespace qdtraj
