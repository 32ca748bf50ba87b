#include "qdtraj/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qdtraj {

namespace fs = std::filesystem;
using nlohmann::json;

MeanStd mean_std(const std::vector<double>& values)
{
    MeanStd out;
    if (values.empty())
        return out;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2)
        return out;
    double ss = 0.0;
    for (double v : values)
        ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return out;
}

json matrix_report_json(const MatrixReport& report)
{
    json combos = json::array();
    for (const auto& e : report.entries) {
        json runs = json::array();
        for (std::size_t i = 0; i < e.grasps.size(); ++i) {
            runs.push_back({{"seed", e.seeds[i]}, {"dir", run_dir_name(e.grasp_strategy, e.action_space, e.seeds[i])},
                {"grasps", e.grasps[i]}, {"trajectories", e.trajectories[i]}});
        }
        const auto g = mean_std(e.grasps);
        const auto t = mean_std(e.trajectories);
        combos.push_back({
            {"grasp_strategy", to_string(e.grasp_strategy)},
            {"action_space", to_string(e.action_space)},
            {"runs", std::move(runs)},
            {"grasps", {{"mean", g.mean}, {"std", g.std}}},
            {"trajectories", {{"mean", t.mean}, {"std", t.std}}},
            {"error", e.error ? json(*e.error) : json(nullptr)},
        });
    }
    return {
        {"schema_version", 1},
        {"object", report.object},
        {"task", {{"joint", report.joint}, {"s_init", report.s_init}, {"s_target", report.s_target}}},
        {"population_size", report.population_size},
        {"generations", report.generations},
        {"combinations", std::move(combos)},
    };
}

std::string matrix_table(const MatrixReport& report)
{
    constexpr GraspStrategy strategies[] = {GraspStrategy::explore, GraspStrategy::success, GraspStrategy::random};
    constexpr ActionSpace spaces[] = {ActionSpace::adaptive, ActionSpace::where2act, ActionSpace::vatmart};
    auto cell = [](const std::vector<double>& v) {
        const auto ms = mean_std(v);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.1f ± %.1f", ms.mean, ms.std);
        return std::string(buf);
    };
    auto pad = [](std::string s, std::size_t width) {
        // The ± sign is two bytes but one column wide.
        const std::size_t shown = s.size() - (s.find("±") != std::string::npos ? 1 : 0);
        if (shown < width)
            s.append(width - shown, ' ');
        return s;
    };

    constexpr std::size_t label_w = 10, col_w = 18;
    std::ostringstream out;
    out << pad("", label_w);
    for (auto sp : spaces)
        out << pad(std::string(to_string(sp)), 2 * col_w);
    out << '\n' << pad("strategy", label_w);
    for (std::size_t i = 0; i < std::size(spaces); ++i)
        out << pad("grasps", col_w) << pad("trajectories", col_w);
    out << '\n';
    for (auto st : strategies) {
        out << pad(std::string(to_string(st)), label_w);
        for (auto sp : spaces) {
            const MatrixEntry* found = nullptr;
            for (const auto& e : report.entries)
                if (e.grasp_strategy == st && e.action_space == sp)
                    found = &e;
            if (!found || found->error)
                out << pad("failed", col_w) << pad("failed", col_w);
            else
                out << pad(cell(found->grasps), col_w) << pad(cell(found->trajectories), col_w);
        }
        out << '\n';
    }
    std::string text = out.str();
    // Trim trailing spaces per line.
    std::string trimmed;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        line.erase(line.find_last_not_of(' ') + 1);
        trimmed += line + '\n';
    }
    return trimmed;
}

MatrixReport run_matrix(const ExperimentSpec& spec, std::ostream* log)
{
    if (spec.seeds.empty())
        throw Error(ErrorCode::invalid_argument, "at least one seed is required");
    const auto object = load_object(spec);
    const auto task = resolve_task(object, spec);
    validate_qd(spec.qd);
    validate_interaction(spec.interaction);
    validate_gripper(spec.gripper);
    ensure_writable_dir(spec.output_dir);

    MatrixReport report;
    report.object = object.name();
    report.joint = object.movable_joint(task.joint_index).name;
    report.s_init = task.s_init;
    report.s_target = task.s_target;
    report.population_size = spec.qd.population_size;
    report.generations = spec.qd.generations;

    std::ostringstream curves;
    curves << "strategy,action_space,seed,generation,occupied,grasps,trajectories\n";
    for (auto st : {GraspStrategy::explore, GraspStrategy::success, GraspStrategy::random}) {
        for (auto sp : {ActionSpace::adaptive, ActionSpace::where2act, ActionSpace::vatmart}) {
            MatrixEntry entry{st, sp, {}, {}, {}, std::nullopt};
            ExperimentSpec combo = spec;
            combo.qd.grasp_strategy = st;
            combo.qd.action_space = sp;
            std::ostringstream rows;
            try {
                for (const auto& run : run_experiment(combo, log)) {
                    entry.seeds.push_back(run.seed);
                    entry.grasps.push_back(static_cast<double>(run.metrics.back().grasps));
                    entry.trajectories.push_back(static_cast<double>(run.metrics.back().trajectories));
                    for (const auto& m : run.metrics) {
                        rows << to_string(st) << ',' << to_string(sp) << ',' << run.seed << ',' << m.generation << ',' << m.occupied << ','
                               << m.grasps << ',' << m.trajectories << '\n';
                    }
                }
                curves << rows.str();
            }
            catch (const std::exception& e) {
                entry = {st, sp, {}, {}, {}, std::string(e.what())};
                if (log)
                    *log << to_string(st) << '-' << to_string(sp) << ": failed: " << e.what() << '\n';
            }
            report.entries.push_back(std::move(entry));
        }
    }

    auto write = [&](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out)
            throw Error(ErrorCode::io_failure, "cannot write " + path.string());
    };
    write(spec.output_dir / "matrix_report.json", matrix_report_json(report).dump(2) + "\n");
    write(spec.output_dir / "matrix_table.txt", matrix_table(report));
    write(spec.output_dir / "fill_curves.csv", curves.str());
    return report;
}

} // namespace qdtraj
