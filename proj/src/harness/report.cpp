#include <gsbf/harness/report.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <gsbf/errors.hpp>

namespace gsbf::harness {

namespace {

using nlohmann::json;

std::string opt(const std::optional<double>& x)
{
    return x ? format_double(*x) : std::string();
}

json opt_json(const std::optional<double>& x)
{
    return x ? json(*x) : json(nullptr);
}

std::optional<double> opt_from(const json& j)
{
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

} // namespace

std::string trials_csv(const std::vector<TrialRecord>& records)
{
    std::ostringstream out;
    out << "trial_index,sinr_db,algorithm,feasible,status,active_count,network_power_w,f1_w,f2_w,"
           "stage1_iterations,seed\n";
    for (const auto& r : records) {
        out << r.trial_index << ',' << format_double(r.sinr_db) << ',' << to_string(r.algorithm) << ','
            << (r.feasible ? "true" : "false") << ',' << r.status << ',';
        if (r.feasible)
            out << r.active_count << ',' << opt(r.network_power_w) << ',' << opt(r.f1_w) << ','
                << opt(r.f2_w) << ',' << r.stage1_iterations;
        else
            out << ",,,,";
        out << ',' << r.seed << '\n';
    }
    return out.str();
}

std::string summary_csv(const ExperimentSpec& spec, const std::vector<SummaryCell>& summary)
{
    std::ostringstream out;
    out << "algorithm";
    for (const double s : spec.sinr_grid_db) out << ',' << format_double(s);
    out << '\n';
    for (const auto a : spec.algorithms) {
        out << to_string(a);
        for (const double s : spec.sinr_grid_db)
            for (const auto& c : summary)
                if (c.algorithm == a && c.sinr_db == s) out << ',' << opt(c.mean_network_power_w);
        out << '\n';
    }
    return out.str();
}

std::string traces_csv(const std::vector<TracePoint>& traces)
{
    std::ostringstream out;
    out << "sinr_db,algorithm,iteration,objective\n";
    for (const auto& t : traces)
        out << format_double(t.sinr_db) << ',' << to_string(t.algorithm) << ',' << t.iteration << ','
            << format_double(t.objective) << '\n';
    return out.str();
}

std::string timings_csv(const std::vector<TrialRecord>& records)
{
    std::ostringstream out;
    out << "trial_index,sinr_db,algorithm,wall_time_ms\n";
    for (const auto& r : records)
        out << r.trial_index << ',' << format_double(r.sinr_db) << ',' << to_string(r.algorithm) << ','
            << format_double(r.wall_time_ms) << '\n';
    return out.str();
}

std::string report_json(const ExperimentSpec& spec, const RunResult& result)
{
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = echo_spec(spec);
    j["seeds"] = {{"base_seed", spec.base_seed},
                  {"topology_seed", result.topology_seed},
                  {"per_trial_topology", spec.per_trial_topology},
                  {"fading_seed_rule", "base_seed xor (trial_index + 1)"}};
    j["sinr_grid_db"] = spec.sinr_grid_db;
    json algs = json::array();
    for (const auto a : spec.algorithms) algs.push_back(std::string(to_string(a)));
    j["algorithms"] = algs;
    j["selection_mode"] = std::string(to_string(spec.selection));
    j["trials"] = spec.trials;
    json cells = json::array();
    for (const auto& c : result.summary)
        cells.push_back({{"algorithm", std::string(to_string(c.algorithm))},
                         {"sinr_db", c.sinr_db},
                         {"feasible_trials", c.feasible_trials},
                         {"total_trials", c.total_trials},
                         {"mean_network_power_w", opt_json(c.mean_network_power_w)},
                         {"mean_f1_w", opt_json(c.mean_f1_w)},
                         {"mean_f2_w", opt_json(c.mean_f2_w)},
                         {"mean_active_count", opt_json(c.mean_active_count)},
                         {"mean_stage1_iterations", opt_json(c.mean_stage1_iterations)}});
    j["summary"] = cells;
    return j.dump(2) + "\n";
}

void emit_reports(const ExperimentSpec& spec, const RunResult& result, const std::string& output_dir)
{
    if (result.records.empty()) throw Error("no trial records to report");
    const std::filesystem::path dir(output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_file(dir / "trials.csv", trials_csv(result.records));
    write_file(dir / "summary.csv", summary_csv(spec, result.summary));
    write_file(dir / "traces.csv", traces_csv(result.traces));
    write_file(dir / "timings.csv", timings_csv(result.records));
    write_file(dir / "report.json", report_json(spec, result));
}

std::vector<SummaryCell> load_report_summary(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open report '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("malformed report '" + path + "': " + e.what());
    }
    if (j.value("schema_version", 0) != kReportSchemaVersion)
        throw Error("report '" + path + "' has an unsupported schema_version");
    std::vector<SummaryCell> out;
    for (const auto& c : j.at("summary")) {
        SummaryCell s;
        s.algorithm = parse_algorithm(c.at("algorithm").get<std::string>());
        s.sinr_db = c.at("sinr_db").get<double>();
        s.feasible_trials = c.at("feasible_trials").get<int>();
        s.total_trials = c.at("total_trials").get<int>();
        s.mean_network_power_w = opt_from(c.at("mean_network_power_w"));
        s.mean_f1_w = opt_from(c.at("mean_f1_w"));
        s.mean_f2_w = opt_from(c.at("mean_f2_w"));
        s.mean_active_count = opt_from(c.at("mean_active_count"));
        s.mean_stage1_iterations = opt_from(c.at("mean_stage1_iterations"));
        out.push_back(s);
    }
    return out;
}

} // namespace gsbf::harness
