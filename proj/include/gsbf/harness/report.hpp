#pragma once

#include <string>
#include <vector>

#include <gsbf/harness/runner.hpp>

namespace gsbf::harness {

inline constexpr int kReportSchemaVersion = 1;

std::string trials_csv(const std::vector<TrialRecord>& records);
/// One row per algorithm, one column per SINR point (mean network power).
std::string summary_csv(const ExperimentSpec& spec, const std::vector<SummaryCell>& summary);
std::string traces_csv(const std::vector<TracePoint>& traces);
/// Wall times live in their own file so the files above stay byte-stable.
std::string timings_csv(const std::vector<TrialRecord>& records);
std::string report_json(const ExperimentSpec& spec, const RunResult& result);

/// Writes trials.csv, summary.csv, traces.csv, timings.csv and report.json
/// into `output_dir` (created if needed). Throws Error naming the path.
void emit_reports(const ExperimentSpec& spec, const RunResult& result, const std::string& output_dir);

/// Summary cells read back from a report.json.
std::vector<SummaryCell> load_report_summary(const std::string& path);

} // namespace gsbf::harness
