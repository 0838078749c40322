#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gsbf/harness/spec.hpp>

namespace gsbf::harness {

struct TrialRecord
{
    int trial_index = 0;
    double sinr_db = 0.0;
    Algorithm algorithm = Algorithm::alg1;
    /// True when the (trial, sinr) instance is counted: problem P is feasible
    /// and every algorithm produced a solution.
    bool feasible = false;
    std::string status = "ok"; ///< "ok", an infeasibility reason, or "excluded"
    int active_count = 0;
    std::optional<double> network_power_w;
    std::optional<double> f1_w;
    std::optional<double> f2_w;
    int stage1_iterations = 0;
    double wall_time_ms = 0.0; ///< not part of the deterministic outputs
    std::uint64_t seed = 0;
    std::vector<double> stage1_objectives;
};

struct SummaryCell
{
    Algorithm algorithm = Algorithm::alg1;
    double sinr_db = 0.0;
    int feasible_trials = 0;
    int total_trials = 0;
    std::optional<double> mean_network_power_w;
    std::optional<double> mean_f1_w;
    std::optional<double> mean_f2_w;
    std::optional<double> mean_active_count;
    std::optional<double> mean_stage1_iterations;
};

struct TracePoint
{
    double sinr_db = 0.0;
    Algorithm algorithm = Algorithm::alg1;
    int iteration = 0; ///< 1-based
    double objective = 0.0;
};

struct RunResult
{
    std::vector<TrialRecord> records; ///< sorted by (trial, algorithm, sinr)
    std::vector<SummaryCell> summary; ///< algorithm-major, then sinr in grid order
    std::vector<TracePoint> traces;
    std::uint64_t topology_seed = 0;

    bool all_infeasible() const;
};

struct RunOptions
{
    int jobs = 1;
};

/// Seed for trial t's fading draw.
std::uint64_t fading_seed(std::uint64_t base_seed, int trial_index);

/// Executes every (trial, sinr) instance with every algorithm on the same
/// channel draw. Per-instance errors become infeasible records.
RunResult run_trials(const ExperimentSpec& spec, const RunOptions& opts = {});

/// Recomputes summary cells and traces from the records.
std::vector<SummaryCell> summarize(const ExperimentSpec& spec, const std::vector<TrialRecord>& records);
std::vector<TracePoint> mean_traces(const ExperimentSpec& spec, const std::vector<TrialRecord>& records);

} // namespace gsbf::harness
