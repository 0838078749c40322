#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include <gsbf/duality.hpp>
#include <gsbf/model.hpp>
#include <gsbf/reweighted.hpp>

namespace gsbf::stages {

struct OrderingResult
{
    Eigen::VectorXd theta;
    /// RRH indices (0-based) by ascending theta; ties by ascending index.
    std::vector<int> switch_off_priority;
};

OrderingResult order_rrhs(const Eigen::VectorXd& theta);

enum class SelectionMode
{
    bisection,
    exhaustive_prefix,
};

enum class Stage1Mode
{
    instantaneous,  ///< reweighted-l2 on h
    statistical,    ///< deterministic equivalents from D only
    l1l2_approx,    ///< single weighted subproblem, omega = nu / (2 eps)
};

struct SelectionProbe
{
    std::vector<int> active;   ///< sorted RRH indices
    duality::FeasibilityVerdict verdict;
    std::optional<double> total_power; ///< exhaustive mode, feasible probes
    std::optional<double> f2;
};

struct SelectionResult
{
    std::vector<int> active_set; ///< sorted
    std::vector<SelectionProbe> trace;
    /// Set when the selection already ran stage 3 on the chosen set.
    std::optional<duality::CoordinatedResult> beamforming;
};

/// Active set for the priority chain. `bisection` finds the largest number
/// of leading priority RRHs that can be switched off while the remaining set
/// stays feasible; `exhaustive_prefix` evaluates every prefix and keeps the
/// one with the lowest network power. Throws InfeasibleError if the full set
/// is infeasible.
SelectionResult select_active_set(const ChannelRealization& channel,
                                  const OrderingResult& ordering,
                                  const NetworkConfig& config,
                                  SelectionMode mode,
                                  const duality::FixedPointOptions& opts = {});

struct StageOutcome
{
    OrderingResult ordering;
    std::vector<int> active_set;
    BeamformerSet V; ///< full L-RRH layout, inactive blocks zero
    double f1 = 0.0;
    double f2 = 0.0;
    double total = 0.0;
    std::vector<SelectionProbe> selection_trace;
    int stage1_iterations = 0;
    std::vector<double> stage1_objectives;
};

/// Stage-1 ordering criterion for the given mode. Statistical mode reads
/// only the pathloss statistics.
struct Stage1Result
{
    Eigen::VectorXd theta;
    int iterations = 0;
    std::vector<double> objectives;
};

Stage1Result stage1_instantaneous(const ChannelRealization& channel, const NetworkConfig& config,
                                  const reweighted::ReweightParams& params,
                                  const duality::FixedPointOptions& opts = {});

Stage1Result stage1_statistical(const Eigen::MatrixXd& gains, const NetworkConfig& config,
                                const reweighted::ReweightParams& params);

Stage1Result stage1_l1l2(const ChannelRealization& channel, const NetworkConfig& config,
                         double epsilon, const duality::FixedPointOptions& opts = {});

/// Stages 2 and 3 for a precomputed ordering.
StageOutcome run_stages_2_3(const ChannelRealization& channel, const NetworkConfig& config,
                            const Stage1Result& stage1, SelectionMode selection,
                            const duality::FixedPointOptions& opts = {});

/// Full pipeline: stage-1 ordering, active-set selection on instantaneous
/// CSI, then coordinated beamforming on the active set.
StageOutcome run_three_stage(const ChannelRealization& channel, const NetworkConfig& config,
                             Stage1Mode stage1, SelectionMode selection,
                             const reweighted::ReweightParams& params = {},
                             const duality::FixedPointOptions& opts = {});

} // namespace gsbf::stages
