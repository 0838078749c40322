#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gsbf/model.hpp>
#include <gsbf/reweighted.hpp>
#include <gsbf/stages.hpp>

namespace gsbf::harness {

enum class Algorithm
{
    alg1,        ///< instantaneous CSI, exponent from the `p` key
    alg1_p1,
    alg1_p05,
    alg2,        ///< statistical CSI, exponent from the `p` key
    alg2_p1,
    alg2_p05,
    approx_l1l2,
};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view label);
std::string_view to_string(stages::SelectionMode m);

/// Exponent used by an algorithm given the configured default.
double algorithm_exponent(Algorithm a, double configured_p);
stages::Stage1Mode algorithm_stage1(Algorithm a);

struct ExperimentSpec
{
    NetworkConfig scenario;
    std::vector<double> sinr_grid_db;
    int trials = 100;
    std::uint64_t base_seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::alg1};
    stages::SelectionMode selection = stages::SelectionMode::exhaustive_prefix;
    reweighted::ReweightParams params;
    bool per_trial_topology = false;
    std::string output_dir = "gsbf-out";

    /// Throws ConfigError naming the violated invariant.
    void validate() const;
};

/// Parses the key = value config format. `origin` names the source in
/// error messages.
ExperimentSpec parse_spec(std::string_view text, std::string_view origin = "<config>");
ExperimentSpec load_spec(const std::string& path);

/// Canonical config text; parse_spec(echo_spec(s)) reproduces s.
std::string echo_spec(const ExperimentSpec& spec);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

} // namespace gsbf::harness
