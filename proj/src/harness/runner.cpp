#include <gsbf/harness/runner.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <gsbf/errors.hpp>
#include <gsbf/rng.hpp>

namespace gsbf::harness {

namespace {

struct Stage1Cache
{
    std::optional<stages::Stage1Result> result;
    std::string failure;
};

/// Statistical stage-1 output for one (sinr, exponent) pair; it depends on
/// the pathloss statistics only, so it is shared by all trials.
Stage1Cache statistical_stage1(const Eigen::MatrixXd& gains, const NetworkConfig& config,
                               const reweighted::ReweightParams& params)
{
    Stage1Cache c;
    try {
        c.result = stages::stage1_statistical(gains, config, params);
    } catch (const AsymptoticInfeasibleError&) {
        c.failure = "asymptotic-infeasible";
    }
    return c;
}

NetworkConfig at_sinr(const NetworkConfig& base, double sinr_db)
{
    NetworkConfig c = base;
    c.gamma = Eigen::VectorXd::Constant(c.K, std::pow(10.0, sinr_db / 10.0));
    return c;
}

std::uint64_t topology_seed_for(const ExperimentSpec& spec, int trial)
{
    if (!spec.per_trial_topology) return spec.base_seed;
    std::uint64_t s = fading_seed(spec.base_seed, trial) ^ 0x746f706f6c6f6779ULL;
    return splitmix64(s);
}

class Instance
{
public:
    Instance(const ExperimentSpec& spec, int trial, int sinr_index,
             const std::map<std::pair<int, double>, Stage1Cache>* cache)
        : spec_(spec), trial_(trial), sinr_index_(sinr_index), cache_(cache) {}

    std::vector<TrialRecord> run() const
    {
        const double sinr_db = spec_.sinr_grid_db[sinr_index_];
        const NetworkConfig config = at_sinr(spec_.scenario, sinr_db);
        const std::uint64_t seed = fading_seed(spec_.base_seed, trial_);
        const Topology topology = generate_topology(spec_.scenario, topology_seed_for(spec_, trial_));
        const ChannelRealization channel = sample_channel(topology, config.N, seed);

        std::vector<TrialRecord> out;
        for (const auto a : spec_.algorithms) {
            TrialRecord r;
            r.trial_index = trial_;
            r.sinr_db = sinr_db;
            r.algorithm = a;
            r.seed = seed;
            out.push_back(r);
        }

        const auto verdict = duality::check_feasibility(channel, config.gamma, config.sigma2);
        if (!verdict.feasible) {
            for (auto& r : out) r.status = std::string(to_string(verdict.reason));
            return out;
        }

        bool any_failed = false;
        for (std::size_t i = 0; i < out.size(); ++i) {
            auto& r = out[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                run_algorithm(r, config, topology, channel);
                r.feasible = true;
            } catch (const InfeasibleError& e) {
                r.status = std::string(to_string(e.reason()));
            } catch (const AsymptoticInfeasibleError&) {
                r.status = "asymptotic-infeasible";
            }
            r.wall_time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            any_failed = any_failed || !r.feasible;
        }
        // Exclusion is symmetric: an instance counts for every algorithm or for none.
        if (any_failed)
            for (auto& r : out)
                if (r.feasible) {
                    r.feasible = false;
                    r.status = "excluded";
                    r.network_power_w.reset();
                    r.f1_w.reset();
                    r.f2_w.reset();
                }
        return out;
    }

private:
    void run_algorithm(TrialRecord& r, const NetworkConfig& config, const Topology& topology,
                       const ChannelRealization& channel) const
    {
        reweighted::ReweightParams params = spec_.params;
        params.p = algorithm_exponent(r.algorithm, spec_.params.p);
        stages::Stage1Result s1;
        switch (algorithm_stage1(r.algorithm)) {
        case stages::Stage1Mode::instantaneous:
            s1 = stages::stage1_instantaneous(channel, config, params);
            break;
        case stages::Stage1Mode::l1l2_approx:
            s1 = stages::stage1_l1l2(channel, config, params.epsilon);
            break;
        case stages::Stage1Mode::statistical:
            if (cache_) {
                const auto& c = cache_->at({sinr_index_, params.p});
                if (!c.result) throw AsymptoticInfeasibleError(c.failure);
                s1 = *c.result;
            } else {
                s1 = stages::stage1_statistical(topology.gains, config, params);
            }
            break;
        }
        const auto outcome = stages::run_stages_2_3(channel, config, s1, spec_.selection);
        r.active_count = static_cast<int>(outcome.active_set.size());
        r.network_power_w = outcome.total;
        r.f1_w = outcome.f1;
        r.f2_w = outcome.f2;
        r.stage1_iterations = outcome.stage1_iterations;
        r.stage1_objectives = outcome.stage1_objectives;
    }

    const ExperimentSpec& spec_;
    int trial_;
    int sinr_index_;
    const std::map<std::pair<int, double>, Stage1Cache>* cache_;
};

std::ptrdiff_t index_of(const std::vector<Algorithm>& algs, Algorithm a)
{
    return std::find(algs.begin(), algs.end(), a) - algs.begin();
}

std::ptrdiff_t index_of(const std::vector<double>& grid, double s)
{
    return std::find(grid.begin(), grid.end(), s) - grid.begin();
}

} // namespace

bool RunResult::all_infeasible() const
{
    return std::none_of(records.begin(), records.end(), [](const TrialRecord& r) { return r.feasible; });
}

std::uint64_t fading_seed(std::uint64_t base_seed, int trial_index)
{
    return base_seed ^ static_cast<std::uint64_t>(trial_index + 1);
}

RunResult run_trials(const ExperimentSpec& spec, const RunOptions& opts)
{
    spec.validate();
    const int S = static_cast<int>(spec.sinr_grid_db.size());
    const int tasks = spec.trials * S;

    std::map<std::pair<int, double>, Stage1Cache> cache;
    if (!spec.per_trial_topology) {
        const Topology topology = generate_topology(spec.scenario, spec.base_seed);
        for (int s = 0; s < S; ++s)
            for (const auto a : spec.algorithms) {
                if (algorithm_stage1(a) != stages::Stage1Mode::statistical) continue;
                reweighted::ReweightParams params = spec.params;
                params.p = algorithm_exponent(a, spec.params.p);
                const auto key = std::make_pair(s, params.p);
                if (!cache.count(key))
                    cache.emplace(key, statistical_stage1(topology.gains,
                                                          at_sinr(spec.scenario, spec.sinr_grid_db[s]), params));
            }
    }

    std::vector<std::vector<TrialRecord>> slots(static_cast<std::size_t>(tasks));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int task = next++; task < tasks; task = next++) {
            try {
                slots[task] = Instance(spec, task / S, task % S,
                                       spec.per_trial_topology ? nullptr : &cache)
                                  .run();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = tasks;
            }
        }
    };
    const int jobs = std::clamp(opts.jobs, 1, std::max(1, tasks));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    RunResult out;
    out.topology_seed = spec.base_seed;
    for (auto& slot : slots)
        for (auto& r : slot) out.records.push_back(std::move(r));
    std::sort(out.records.begin(), out.records.end(), [&](const TrialRecord& a, const TrialRecord& b) {
        const auto ka = std::make_tuple(a.trial_index, index_of(spec.algorithms, a.algorithm),
                                        index_of(spec.sinr_grid_db, a.sinr_db));
        const auto kb = std::make_tuple(b.trial_index, index_of(spec.algorithms, b.algorithm),
                                        index_of(spec.sinr_grid_db, b.sinr_db));
        return ka < kb;
    });
    out.summary = summarize(spec, out.records);
    out.traces = mean_traces(spec, out.records);
    return out;
}

std::vector<SummaryCell> summarize(const ExperimentSpec& spec, const std::vector<TrialRecord>& records)
{
    std::vector<SummaryCell> cells;
    for (const auto a : spec.algorithms)
        for (const double s : spec.sinr_grid_db) {
            SummaryCell c;
            c.algorithm = a;
            c.sinr_db = s;
            double power = 0.0, f1 = 0.0, f2 = 0.0, active = 0.0, iters = 0.0;
            for (const auto& r : records) {
                if (r.algorithm != a || r.sinr_db != s) continue;
                ++c.total_trials;
                if (!r.feasible) continue;
                ++c.feasible_trials;
                power += *r.network_power_w;
                f1 += *r.f1_w;
                f2 += *r.f2_w;
                active += r.active_count;
                iters += r.stage1_iterations;
            }
            if (c.feasible_trials > 0) {
                const double n = c.feasible_trials;
                c.mean_network_power_w = power / n;
                c.mean_f1_w = f1 / n;
                c.mean_f2_w = f2 / n;
                c.mean_active_count = active / n;
                c.mean_stage1_iterations = iters / n;
            }
            cells.push_back(c);
        }
    return cells;
}

std::vector<TracePoint> mean_traces(const ExperimentSpec& spec, const std::vector<TrialRecord>& records)
{
    std::vector<TracePoint> out;
    for (const double s : spec.sinr_grid_db)
        for (const auto a : spec.algorithms) {
            std::vector<const TrialRecord*> rows;
            std::size_t longest = 0;
            for (const auto& r : records)
                if (r.algorithm == a && r.sinr_db == s && r.feasible && !r.stage1_objectives.empty()) {
                    rows.push_back(&r);
                    longest = std::max(longest, r.stage1_objectives.size());
                }
            // Runs that stopped early hold their final objective.
            for (std::size_t it = 0; it < longest; ++it) {
                double acc = 0.0;
                for (const auto* r : rows)
                    acc += r->stage1_objectives[std::min(it, r->stage1_objectives.size() - 1)];
                out.push_back({s, a, static_cast<int>(it + 1), acc / static_cast<double>(rows.size())});
            }
        }
    return out;
}

} // namespace gsbf::harness
