#include <gsbf/stages.hpp>

#include <algorithm>
#include <numeric>
#include <string>

#include <gsbf/errors.hpp>
#include <gsbf/rmt.hpp>

namespace gsbf::stages {

namespace {

std::vector<int> remaining_after(const OrderingResult& ordering, int switched_off)
{
    std::vector<int> active(ordering.switch_off_priority.begin() + switched_off,
                            ordering.switch_off_priority.end());
    std::sort(active.begin(), active.end());
    return active;
}

NetworkConfig restrict_config(const NetworkConfig& config, const std::vector<int>& active)
{
    NetworkConfig out = config;
    const auto n = static_cast<Eigen::Index>(active.size());
    out.L = static_cast<int>(n);
    out.pc.resize(n);
    out.zeta.resize(n);
    out.nu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.pc(i) = config.pc(active[i]);
        out.zeta(i) = config.zeta(active[i]);
        out.nu(i) = config.nu(active[i]);
    }
    return out;
}

duality::CoordinatedResult beamform_on(const ChannelRealization& channel, const NetworkConfig& config,
                                       const std::vector<int>& active,
                                       const duality::FixedPointOptions& opts)
{
    const auto sub = channel.restrict_to(active);
    const auto cfg = restrict_config(config, active);
    return duality::coordinated_beamforming(sub, config.gamma, config.sigma2, cfg.zeta, opts);
}

duality::FeasibilityVerdict feasibility_on(const ChannelRealization& channel, const NetworkConfig& config,
                                           const std::vector<int>& active,
                                           const duality::FixedPointOptions& opts)
{
    return duality::check_feasibility(channel.restrict_to(active), config.gamma, config.sigma2, opts);
}

void require_full_set(const duality::FeasibilityVerdict& v)
{
    if (!v.feasible)
        throw InfeasibleError(v.reason, "full RRH set is infeasible (" + std::string(to_string(v.reason)) + ")");
}

} // namespace

OrderingResult order_rrhs(const Eigen::VectorXd& theta)
{
    if (!theta.allFinite()) throw Error("ordering criterion must be finite");
    OrderingResult out;
    out.theta = theta;
    out.switch_off_priority.resize(static_cast<std::size_t>(theta.size()));
    std::iota(out.switch_off_priority.begin(), out.switch_off_priority.end(), 0);
    std::stable_sort(out.switch_off_priority.begin(), out.switch_off_priority.end(),
                     [&](int a, int b) { return theta(a) < theta(b); });
    return out;
}

SelectionResult select_active_set(const ChannelRealization& channel, const OrderingResult& ordering,
                                  const NetworkConfig& config, SelectionMode mode,
                                  const duality::FixedPointOptions& opts)
{
    const int L = channel.L;
    if (static_cast<int>(ordering.switch_off_priority.size()) != L)
        throw Error("ordering size does not match the RRH count");

    SelectionResult out;
    if (mode == SelectionMode::bisection) {
        auto probe = [&](int J) {
            SelectionProbe p;
            p.active = remaining_after(ordering, J);
            p.verdict = feasibility_on(channel, config, p.active, opts);
            out.trace.push_back(p);
            return p.verdict.feasible;
        };
        probe(0);
        require_full_set(out.trace.back().verdict);
        int lo = 0;
        int hi = L - 1;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (probe(mid))
                lo = mid;
            else
                hi = mid - 1;
        }
        out.active_set = remaining_after(ordering, lo);
        return out;
    }

    double best = 0.0;
    for (int J = 0; J < L; ++J) {
        SelectionProbe p;
        p.active = remaining_after(ordering, J);
        if (channel.users() > static_cast<int>(p.active.size()) * channel.N) {
            p.verdict = {false, InfeasibilityReason::dimension_deficit};
        } else {
            try {
                auto bf = beamform_on(channel, config, p.active, opts);
                const auto padded = BeamformerSet::pad(bf.V, p.active, L);
                const auto power = network_power(padded, config);
                p.verdict = {true, InfeasibilityReason::ok};
                p.f2 = power.f2;
                p.total_power = power.total;
                if (!out.beamforming || power.total < best) {
                    best = power.total;
                    out.active_set = p.active;
                    out.beamforming = std::move(bf);
                }
            } catch (const InfeasibleError& e) {
                p.verdict = {false, e.reason()};
            }
        }
        out.trace.push_back(p);
        if (J == 0) require_full_set(p.verdict);
    }
    return out;
}

Stage1Result stage1_instantaneous(const ChannelRealization& channel, const NetworkConfig& config,
                                  const reweighted::ReweightParams& params,
                                  const duality::FixedPointOptions& opts)
{
    auto r = reweighted::run_instantaneous(channel, config.gamma, config.sigma2, config.nu, params, opts);
    return {r.theta, r.trace.iterations(), r.trace.objectives};
}

Stage1Result stage1_statistical(const Eigen::MatrixXd& gains, const NetworkConfig& config,
                                const reweighted::ReweightParams& params)
{
    auto r = rmt::run_statistical(gains, config.gamma, config.sigma2, config.nu, params, config.N);
    return {r.theta_bar, r.trace.iterations(), r.trace.objectives};
}

Stage1Result stage1_l1l2(const ChannelRealization& channel, const NetworkConfig& config, double epsilon,
                         const duality::FixedPointOptions& opts)
{
    auto r = reweighted::run_l1l2_approx(channel, config.gamma, config.sigma2, config.nu, epsilon, opts);
    return {r.theta, r.trace.iterations(), r.trace.objectives};
}

StageOutcome run_stages_2_3(const ChannelRealization& channel, const NetworkConfig& config,
                            const Stage1Result& stage1, SelectionMode selection,
                            const duality::FixedPointOptions& opts)
{
    StageOutcome out;
    out.ordering = order_rrhs(stage1.theta);
    out.stage1_iterations = stage1.iterations;
    out.stage1_objectives = stage1.objectives;

    auto sel = select_active_set(channel, out.ordering, config, selection, opts);
    out.active_set = sel.active_set;
    out.selection_trace = std::move(sel.trace);
    auto bf = sel.beamforming ? std::move(*sel.beamforming)
                              : beamform_on(channel, config, out.active_set, opts);
    out.V = BeamformerSet::pad(bf.V, out.active_set, channel.L);
    const auto power = network_power(out.V, config);
    out.f1 = power.f1;
    out.f2 = power.f2;
    out.total = power.total;
    return out;
}

StageOutcome run_three_stage(const ChannelRealization& channel, const NetworkConfig& config,
                             Stage1Mode stage1, SelectionMode selection,
                             const reweighted::ReweightParams& params,
                             const duality::FixedPointOptions& opts)
{
    // P must be feasible before any ordering work is meaningful.
    require_full_set(duality::check_feasibility(channel, config.gamma, config.sigma2, opts));
    Stage1Result s1;
    switch (stage1) {
    case Stage1Mode::instantaneous: s1 = stage1_instantaneous(channel, config, params, opts); break;
    case Stage1Mode::statistical: s1 = stage1_statistical(channel.gains, config, params); break;
    case Stage1Mode::l1l2_approx: s1 = stage1_l1l2(channel, config, params.epsilon, opts); break;
    }
    return run_stages_2_3(channel, config, s1, selection, opts);
}

} // namespace gsbf::stages
