#include <gsbf/reweighted.hpp>

#include <cmath>

#include <gsbf/errors.hpp>

namespace gsbf::reweighted {

void ReweightParams::validate() const
{
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("p must lie in (0, 1]");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(obj_tol > 0.0)) throw ConfigError("obj_tol must be > 0");
}

double smoothed_objective(const Eigen::VectorXd& group_norms, const Eigen::VectorXd& nu,
                          double p, double epsilon)
{
    const double e2 = epsilon * epsilon;
    return (nu.array() * (group_norms.array() + e2).pow(p / 2.0)).sum();
}

Eigen::VectorXd mm_weights(const Eigen::VectorXd& group_norms, const Eigen::VectorXd& nu,
                           double p, double epsilon)
{
    const double e2 = epsilon * epsilon;
    return (p / 2.0) * nu.array() * (group_norms.array() + e2).pow(p / 2.0 - 1.0);
}

Eigen::VectorXd ordering_criterion(const ChannelRealization& channel,
                                   const Eigen::VectorXd& group_norms,
                                   const Eigen::VectorXd& nu)
{
    const Eigen::VectorXd kappa = channel.per_rrh_energy().cwiseQuotient(nu);
    return kappa.cwiseProduct(group_norms);
}

InstantaneousResult run_instantaneous(const ChannelRealization& channel,
                                      const Eigen::VectorXd& gamma,
                                      const Eigen::VectorXd& sigma2,
                                      const Eigen::VectorXd& nu,
                                      const ReweightParams& params,
                                      const duality::FixedPointOptions& opts)
{
    params.validate();
    InstantaneousResult out;
    auto& trace = out.trace;
    Eigen::VectorXd omega = Eigen::VectorXd::Ones(channel.L);
    Eigen::VectorXd warm;

    for (int n = 0; n < params.max_iters; ++n) {
        auto sol = duality::solve_subproblem(channel, gamma, sigma2, omega, opts,
                                             warm.size() ? &warm : nullptr);
        const double obj = smoothed_objective(sol.group_norms, nu, params.p, params.epsilon);
        trace.weights_history.push_back(omega);
        trace.group_norms_history.push_back(sol.group_norms);
        trace.objectives.push_back(obj);
        warm = sol.lambda;
        omega = mm_weights(sol.group_norms, nu, params.p, params.epsilon);
        // lambda scales with the weights; rescale the warm start accordingly
        warm *= omega.mean() / trace.weights_history.back().mean();
        trace.final = std::move(sol);
        const auto m = trace.objectives.size();
        if (m >= 2 && std::abs(trace.objectives[m - 1] - trace.objectives[m - 2]) < params.obj_tol)
            break;
    }
    out.theta = ordering_criterion(channel, trace.final.group_norms, nu);
    return out;
}

InstantaneousResult run_l1l2_approx(const ChannelRealization& channel,
                                    const Eigen::VectorXd& gamma,
                                    const Eigen::VectorXd& sigma2,
                                    const Eigen::VectorXd& nu,
                                    double epsilon,
                                    const duality::FixedPointOptions& opts)
{
    InstantaneousResult out;
    const Eigen::VectorXd omega = nu / (2.0 * epsilon);
    auto sol = duality::solve_subproblem(channel, gamma, sigma2, omega, opts);
    out.trace.weights_history.push_back(omega);
    out.trace.group_norms_history.push_back(sol.group_norms);
    out.trace.objectives.push_back(smoothed_objective(sol.group_norms, nu, 1.0, epsilon));
    out.trace.final = std::move(sol);
    out.theta = ordering_criterion(channel, out.trace.final.group_norms, nu);
    return out;
}

} // namespace gsbf::reweighted
