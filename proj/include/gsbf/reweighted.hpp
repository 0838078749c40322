#pragma once

#include <vector>

#include <Eigen/Dense>

#include <gsbf/duality.hpp>
#include <gsbf/model.hpp>

namespace gsbf::reweighted {

struct ReweightParams
{
    double p = 1.0;         ///< l_p exponent, 0 < p <= 1
    double epsilon = 1e-3;  ///< smoothing
    int max_iters = 30;
    double obj_tol = 1e-3;  ///< absolute change of consecutive objectives

    void validate() const;
};

/// g_p = sum_l nu_l (||v~_l||^2 + eps^2)^{p/2}.
double smoothed_objective(const Eigen::VectorXd& group_norms, const Eigen::VectorXd& nu,
                          double p, double epsilon);

/// Majorization weights omega_l = (p nu_l / 2) (||v~_l||^2 + eps^2)^{p/2 - 1}.
Eigen::VectorXd mm_weights(const Eigen::VectorXd& group_norms, const Eigen::VectorXd& nu,
                           double p, double epsilon);

/// theta_l = kappa_l ||v~_l||^2 with kappa_l = sum_k ||h_kl||^2 / nu_l.
Eigen::VectorXd ordering_criterion(const ChannelRealization& channel,
                                   const Eigen::VectorXd& group_norms,
                                   const Eigen::VectorXd& nu);

struct ReweightTrace
{
    std::vector<double> objectives;                ///< g_p(v^[n]) for n = 1, 2, ...
    std::vector<Eigen::VectorXd> weights_history;  ///< omega^[n-1] that produced v^[n]
    std::vector<Eigen::VectorXd> group_norms_history;
    duality::DualitySolution final;

    int iterations() const noexcept { return static_cast<int>(objectives.size()); }
};

struct InstantaneousResult
{
    ReweightTrace trace;
    Eigen::VectorXd theta;
};

/// Iterative reweighted-l2 ordering from instantaneous CSI: starting from
/// omega = 1, alternate the closed-form subproblem and the MM weight update.
InstantaneousResult run_instantaneous(const ChannelRealization& channel,
                                      const Eigen::VectorXd& gamma,
                                      const Eigen::VectorXd& sigma2,
                                      const Eigen::VectorXd& nu,
                                      const ReweightParams& params = {},
                                      const duality::FixedPointOptions& opts = {});

/// Mixed l1/l2 stand-in: a single subproblem with omega_l = nu_l / (2 eps),
/// the first majorization step of the p = 1 objective.
InstantaneousResult run_l1l2_approx(const ChannelRealization& channel,
                                    const Eigen::VectorXd& gamma,
                                    const Eigen::VectorXd& sigma2,
                                    const Eigen::VectorXd& nu,
                                    double epsilon = 1e-3,
                                    const duality::FixedPointOptions& opts = {});

} // namespace gsbf::reweighted
