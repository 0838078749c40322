#pragma once

#include <vector>

#include <Eigen/Dense>

#include <gsbf/errors.hpp>
#include <gsbf/model.hpp>

/// Closed-form solution of the weighted transmit-power subproblem
///
///     minimize  sum_l omega_l ||v~_l||^2   s.t.  sinr_k(v) >= gamma_k
///
/// through its Lagrangian dual. The multipliers are carried as lambda_k with
/// the dual variable equal to lambda_k / (LN), so that
///
///     S(lambda) = Q + sum_i lambda_i / (LN) h_i h_i^H,   Q = diag(omega_l I_N)
///
/// is the matrix every step inverts.
namespace gsbf::duality {

struct FixedPointOptions
{
    double tol = 1e-10;   ///< max-norm relative residual
    int max_iters = 500;
    /// Consecutive-or-not count of residual increases after which the
    /// update is damped by `damping`.
    int damping_after = 100;
    double damping = 0.5;
};

struct LambdaFixedPoint
{
    Eigen::VectorXd lambda;
    double residual = 0.0;
    int iterations = 0;
};

/// Iterates lambda_k <- LN [(1 + 1/gamma_k) h_k^H S(lambda)^{-1} h_k]^{-1}.
/// `warm_start` defaults to lambda = gamma. Throws InfeasibleError
/// (fixed_point_divergence) when the residual does not fall below tol.
LambdaFixedPoint solve_lambda_fixed_point(const ChannelRealization& channel,
                                          const Eigen::VectorXd& gamma,
                                          const Eigen::VectorXd& omega,
                                          const FixedPointOptions& opts = {},
                                          const Eigen::VectorXd* warm_start = nullptr);

/// Unit-norm directions S(lambda)^{-1} h_k / ||S(lambda)^{-1} h_k||, one
/// factorization shared across users. Columns of the returned LN x K matrix.
Eigen::MatrixXcd beam_directions(const ChannelRealization& channel,
                                 const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& omega);

/// Power coupling matrix with diagonal |h_i^H u_i|^2 / (gamma_i LN) and
/// off-diagonal -|h_i^H u_j|^2 / LN for unit directions u.
Eigen::MatrixXd power_matrix(const ChannelRealization& channel,
                             const Eigen::MatrixXcd& directions,
                             const Eigen::VectorXd& gamma);

/// p = M^{-1} sigma2; every SINR constraint then holds with equality.
Eigen::VectorXd solve_powers(const ChannelRealization& channel,
                             const Eigen::MatrixXcd& directions,
                             const Eigen::VectorXd& gamma,
                             const Eigen::VectorXd& sigma2);

/// v_k = sqrt(p_k / LN) u_k.
BeamformerSet assemble(const Eigen::MatrixXcd& directions, const Eigen::VectorXd& p, int L, int N);

struct DualitySolution
{
    Eigen::VectorXd lambda;
    Eigen::VectorXd p;
    Eigen::MatrixXcd directions;
    BeamformerSet V;
    Eigen::VectorXd group_norms;
    int iterations = 0;
    double residual = 0.0;
};

DualitySolution solve_subproblem(const ChannelRealization& channel,
                                 const Eigen::VectorXd& gamma,
                                 const Eigen::VectorXd& sigma2,
                                 const Eigen::VectorXd& omega,
                                 const FixedPointOptions& opts = {},
                                 const Eigen::VectorXd* warm_start = nullptr);

/// Per-user stationarity residual of the Lagrangian,
/// ||Q v_k + sum_{i != k} lambda_i/LN h_i h_i^H v_k - lambda_k/(LN gamma_k) h_k h_k^H v_k||.
Eigen::VectorXd stationarity_residual(const ChannelRealization& channel,
                                      const Eigen::VectorXd& gamma,
                                      const Eigen::VectorXd& omega,
                                      const DualitySolution& sol);

struct FeasibilityVerdict
{
    bool feasible = false;
    InfeasibilityReason reason = InfeasibilityReason::ok;
};

/// QoS feasibility of the channel as given (already restricted to the
/// candidate active set): dimension check, then convergence of the
/// unit-weight fixed point with nonnegative powers.
FeasibilityVerdict check_feasibility(const ChannelRealization& channel,
                                     const Eigen::VectorXd& gamma,
                                     const Eigen::VectorXd& sigma2,
                                     const FixedPointOptions& opts = {});

struct CoordinatedResult
{
    BeamformerSet V;
    double f2 = 0.0;
};

/// Transmit power minimization: the subproblem with omega_l = 1 / zeta_l.
CoordinatedResult coordinated_beamforming(const ChannelRealization& channel,
                                          const Eigen::VectorXd& gamma,
                                          const Eigen::VectorXd& sigma2,
                                          const Eigen::VectorXd& zeta,
                                          const FixedPointOptions& opts = {});

} // namespace gsbf::duality
