#pragma once

#include <vector>

#include <Eigen/Dense>

#include <gsbf/reweighted.hpp>

/// Large-system (N -> infinity) deterministic equivalents of the quantities
/// computed by the reweighted-l2 loop, for channels h_k = Theta_k^{1/2} g_k
/// with Theta_k = diag(d_k1, ..., d_kL) (x) I_N. Everything here is a
/// function of the K x L pathloss matrix D only; no fading is involved.
///
/// Shorthand used below (NL = N * L):
///   psi0_k          = (1/L) sum_l d_kl eta_l
///   C_ij            = (1/L) sum_l d_il d_jl eta_l^2
///   J_ij            = lambda0_j^2 / (NL (1 + gamma_j)^2) C_ij
namespace gsbf::rmt {

struct EtaOptions
{
    double tol = 1e-12;
    int max_iters = 200000;
};

/// Solves eta_l = ((1/NL) sum_i d_il gamma_i / ((1 + gamma_i) psi0_i) + omega_l)^{-1}
/// by fixed-point iteration starting from `start` (default 1 / omega).
Eigen::VectorXd solve_eta(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                          const Eigen::VectorXd& omega, int N, const EtaOptions& opts = {},
                          const Eigen::VectorXd* start = nullptr);

Eigen::VectorXd psi0(const Eigen::MatrixXd& D, const Eigen::VectorXd& eta);

/// lambda0_k = gamma_k / psi0_k.
Eigen::VectorXd lambda_deterministic(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                                     const Eigen::VectorXd& eta);

struct PsiSystems
{
    Eigen::VectorXd psi0;
    Eigen::MatrixXd J;
    Eigen::VectorXd psi_prime;        ///< (I - J)^{-1} c,   c_i = (1/L) sum_l d_il eta_l^2
    Eigen::MatrixXd psi_prime_cross;  ///< (i, k): column k = (I - J)^{-1} C_{., k}
    Eigen::MatrixXd psi_group;        ///< (k, l): column l = (I - J)^{-1} b_l, b_kl = (1/L) d_kl eta_l^2
};

PsiSystems psi_systems(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                       const Eigen::VectorXd& eta, const Eigen::VectorXd& lambda0, int N);

struct PowerSystem
{
    Eigen::MatrixXd Delta; ///< (k, i) = (1/NL) gamma_i / (1+gamma_i)^2 psi'_ik / psi0_i^2
    Eigen::VectorXd delta; ///< (1/NL) sum_i gamma_i sigma2_i psi'_ik / psi0_i^2
    Eigen::VectorXd tau;   ///< (I - Delta)^{-1} delta
    Eigen::VectorXd p0;
    double spectral_norm = 0.0;   ///< ||Delta||_2, reported only
    double spectral_radius = 0.0; ///< max |eig(Delta)|
};

/// Asymptotic optimal powers. Throws AsymptoticInfeasibleError when
/// the spectral radius of Delta is >= 1.
PowerSystem powers_deterministic(const PsiSystems& psi, const Eigen::VectorXd& gamma,
                                 const Eigen::VectorXd& sigma2, int N);

/// chi_bar_l = (1/NL) sum_k p0_k psi_kl / psi'_k.
Eigen::VectorXd group_norms_deterministic(const PsiSystems& psi, const Eigen::VectorXd& p0, int N);

struct DeterministicState
{
    Eigen::VectorXd omega;
    Eigen::VectorXd eta;
    Eigen::VectorXd lambda0;
    PsiSystems psi;
    PowerSystem power;
    Eigen::VectorXd chi_bar;
};

/// One full deterministic evaluation of the weighted subproblem.
DeterministicState evaluate(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                            const Eigen::VectorXd& sigma2, const Eigen::VectorXd& omega, int N,
                            const EtaOptions& opts = {});

struct StatisticalTrace
{
    std::vector<double> objectives; ///< sum_l nu_l (chi_bar_l + eps^2)^{p/2}
    std::vector<DeterministicState> states;

    int iterations() const noexcept { return static_cast<int>(objectives.size()); }
};

struct StatisticalResult
{
    Eigen::VectorXd theta_bar;
    StatisticalTrace trace;
};

/// theta_bar_l = kappa_bar_l chi_bar_l with kappa_bar_l = N sum_k d_kl / nu_l.
Eigen::VectorXd ordering_criterion(const Eigen::MatrixXd& D, const Eigen::VectorXd& chi_bar,
                                   const Eigen::VectorXd& nu, int N);

/// Statistical-CSI reweighted-l2 ordering. Takes pathloss statistics only.
StatisticalResult run_statistical(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                                  const Eigen::VectorXd& sigma2, const Eigen::VectorXd& nu,
                                  const reweighted::ReweightParams& params, int N,
                                  const EtaOptions& opts = {});

} // namespace gsbf::rmt
