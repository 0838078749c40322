#include <gsbf/rmt.hpp>

#include <cmath>
#include <string>

#include <gsbf/errors.hpp>

namespace gsbf::rmt {

namespace {

Eigen::MatrixXd solve_checked(const Eigen::FullPivLU<Eigen::MatrixXd>& lu, const Eigen::MatrixXd& rhs,
                              const char* what)
{
    const Eigen::MatrixXd x = lu.solve(rhs);
    if (!x.allFinite()) throw AsymptoticInfeasibleError(what);
    return x;
}

} // namespace

Eigen::VectorXd psi0(const Eigen::MatrixXd& D, const Eigen::VectorXd& eta)
{
    return D * eta / static_cast<double>(D.cols());
}

Eigen::VectorXd solve_eta(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                          const Eigen::VectorXd& omega, int N, const EtaOptions& opts,
                          const Eigen::VectorXd* start)
{
    const double nl = static_cast<double>(N) * static_cast<double>(D.cols());
    const Eigen::ArrayXd load = gamma.array() / (1.0 + gamma.array());
    Eigen::VectorXd eta = start ? *start : Eigen::VectorXd(omega.cwiseInverse());

    for (int it = 0; it < opts.max_iters; ++it) {
        const Eigen::ArrayXd s = psi0(D, eta).array();
        const Eigen::VectorXd coupling = D.transpose() * (load / s).matrix() / nl;
        const Eigen::VectorXd next = (coupling + omega).cwiseInverse();
        if (!next.allFinite() || (next.array() <= 0.0).any())
            throw AsymptoticInfeasibleError("eta fixed point left the positive orthant");
        const double residual = ((next - eta).array().abs() / next.array()).maxCoeff();
        eta = next;
        if (residual <= opts.tol) return eta;
    }
    throw AsymptoticInfeasibleError("eta fixed point did not converge after " +
                                    std::to_string(opts.max_iters) + " iterations");
}

Eigen::VectorXd lambda_deterministic(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                                     const Eigen::VectorXd& eta)
{
    return gamma.cwiseQuotient(psi0(D, eta));
}

PsiSystems psi_systems(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                       const Eigen::VectorXd& eta, const Eigen::VectorXd& lambda0, int N)
{
    const Eigen::Index K = D.rows();
    const double L = static_cast<double>(D.cols());
    const double nl = static_cast<double>(N) * L;
    const Eigen::VectorXd eta2 = eta.cwiseAbs2();

    PsiSystems out;
    out.psi0 = psi0(D, eta);

    // C_ij = (1/L) sum_l d_il d_jl eta_l^2
    const Eigen::MatrixXd C = D * eta2.asDiagonal() * D.transpose() / L;
    const Eigen::ArrayXd scale =
        lambda0.array().square() / (nl * (1.0 + gamma.array()).square());
    out.J = C * scale.matrix().asDiagonal();

    const Eigen::MatrixXd I_minus_J = Eigen::MatrixXd::Identity(K, K) - out.J;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(I_minus_J);
    if (!lu.isInvertible()) throw AsymptoticInfeasibleError("I - J is singular");

    const Eigen::VectorXd c = D * eta2 / L;
    const Eigen::MatrixXd B = D * eta2.asDiagonal() / L;
    out.psi_prime = solve_checked(lu, c, "psi' system has no finite solution");
    out.psi_prime_cross = solve_checked(lu, C, "psi'_ik system has no finite solution");
    out.psi_group = solve_checked(lu, B, "psi_kl system has no finite solution");
    if ((out.psi_prime.array() <= 0.0).any())
        throw AsymptoticInfeasibleError("psi' is not positive; spectral radius of J >= 1");
    return out;
}

PowerSystem powers_deterministic(const PsiSystems& psi, const Eigen::VectorXd& gamma,
                                 const Eigen::VectorXd& sigma2, int N)
{
    const Eigen::Index K = gamma.size();
    const double L = static_cast<double>(psi.psi_group.cols());
    const double nl = static_cast<double>(N) * L;
    const Eigen::ArrayXd s2 = psi.psi0.array().square();

    PowerSystem out;
    // psi_prime_cross is symmetric; (k, i) entry below reads psi'_ik.
    const Eigen::MatrixXd& P = psi.psi_prime_cross;
    const Eigen::ArrayXd w_delta = gamma.array() / ((1.0 + gamma.array()).square() * s2) / nl;
    const Eigen::ArrayXd w_small = gamma.array() * sigma2.array() / s2 / nl;
    out.Delta.resize(K, K);
    out.delta.resize(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < K; ++i) {
            out.Delta(k, i) = w_delta(i) * P(i, k);
            acc += w_small(i) * P(i, k);
        }
        out.delta(k) = acc;
    }

    out.spectral_norm = K > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(out.Delta).singularValues()(0) : 0.0;
    // The norm grows with the spread of user gains (Delta_ki ~ d_k / d_i) while
    // the radius does not; the radius decides whether (I - Delta)^{-1} exists.
    out.spectral_radius = K > 0 ? out.Delta.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
    if (!(out.spectral_radius < 1.0))
        throw AsymptoticInfeasibleError("spectral radius of Delta >= 1", out.spectral_radius);

    const Eigen::MatrixXd I_minus_D = Eigen::MatrixXd::Identity(K, K) - out.Delta;
    out.tau = I_minus_D.partialPivLu().solve(out.delta);
    out.p0 = gamma.array() * psi.psi_prime.array() / s2 *
             (out.tau.array() / (1.0 + gamma.array()).square() + sigma2.array());
    if (!out.p0.allFinite() || (out.p0.array() < 0.0).any())
        throw AsymptoticInfeasibleError("asymptotic powers are not nonnegative");
    return out;
}

Eigen::VectorXd group_norms_deterministic(const PsiSystems& psi, const Eigen::VectorXd& p0, int N)
{
    const double nl = static_cast<double>(N) * static_cast<double>(psi.psi_group.cols());
    const Eigen::VectorXd w = p0.cwiseQuotient(psi.psi_prime) / nl;
    Eigen::VectorXd chi = psi.psi_group.transpose() * w;
    return chi.cwiseMax(0.0);
}

DeterministicState evaluate(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                            const Eigen::VectorXd& sigma2, const Eigen::VectorXd& omega, int N,
                            const EtaOptions& opts)
{
    DeterministicState st;
    st.omega = omega;
    st.eta = solve_eta(D, gamma, omega, N, opts);
    st.lambda0 = lambda_deterministic(D, gamma, st.eta);
    st.psi = psi_systems(D, gamma, st.eta, st.lambda0, N);
    st.power = powers_deterministic(st.psi, gamma, sigma2, N);
    st.chi_bar = group_norms_deterministic(st.psi, st.power.p0, N);
    return st;
}

Eigen::VectorXd ordering_criterion(const Eigen::MatrixXd& D, const Eigen::VectorXd& chi_bar,
                                   const Eigen::VectorXd& nu, int N)
{
    const Eigen::VectorXd kappa = (static_cast<double>(N) * D.colwise().sum().transpose()).cwiseQuotient(nu);
    return kappa.cwiseProduct(chi_bar);
}

StatisticalResult run_statistical(const Eigen::MatrixXd& D, const Eigen::VectorXd& gamma,
                                  const Eigen::VectorXd& sigma2, const Eigen::VectorXd& nu,
                                  const reweighted::ReweightParams& params, int N,
                                  const EtaOptions& opts)
{
    params.validate();
    StatisticalResult out;
    auto& trace = out.trace;
    Eigen::VectorXd omega = Eigen::VectorXd::Ones(D.cols());
    for (int n = 0; n < params.max_iters; ++n) {
        auto st = evaluate(D, gamma, sigma2, omega, N, opts);
        trace.objectives.push_back(
            reweighted::smoothed_objective(st.chi_bar, nu, params.p, params.epsilon));
        omega = reweighted::mm_weights(st.chi_bar, nu, params.p, params.epsilon);
        trace.states.push_back(std::move(st));
        const auto m = trace.objectives.size();
        if (m >= 2 && std::abs(trace.objectives[m - 1] - trace.objectives[m - 2]) < params.obj_tol)
            break;
    }
    out.theta_bar = ordering_criterion(D, trace.states.back().chi_bar, nu, N);
    return out;
}

} // namespace gsbf::rmt
