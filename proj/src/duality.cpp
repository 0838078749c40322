#include <gsbf/duality.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace gsbf::duality {

namespace {

/// Diagonal of Q: omega_l repeated over the N antennas of RRH l.
Eigen::VectorXd expand_weights(const Eigen::VectorXd& omega, int N)
{
    Eigen::VectorXd q(omega.size() * N);
    for (Eigen::Index l = 0; l < omega.size(); ++l) q.segment(l * N, N).setConstant(omega(l));
    return q;
}

Eigen::MatrixXcd system_matrix(const Eigen::MatrixXcd& h, const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& qdiag)
{
    const double ln = static_cast<double>(h.rows());
    Eigen::MatrixXcd S = h * (lambda / ln).asDiagonal() * h.adjoint();
    S.diagonal().real() += qdiag;
    return S;
}

/// Factorizes S(lambda); throws when S is not positive definite.
Eigen::LLT<Eigen::MatrixXcd> factorize(const Eigen::MatrixXcd& S)
{
    Eigen::LLT<Eigen::MatrixXcd> llt(S);
    if (llt.info() != Eigen::Success)
        throw InfeasibleError(InfeasibilityReason::singular,
                              "system matrix Q + sum lambda_i/LN h_i h_i^H is singular");
    return llt;
}

/// Evaluates S(lambda)^{-1} h_k for all users. With every omega_l > 0 the
/// Woodbury identity reduces each evaluation to a K x K solve:
///   S^{-1} H = Q^{-1} H (I + Lambda G)^{-1},  G = H^H Q^{-1} H,  Lambda = diag(lambda / LN).
/// Otherwise S is factorized directly.
class QuadraticForms
{
public:
    QuadraticForms(const ChannelRealization& channel, const Eigen::VectorXd& omega)
        : h_(channel.h), qdiag_(expand_weights(omega, channel.N))
    {
        woodbury_ = (omega.array() > 0.0).all();
        if (woodbury_) {
            hq_ = qdiag_.cwiseInverse().asDiagonal() * h_;
            gram_ = h_.adjoint() * hq_;
        }
    }

    /// H^H S(lambda)^{-1} H.
    Eigen::MatrixXcd cross(const Eigen::VectorXd& lambda) const
    {
        if (!woodbury_) return h_.adjoint() * factorize(system_matrix(h_, lambda, qdiag_)).solve(h_);
        return gram_ * inner_inverse(lambda);
    }

    /// S(lambda)^{-1} H.
    Eigen::MatrixXcd solve(const Eigen::VectorXd& lambda) const
    {
        if (!woodbury_) return factorize(system_matrix(h_, lambda, qdiag_)).solve(h_);
        return hq_ * inner_inverse(lambda);
    }

private:
    Eigen::MatrixXcd inner_inverse(const Eigen::VectorXd& lambda) const
    {
        const double ln = static_cast<double>(h_.rows());
        Eigen::MatrixXcd a = (lambda / ln).cast<cdouble>().asDiagonal() * gram_;
        a.diagonal().array() += 1.0;
        Eigen::MatrixXcd x = a.partialPivLu().inverse();
        if (!x.allFinite())
            throw InfeasibleError(InfeasibilityReason::singular, "inner Woodbury system is singular");
        return x;
    }

    const Eigen::MatrixXcd& h_;
    Eigen::VectorXd qdiag_;
    bool woodbury_ = false;
    Eigen::MatrixXcd hq_;
    Eigen::MatrixXcd gram_;
};

void check_weights(const Eigen::VectorXd& omega, int L)
{
    if (omega.size() != L) throw Error("weights must have one entry per RRH");
    if ((omega.array() < 0.0).any() || !(omega.array() > 0.0).any())
        throw Error("weights must be nonnegative with at least one positive entry");
}

} // namespace

LambdaFixedPoint solve_lambda_fixed_point(const ChannelRealization& channel,
                                          const Eigen::VectorXd& gamma,
                                          const Eigen::VectorXd& omega,
                                          const FixedPointOptions& opts,
                                          const Eigen::VectorXd* warm_start)
{
    check_weights(omega, channel.L);
    const int K = channel.users();
    const double ln = static_cast<double>(channel.h.rows());
    const Eigen::ArrayXd gain = 1.0 + 1.0 / gamma.array();
    const QuadraticForms forms(channel, omega);

    LambdaFixedPoint out;
    out.lambda = warm_start ? *warm_start : gamma;
    double previous = std::numeric_limits<double>::infinity();
    int increases = 0;

    for (int it = 1; it <= opts.max_iters; ++it) {
        const Eigen::MatrixXcd X = forms.cross(out.lambda);
        Eigen::VectorXd next(K);
        for (int k = 0; k < K; ++k) next(k) = ln / (gain(k) * X(k, k).real());
        if (!next.allFinite() || (next.array() <= 0.0).any())
            throw InfeasibleError(InfeasibilityReason::fixed_point_divergence,
                                  "lambda fixed point left the positive orthant");

        // The plain map contracts like gamma / (1 + gamma), which stalls at high
        // SINR. A Newton step on lambda - T(lambda) = 0 is taken whenever it stays
        // positive, using dT_k/dlambda_j = (1 + 1/gamma_k) T_k^2 |X_kj|^2 / LN^2.
        Eigen::MatrixXd jac = -X.cwiseAbs2() / (ln * ln);
        for (int k = 0; k < K; ++k) jac.row(k) *= gain(k) * next(k) * next(k);
        jac.diagonal().array() += 1.0;
        const Eigen::VectorXd newton = out.lambda + jac.partialPivLu().solve(next - out.lambda);
        const bool use_newton = newton.allFinite() && (newton.array() > 0.0).all();
        const Eigen::VectorXd& target = use_newton ? newton : next;

        const double residual =
            ((target - out.lambda).array().abs() / target.array().max(1e-300)).maxCoeff();
        if (residual > previous) ++increases;
        previous = residual;

        if (increases >= opts.damping_after)
            out.lambda = opts.damping * out.lambda + (1.0 - opts.damping) * target;
        else
            out.lambda = target;
        out.residual = residual;
        out.iterations = it;
        if (residual <= opts.tol) return out;
        if (out.lambda.maxCoeff() > 1e250)
            break;
    }
    throw InfeasibleError(InfeasibilityReason::fixed_point_divergence,
                          "lambda fixed point did not converge (residual " +
                              std::to_string(out.residual) + " after " +
                              std::to_string(out.iterations) + " iterations)");
}

Eigen::MatrixXcd beam_directions(const ChannelRealization& channel,
                                 const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& omega)
{
    check_weights(omega, channel.L);
    Eigen::MatrixXcd u = QuadraticForms(channel, omega).solve(lambda);
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        const double n = u.col(k).norm();
        if (!(n >= 1e-30))
            throw InfeasibleError(InfeasibilityReason::singular, "degenerate beam direction");
        u.col(k) /= n;
    }
    return u;
}

Eigen::MatrixXd power_matrix(const ChannelRealization& channel,
                             const Eigen::MatrixXcd& directions,
                             const Eigen::VectorXd& gamma)
{
    const double ln = static_cast<double>(channel.h.rows());
    // G(i, j) = |h_i^H u_j|^2
    const Eigen::MatrixXd G = (channel.h.adjoint() * directions).cwiseAbs2();
    Eigen::MatrixXd M = -G / ln;
    for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, i) = G(i, i) / (gamma(i) * ln);
    return M;
}

Eigen::VectorXd solve_powers(const ChannelRealization& channel,
                             const Eigen::MatrixXcd& directions,
                             const Eigen::VectorXd& gamma,
                             const Eigen::VectorXd& sigma2)
{
    const Eigen::MatrixXd M = power_matrix(channel, directions, gamma);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw InfeasibleError(InfeasibilityReason::singular, "power matrix M is singular");
    const Eigen::VectorXd p = lu.solve(sigma2);
    if (!p.allFinite())
        throw InfeasibleError(InfeasibilityReason::singular, "power solve produced non-finite values");
    if ((p.array() <= 0.0).any())
        throw InfeasibleError(InfeasibilityReason::negative_power, "power solve produced p_k <= 0");
    return p;
}

BeamformerSet assemble(const Eigen::MatrixXcd& directions, const Eigen::VectorXd& p, int L, int N)
{
    const double ln = static_cast<double>(L) * N;
    BeamformerSet out{directions * (p.array() / ln).sqrt().matrix().asDiagonal(), L, N};
    return out;
}

DualitySolution solve_subproblem(const ChannelRealization& channel,
                                 const Eigen::VectorXd& gamma,
                                 const Eigen::VectorXd& sigma2,
                                 const Eigen::VectorXd& omega,
                                 const FixedPointOptions& opts,
                                 const Eigen::VectorXd* warm_start)
{
    DualitySolution sol;
    const auto fp = solve_lambda_fixed_point(channel, gamma, omega, opts, warm_start);
    sol.lambda = fp.lambda;
    sol.iterations = fp.iterations;
    sol.residual = fp.residual;
    sol.directions = beam_directions(channel, sol.lambda, omega);
    sol.p = solve_powers(channel, sol.directions, gamma, sigma2);
    sol.V = assemble(sol.directions, sol.p, channel.L, channel.N);
    sol.group_norms = sol.V.group_norms();
    return sol;
}

Eigen::VectorXd stationarity_residual(const ChannelRealization& channel,
                                      const Eigen::VectorXd& gamma,
                                      const Eigen::VectorXd& omega,
                                      const DualitySolution& sol)
{
    const double ln = static_cast<double>(channel.h.rows());
    const Eigen::MatrixXcd S = system_matrix(channel.h, sol.lambda, expand_weights(omega, channel.N));
    const Eigen::MatrixXcd& v = sol.V.v;
    Eigen::VectorXd r(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        const auto hk = channel.h.col(k);
        const cdouble proj = hk.dot(v.col(k));
        const double coeff = sol.lambda(k) / ln * (1.0 + 1.0 / gamma(k));
        r(k) = (S * v.col(k) - coeff * proj * hk).norm();
    }
    return r;
}

FeasibilityVerdict check_feasibility(const ChannelRealization& channel,
                                     const Eigen::VectorXd& gamma,
                                     const Eigen::VectorXd& sigma2,
                                     const FixedPointOptions& opts)
{
    if (channel.users() > channel.h.rows())
        return {false, InfeasibilityReason::dimension_deficit};
    try {
        solve_subproblem(channel, gamma, sigma2, Eigen::VectorXd::Ones(channel.L), opts);
    } catch (const InfeasibleError& e) {
        return {false, e.reason()};
    }
    return {true, InfeasibilityReason::ok};
}

CoordinatedResult coordinated_beamforming(const ChannelRealization& channel,
                                          const Eigen::VectorXd& gamma,
                                          const Eigen::VectorXd& sigma2,
                                          const Eigen::VectorXd& zeta,
                                          const FixedPointOptions& opts)
{
    const Eigen::VectorXd omega = zeta.cwiseInverse();
    auto sol = solve_subproblem(channel, gamma, sigma2, omega, opts);
    CoordinatedResult out;
    out.f2 = sol.group_norms.dot(omega);
    out.V = std::move(sol.V);
    return out;
}

} // namespace gsbf::duality
