#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include <gsbf/model.hpp>
#include <gsbf/rng.hpp>

namespace testing {

/// Random scenario on a [-w, w]^2 square with uniform SINR target.
inline gsbf::NetworkConfig scenario(int L, int K, int N, double sinr_db = 0.0, double w = 1000.0)
{
    auto c = gsbf::NetworkConfig::with_defaults(L, K, N, w);
    c.gamma.setConstant(std::pow(10.0, sinr_db / 10.0));
    return c;
}

inline gsbf::ChannelRealization draw(const gsbf::NetworkConfig& c, std::uint64_t seed)
{
    return gsbf::sample_channel(gsbf::generate_topology(c, seed), c.N, seed + 7919);
}

/// Dense S(lambda) = diag(omega (x) 1_N) + sum_i lambda_i / LN h_i h_i^H.
inline Eigen::MatrixXcd dense_system(const gsbf::ChannelRealization& ch, const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd& omega)
{
    const Eigen::Index n = ch.h.rows();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
    for (int l = 0; l < ch.L; ++l)
        for (int a = 0; a < ch.N; ++a) S(l * ch.N + a, l * ch.N + a) = omega(l);
    for (Eigen::Index i = 0; i < ch.h.cols(); ++i)
        S += lambda(i) / static_cast<double>(n) * ch.h.col(i) * ch.h.col(i).adjoint();
    return S;
}

/// Right-hand side of the lambda fixed point, evaluated densely.
inline double fixed_point_map(const gsbf::ChannelRealization& ch, const Eigen::VectorXd& lambda,
                              const Eigen::VectorXd& omega, const Eigen::VectorXd& gamma, int k)
{
    const Eigen::MatrixXcd S = dense_system(ch, lambda, omega);
    const Eigen::VectorXcd x = S.ldlt().solve(ch.h.col(k));
    const double q = ch.h.col(k).dot(x).real();
    return static_cast<double>(ch.h.rows()) / ((1.0 + 1.0 / gamma(k)) * q);
}

inline double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline double bisect_increasing(const std::function<double(double)>& g, double lo, double hi)
{
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Root of x -> x - T(x) for an increasing T with T(0) > 0.
inline double solve_scalar_fixed_point(const std::function<double(double)>& T)
{
    const double lo = T(0.0);
    double hi = 2.0 * lo;
    auto g = [&](double x) { return x - T(x); };
    for (int it = 0; g(hi) <= 0.0; ++it) {
        if (it >= 200) throw std::runtime_error("no bracket for the scalar fixed point");
        hi *= 2.0;
    }
    return bisect_increasing(g, lo, hi);
}

/// Two-user fixed point by nested bisection on the dense map: the inner
/// solve finds lambda_2 for fixed lambda_1, the outer solve matches lambda_1.
inline Eigen::Vector2d nested_bisection(const gsbf::ChannelRealization& ch, const Eigen::VectorXd& omega,
                                        const Eigen::VectorXd& gamma)
{
    auto inner = [&](double l1) {
        return solve_scalar_fixed_point(
            [&](double l2) { return fixed_point_map(ch, Eigen::Vector2d(l1, l2), omega, gamma, 1); });
    };
    const double l1 = solve_scalar_fixed_point(
        [&](double x) { return fixed_point_map(ch, Eigen::Vector2d(x, inner(x)), omega, gamma, 0); });
    return {l1, inner(l1)};
}

/// Two users with strongly correlated unit-gain channels.
inline gsbf::ChannelRealization correlated_pair(std::uint64_t seed, int L, int N)
{
    gsbf::Rng rng(seed);
    gsbf::ChannelRealization ch;
    ch.L = L;
    ch.N = N;
    ch.gains = Eigen::MatrixXd::Ones(2, L);
    ch.h.resize(L * N, 2);
    for (int i = 0; i < L * N; ++i) {
        const auto a = rng.complex_normal();
        ch.h(i, 0) = a;
        ch.h(i, 1) = 0.8 * a + 0.6 * rng.complex_normal();
    }
    return ch;
}

} // namespace testing
