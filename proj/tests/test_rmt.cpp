#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include <gsbf/duality.hpp>
#include <gsbf/errors.hpp>
#include <gsbf/rmt.hpp>

#include "support.hpp"

using namespace gsbf;

namespace {

std::vector<int> argsort(const Eigen::VectorXd& x)
{
    std::vector<int> idx(static_cast<std::size_t>(x.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a) < x(b); });
    return idx;
}

} // namespace

TEST_CASE("single user, single RRH: every quantity in closed form")
{
    const int N = 6;
    const double d = 0.7, g = 2.0, s2 = 0.3, w = 1.6;
    Eigen::MatrixXd D(1, 1);
    D << d;
    const Eigen::VectorXd gamma = Eigen::VectorXd::Constant(1, g);
    const Eigen::VectorXd sigma2 = Eigen::VectorXd::Constant(1, s2);
    const Eigen::VectorXd omega = Eigen::VectorXd::Constant(1, w);

    // eta (omega + g / ((1 + g) N eta)) = 1
    const double eta = (1.0 - g / ((1.0 + g) * N)) / w;
    const double psi0 = d * eta;
    const double lambda0 = g / psi0;
    const double J = g * g / (N * (1.0 + g) * (1.0 + g));
    const double psi_prime = d * eta * eta / (1.0 - J);
    const double Delta = g / (N * (1.0 + g) * (1.0 + g) * (1.0 - J));
    const double delta = g * s2 / (N * (1.0 - J));
    const double tau = delta / (1.0 - Delta);
    const double p0 = g / (d * (1.0 - J)) * (tau / ((1.0 + g) * (1.0 + g)) + s2);
    const double chi = p0 / N;

    const auto st = rmt::evaluate(D, gamma, sigma2, omega, N);
    CHECK(testing::rel_err(st.eta(0), eta) <= 1e-12);
    CHECK(testing::rel_err(st.lambda0(0), lambda0) <= 1e-12);
    CHECK(testing::rel_err(st.psi.J(0, 0), J) <= 1e-12);
    CHECK(testing::rel_err(st.psi.psi_prime(0), psi_prime) <= 1e-12);
    CHECK(testing::rel_err(st.power.Delta(0, 0), Delta) <= 1e-12);
    CHECK(testing::rel_err(st.power.tau(0), tau) <= 1e-12);
    CHECK(testing::rel_err(st.power.p0(0), p0) <= 1e-12);
    CHECK(testing::rel_err(st.chi_bar(0), chi) <= 1e-12);
    CHECK(st.power.spectral_norm == doctest::Approx(Delta));
    CHECK(st.power.spectral_radius == doctest::Approx(Delta));
}

TEST_CASE("uniform statistics give a symmetric closed-form eta")
{
    // eta = (1 - K gamma / (N L (1 + gamma))) / omega for D = d * ones
    {
        const int L = 2, K = 10, N = 5;
        const Eigen::MatrixXd D = Eigen::MatrixXd::Constant(K, L, 3.0);
        const auto eta = rmt::solve_eta(D, Eigen::VectorXd::Ones(K), Eigen::VectorXd::Ones(L), N);
        for (int l = 0; l < L; ++l) CHECK(eta(l) == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        const int L = 3, K = 4, N = 4;
        const double g = 2.0, w = 0.5;
        const Eigen::MatrixXd D = Eigen::MatrixXd::Constant(K, L, 0.2);
        const auto eta = rmt::solve_eta(D, Eigen::VectorXd::Constant(K, g), Eigen::VectorXd::Constant(L, w), N);
        const double expect = (1.0 - K * g / (N * L * (1.0 + g))) / w;
        for (int l = 0; l < L; ++l) CHECK(testing::rel_err(eta(l), expect) <= 1e-12);
    }
}

TEST_CASE("eta fixed point is independent of the starting point")
{
    const auto c = testing::scenario(4, 5, 6, 3.0);
    const auto D = generate_topology(c, 3).gains;
    const Eigen::Vector4d omega(1.0, 0.2, 3.0, 0.7);
    const auto a = rmt::solve_eta(D, c.gamma, omega, c.N);
    const Eigen::VectorXd far = Eigen::VectorXd::Constant(4, 1e3);
    const auto b = rmt::solve_eta(D, c.gamma, omega, c.N, {}, &far);
    CHECK(((a - b).array().abs() / a.array()).maxCoeff() <= 1e-10);
}

TEST_CASE("group norms sum to the total asymptotic power")
{
    const auto c = testing::scenario(5, 4, 8, 6.0);
    const auto D = generate_topology(c, 9).gains;
    const Eigen::VectorXd omega = Eigen::VectorXd::LinSpaced(5, 0.5, 2.0);
    const auto st = rmt::evaluate(D, c.gamma, c.sigma2, omega, c.N);
    CHECK(testing::rel_err(st.chi_bar.sum(), st.power.p0.sum() / (5.0 * 8.0)) <= 1e-10);
}

TEST_CASE("deterministic equivalents match Monte Carlo averages")
{
    const int L = 5, K = 5, N = 30, draws = 60;
    const auto c = testing::scenario(L, K, N, 0.0, 2000.0);
    const auto topo = generate_topology(c, 2);
    const Eigen::VectorXd omega = Eigen::VectorXd::LinSpaced(L, 0.5, 1.5);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(K), p = lambda, chi = Eigen::VectorXd::Zero(L);
    for (int t = 0; t < draws; ++t) {
        const auto ch = sample_channel(topo, N, 500 + t);
        const auto s = duality::solve_subproblem(ch, c.gamma, c.sigma2, omega);
        lambda += s.lambda / draws;
        p += s.p / draws;
        chi += s.group_norms / draws;
    }
    const auto st = rmt::evaluate(topo.gains, c.gamma, c.sigma2, omega, N);
    for (int k = 0; k < K; ++k) {
        CHECK(testing::rel_err(lambda(k), st.lambda0(k)) <= 0.05);
        CHECK(testing::rel_err(p(k), st.power.p0(k)) <= 0.10);
    }
    for (int l = 0; l < L; ++l) CHECK(testing::rel_err(chi(l), st.chi_bar(l)) <= 0.10);
}

TEST_CASE("spread user gains: the norm of Delta exceeds one, the powers still hold")
{
    const int N = 8, draws = 200;
    const auto c = testing::scenario(3, 3, N, 3.0);
    auto topo = generate_topology(c, 1);
    topo.gains << 1.0, 0.5, 0.2, 0.02, 0.05, 0.01, 0.002, 0.001, 0.004;
    const Eigen::VectorXd omega = Eigen::VectorXd::Ones(3);
    const auto st = rmt::evaluate(topo.gains, c.gamma, c.sigma2, omega, N);
    CHECK(st.power.spectral_norm > 1.0);
    CHECK(st.power.spectral_radius < 0.1);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
    for (int t = 0; t < draws; ++t)
        p += duality::solve_subproblem(sample_channel(topo, N, 100 + t), c.gamma, c.sigma2, omega).p / draws;
    for (int k = 0; k < 3; ++k) CHECK(testing::rel_err(p(k), st.power.p0(k)) <= 0.10);
}

TEST_CASE("a weak RRH is ranked first for switch-off")
{
    const auto c = testing::scenario(4, 4, 8);
    Eigen::MatrixXd D = generate_topology(c, 4).gains;
    D.col(2) *= 1e-3;
    reweighted::ReweightParams params;
    const auto r = rmt::run_statistical(D, c.gamma, c.sigma2, c.nu, params, c.N);
    CHECK(argsort(r.theta_bar).front() == 2);
}

TEST_CASE("scaling the group weights rescales the statistical criterion")
{
    auto c = testing::scenario(5, 4, 8, 3.0);
    c.pathloss.reference_gain *= 1e-3;
    const auto D = generate_topology(c, 6).gains;
    reweighted::ReweightParams params;
    const Eigen::VectorXd nu = Eigen::VectorXd::LinSpaced(5, 1.0, 3.0);
    const auto a = rmt::run_statistical(D, c.gamma, c.sigma2, nu, params, c.N);
    const auto b = rmt::run_statistical(D, c.gamma, c.sigma2, 4.0 * nu, params, c.N);
    CHECK(argsort(a.theta_bar) == argsort(b.theta_bar));
    CHECK((4.0 * b.theta_bar - a.theta_bar).norm() <= 1e-8 * a.theta_bar.norm());
}

TEST_CASE("statistical ordering is a deterministic function of the statistics")
{
    const auto c = testing::scenario(4, 3, 6, 3.0);
    const auto D = generate_topology(c, 8).gains;
    reweighted::ReweightParams params;
    const auto a = rmt::run_statistical(D, c.gamma, c.sigma2, c.nu, params, c.N);
    const auto b = rmt::run_statistical(D, c.gamma, c.sigma2, c.nu, params, c.N);
    CHECK(a.theta_bar == b.theta_bar);
    CHECK(a.trace.objectives == b.trace.objectives);
    CHECK(a.trace.states.front().omega == Eigen::VectorXd::Ones(4));
}

TEST_CASE("overloaded statistics have no large-system limit")
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Ones(3, 1);
    CHECK_THROWS_AS(rmt::evaluate(D, Eigen::VectorXd::Constant(3, 100.0), Eigen::VectorXd::Ones(3),
                                  Eigen::VectorXd::Ones(1), 2),
                    AsymptoticInfeasibleError);
}
