#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gsbf/duality.hpp>

#include "support.hpp"

using namespace gsbf;
using namespace gsbf::duality;

namespace {

/// Channel with every user supported on a single RRH block.
ChannelRealization block_supported(const std::vector<int>& rrh_of_user, int L, int N, std::uint64_t seed)
{
    Rng rng(seed);
    const int K = static_cast<int>(rrh_of_user.size());
    ChannelRealization ch;
    ch.L = L;
    ch.N = N;
    ch.gains = Eigen::MatrixXd::Ones(K, L);
    ch.h = Eigen::MatrixXcd::Zero(L * N, K);
    for (int k = 0; k < K; ++k)
        for (int a = 0; a < N; ++a) ch.h(rrh_of_user[k] * N + a, k) = rng.complex_normal();
    return ch;
}

Eigen::VectorXd sinrs(const DualitySolution& s, const ChannelRealization& ch, const Eigen::VectorXd& sigma2)
{
    Eigen::VectorXd out(ch.users());
    for (int k = 0; k < ch.users(); ++k) out(k) = sinr(s.V, ch, sigma2(k), k);
    return out;
}

} // namespace

TEST_CASE("two-user fixed point matches the nested-bisection oracle")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto ch = testing::correlated_pair(seed, 2, 2);
        const Eigen::Vector2d omega(1.0, 2.5);
        const Eigen::Vector2d gamma(1.0, 2.0);
        const auto oracle = testing::nested_bisection(ch, omega, gamma);
        const auto fp = solve_lambda_fixed_point(ch, gamma, omega);
        CHECK(testing::rel_err(fp.lambda(0), oracle(0)) <= 1e-10);
        CHECK(testing::rel_err(fp.lambda(1), oracle(1)) <= 1e-10);
    }
}

TEST_CASE("single user reduces to matched filtering through Q^-1")
{
    // K = 1: lambda = LN gamma / (h^H Q^-1 h), v ~ Q^-1 h with |h^H v|^2 = gamma sigma2
    const auto c = testing::scenario(3, 1, 2, 4.0);
    const auto ch = testing::draw(c, 11);
    const Eigen::Vector3d omega(0.5, 1.0, 3.0);
    Eigen::VectorXcd qinv_h = ch.h.col(0);
    for (int l = 0; l < 3; ++l) qinv_h.segment(l * 2, 2) /= omega(l);
    const double a = ch.h.col(0).dot(qinv_h).real();
    const double ln = 6.0;

    const Eigen::VectorXd sigma2 = Eigen::VectorXd::Constant(1, 0.7);
    const auto s = solve_subproblem(ch, c.gamma, sigma2, omega);
    CHECK(s.lambda(0) == doctest::Approx(ln * c.gamma(0) / a).epsilon(1e-12));
    const Eigen::VectorXcd v = qinv_h * std::sqrt(c.gamma(0) * 0.7) / a;
    CHECK(std::abs(s.V.v.col(0).dot(v)) == doctest::Approx(v.squaredNorm()).epsilon(1e-10));
    CHECK(s.V.v.col(0).squaredNorm() == doctest::Approx(v.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("users on disjoint RRHs decouple")
{
    const auto ch = block_supported({0, 1, 2}, 3, 3, 4);
    const Eigen::Vector3d omega(1.0, 2.0, 0.5);
    const Eigen::Vector3d gamma(1.0, 3.0, 0.5);
    const Eigen::Vector3d sigma2(1.0, 1.0, 2.0);
    const auto s = solve_subproblem(ch, gamma, sigma2, omega);
    for (int k = 0; k < 3; ++k) {
        // isolated single-user link: ||v_k||^2 = gamma_k sigma2_k / ||h_k||^2
        CHECK(s.V.v.col(k).squaredNorm() ==
              doctest::Approx(gamma(k) * sigma2(k) / ch.h.col(k).squaredNorm()).epsilon(1e-10));
        CHECK(s.group_norms(k) == doctest::Approx(s.V.v.col(k).squaredNorm()).epsilon(1e-10));
    }
}

TEST_CASE("only the supporting RRH carries power")
{
    const auto ch = block_supported({1, 1}, 3, 4, 9);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
    const auto s = solve_subproblem(ch, ones, ones, Eigen::VectorXd::Ones(3));
    CHECK(s.group_norms(1) > 0.0);
    CHECK(s.group_norms(0) <= 1e-20 * s.group_norms(1));
    CHECK(s.group_norms(2) <= 1e-20 * s.group_norms(1));
}

TEST_CASE("high-SINR directions approach zero forcing")
{
    const auto c = testing::scenario(2, 3, 3, 50.0);
    const auto ch = testing::draw(c, 5);
    const Eigen::VectorXd sigma2 = Eigen::VectorXd::Constant(3, 1e-3);
    const auto s = solve_subproblem(ch, c.gamma, sigma2, Eigen::VectorXd::Ones(2));
    const Eigen::MatrixXcd H = ch.h;
    const Eigen::MatrixXcd zf = H * (H.adjoint() * H).inverse();
    for (int k = 0; k < 3; ++k) {
        const double align = std::abs(zf.col(k).normalized().dot(s.directions.col(k)));
        CHECK(align >= 1.0 - 1e-3);
    }
}

TEST_CASE("fixed point agrees with a long undamped dense iteration")
{
    const auto c = testing::scenario(2, 3, 2, 3.0);
    const auto ch = testing::draw(c, 21);
    const Eigen::Vector2d omega(0.8, 1.7);
    Eigen::VectorXd lambda = c.gamma;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd next(3);
        for (int k = 0; k < 3; ++k) next(k) = testing::fixed_point_map(ch, lambda, omega, c.gamma, k);
        lambda = next;
    }
    const auto fp = solve_lambda_fixed_point(ch, c.gamma, omega);
    for (int k = 0; k < 3; ++k) CHECK(testing::rel_err(fp.lambda(k), lambda(k)) <= 1e-9);
}

TEST_CASE("fixed point is unique across warm starts")
{
    const auto c = testing::scenario(3, 4, 2, 2.0);
    const auto ch = testing::draw(c, 8);
    const Eigen::Vector3d omega(1.0, 0.3, 2.0);
    const auto ref = solve_lambda_fixed_point(ch, c.gamma, omega);
    Rng rng(99);
    for (double scale : {1e-3, 0.5, 10.0, 1e3}) {
        Eigen::VectorXd start(4);
        for (int k = 0; k < 4; ++k) start(k) = scale * (0.5 + rng.uniform01());
        const auto fp = solve_lambda_fixed_point(ch, c.gamma, omega, {}, &start);
        CHECK(((fp.lambda - ref.lambda).array().abs() / ref.lambda.array()).maxCoeff() <= 1e-9);
    }
}

TEST_CASE("weight scaling scales lambda and leaves beamformers unchanged")
{
    const auto c = testing::scenario(3, 3, 2, 3.0);
    const auto ch = testing::draw(c, 13);
    const Eigen::Vector3d omega(1.0, 0.4, 2.2);
    const auto a = solve_subproblem(ch, c.gamma, c.sigma2, omega);
    const auto b = solve_subproblem(ch, c.gamma, c.sigma2, 7.0 * omega);
    CHECK(((b.lambda - 7.0 * a.lambda).array().abs() / b.lambda.array()).maxCoeff() <= 1e-9);
    CHECK((b.V.v - a.V.v).norm() <= 1e-8 * a.V.v.norm());
}

TEST_CASE("powers are linear in a common noise scale")
{
    const auto c = testing::scenario(2, 3, 3, 0.0);
    const auto ch = testing::draw(c, 17);
    const Eigen::Vector2d omega(1.0, 1.5);
    const auto a = solve_subproblem(ch, c.gamma, c.sigma2, omega);
    const auto b = solve_subproblem(ch, c.gamma, 3.0 * c.sigma2, omega);
    CHECK((b.lambda - a.lambda).norm() <= 1e-12 * a.lambda.norm());
    CHECK((b.p - 3.0 * a.p).norm() <= 1e-10 * b.p.norm());
}

TEST_CASE("solutions meet every SINR target with equality and are stationary")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto c = testing::scenario(4, 4, 3, 2.0 * static_cast<double>(seed % 4));
        const auto ch = testing::draw(c, seed);
        Rng rng(seed);
        Eigen::VectorXd omega(4);
        for (int l = 0; l < 4; ++l) omega(l) = 0.2 + 2.0 * rng.uniform01();
        const auto s = solve_subproblem(ch, c.gamma, c.sigma2, omega);
        const auto got = sinrs(s, ch, c.sigma2);
        for (int k = 0; k < 4; ++k) CHECK(testing::rel_err(got(k), c.gamma(k)) <= 1e-8);
        const auto r = stationarity_residual(ch, c.gamma, omega, s);
        CHECK(r.maxCoeff() <= 1e-8 * s.V.v.norm() * omega.maxCoeff());
    }
}

TEST_CASE("zero weights use the direct factorization path")
{
    // One antenna cannot carry three users at 1 dB, so the free RRH alone is not
    // enough and the dual stays positive; K > N keeps its block of S full rank.
    const auto c = testing::scenario(3, 3, 1, 1.0);
    const auto ch = testing::draw(c, 31);
    const Eigen::Vector3d omega(0.0, 1.0, 2.0);
    const auto s = solve_subproblem(ch, c.gamma, c.sigma2, omega);
    const auto got = sinrs(s, ch, c.sigma2);
    for (int k = 0; k < 3; ++k) CHECK(testing::rel_err(got(k), c.gamma(k)) <= 1e-8);
    CHECK(stationarity_residual(ch, c.gamma, omega, s).maxCoeff() <= 1e-8 * s.V.v.norm() * 2.0);

    // the tiny-weight limit approaches the zero-weight solution
    const Eigen::Vector3d near(1e-9, 1.0, 2.0);
    const auto t = solve_subproblem(ch, c.gamma, c.sigma2, near);
    CHECK((t.V.v - s.V.v).norm() <= 1e-5 * s.V.v.norm());

    // a free RRH that can serve everyone drives the dual to zero: S is singular
    const auto thin = testing::scenario(3, 2, 3, 1.0);
    CHECK_THROWS_AS(solve_subproblem(testing::draw(thin, 31), thin.gamma, thin.sigma2, omega), InfeasibleError);
}

TEST_CASE("relabelling RRHs permutes the group norms")
{
    const auto c = testing::scenario(3, 3, 2, 3.0);
    const auto ch = testing::draw(c, 41);
    const Eigen::Vector3d omega(0.7, 1.3, 2.1);
    const std::vector<int> perm{2, 0, 1};
    const auto permuted = ch.restrict_to(perm);
    const Eigen::Vector3d omega_p(omega(2), omega(0), omega(1));
    const auto a = solve_subproblem(ch, c.gamma, c.sigma2, omega);
    const auto b = solve_subproblem(permuted, c.gamma, c.sigma2, omega_p);
    for (int i = 0; i < 3; ++i)
        CHECK(b.group_norms(i) == doctest::Approx(a.group_norms(perm[i])).epsilon(1e-9));
}

TEST_CASE("feasibility verdicts")
{
    const auto c = testing::scenario(1, 3, 2);
    const auto ch = testing::draw(c, 1);
    const auto v = check_feasibility(ch, c.gamma, c.sigma2);
    CHECK_FALSE(v.feasible);
    CHECK(v.reason == InfeasibilityReason::dimension_deficit);

    // identical channels cannot both reach SINR >= 1
    auto twins = testing::correlated_pair(3, 1, 2);
    twins.h.col(1) = twins.h.col(0);
    const Eigen::VectorXd g = Eigen::VectorXd::Constant(2, 2.0);
    const auto w = check_feasibility(twins, g, Eigen::VectorXd::Ones(2));
    CHECK_FALSE(w.feasible);
    CHECK(w.reason != InfeasibilityReason::ok);
    CHECK_THROWS_AS(solve_subproblem(twins, g, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(1)),
                    InfeasibleError);

    const auto ok = testing::scenario(3, 3, 2);
    const auto och = testing::draw(ok, 2);
    CHECK(check_feasibility(och, ok.gamma, ok.sigma2).feasible);
}

TEST_CASE("coordinated beamforming weights transmit power by amplifier efficiency")
{
    const auto c = testing::scenario(3, 2, 2, 3.0);
    const auto ch = testing::draw(c, 6);
    const Eigen::Vector3d zeta(0.25, 0.5, 0.4);
    const auto r = coordinated_beamforming(ch, c.gamma, c.sigma2, zeta);
    const auto g = r.V.group_norms();
    CHECK(r.f2 == doctest::Approx(g(0) / 0.25 + g(1) / 0.5 + g(2) / 0.4).epsilon(1e-12));
    for (int k = 0; k < 2; ++k) CHECK(sinr(r.V, ch, c.sigma2(k), k) == doctest::Approx(c.gamma(k)));
}

TEST_CASE("weights are validated")
{
    const auto c = testing::scenario(2, 1, 2);
    const auto ch = testing::draw(c, 1);
    CHECK_THROWS_AS(solve_subproblem(ch, c.gamma, c.sigma2, Eigen::Vector2d(-1.0, 1.0)), Error);
    CHECK_THROWS_AS(solve_subproblem(ch, c.gamma, c.sigma2, Eigen::Vector2d(0.0, 0.0)), Error);
    CHECK_THROWS_AS(solve_subproblem(ch, c.gamma, c.sigma2, Eigen::Vector3d(1.0, 1.0, 1.0)), Error);
}
