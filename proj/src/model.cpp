#include <gsbf/model.hpp>

#include <cmath>
#include <string>

#include <gsbf/errors.hpp>
#include <gsbf/rng.hpp>

namespace gsbf {

namespace {

void require(bool cond, const std::string& what)
{
    if (!cond) throw ConfigError(what);
}

bool all_positive(const Eigen::VectorXd& x) { return (x.array() > 0.0).all() && x.allFinite(); }

} // namespace

void PathlossParams::validate() const
{
    require(exponent > 0.0, "pathloss.exponent must be > 0");
    require(reference_distance > 0.0, "pathloss.reference_distance_m must be > 0");
    require(reference_gain > 0.0, "pathloss.reference_gain must be > 0");
    if (model == PathlossModel::fixed_matrix) {
        require(fixed.size() > 0, "pathloss.model = fixed-matrix requires pathloss.matrix");
        require((fixed.array() > 0.0).all() && fixed.allFinite(),
                "pathloss.matrix entries must be positive and finite");
    }
}

double default_reference_gain(double region_half_width, double exponent, double reference_distance)
{
    return 10.0 * std::pow(1.0 + region_half_width / reference_distance, exponent);
}

NetworkConfig NetworkConfig::with_defaults(int L, int K, int N, double region_half_width)
{
    NetworkConfig c;
    c.L = L;
    c.K = K;
    c.N = N;
    c.region_half_width = region_half_width;
    c.pc = Eigen::VectorXd::Zero(L);
    c.zeta = Eigen::VectorXd::Constant(L, 0.25);
    c.nu = Eigen::VectorXd::Ones(L);
    c.gamma = Eigen::VectorXd::Ones(K);
    c.sigma2 = Eigen::VectorXd::Ones(K);
    c.pathloss.reference_gain = default_reference_gain(
        region_half_width, c.pathloss.exponent, c.pathloss.reference_distance);
    return c;
}

void NetworkConfig::validate() const
{
    require(L >= 1, "L must be >= 1");
    require(K >= 1, "K must be >= 1");
    require(N >= 1, "N must be >= 1");
    require(pc.size() == L, "pc_watts must have L entries");
    require(zeta.size() == L, "zeta must have L entries");
    require(nu.size() == L, "nu must have L entries");
    require(gamma.size() == K, "SINR targets must have K entries");
    require(sigma2.size() == K, "sigma2 must have K entries");
    require((pc.array() >= 0.0).all() && pc.allFinite(), "pc_watts entries must be >= 0");
    require(all_positive(zeta), "zeta entries must be > 0");
    require(all_positive(nu), "nu entries must be > 0");
    require(all_positive(gamma), "SINR targets must be > 0 (linear)");
    require(all_positive(sigma2), "sigma2 entries must be > 0");
    require(region_half_width >= 0.0, "region_half_width_m must be >= 0");
    pathloss.validate();
    if (pathloss.model == PathlossModel::fixed_matrix)
        require(pathloss.fixed.rows() == K && pathloss.fixed.cols() == L,
                "pathloss.matrix must be K x L");
}

Eigen::VectorXd ChannelRealization::per_rrh_energy() const
{
    Eigen::VectorXd e = Eigen::VectorXd::Zero(L);
    for (int k = 0; k < users(); ++k)
        for (int l = 0; l < L; ++l) e(l) += block(k, l).squaredNorm();
    return e;
}

ChannelRealization ChannelRealization::restrict_to(const std::vector<int>& active) const
{
    const int la = static_cast<int>(active.size());
    ChannelRealization out;
    out.L = la;
    out.N = N;
    out.h.resize(la * N, h.cols());
    out.gains.resize(gains.rows(), la);
    for (int a = 0; a < la; ++a) {
        out.h.middleRows(a * N, N) = h.middleRows(active[a] * N, N);
        if (gains.size() > 0) out.gains.col(a) = gains.col(active[a]);
    }
    return out;
}

BeamformerSet BeamformerSet::zeros(int L, int N, int K)
{
    return {Eigen::MatrixXcd::Zero(L * N, K), L, N};
}

Eigen::VectorXd BeamformerSet::group_norms() const
{
    Eigen::VectorXd g(L);
    for (int l = 0; l < L; ++l) g(l) = v.middleRows(l * N, N).squaredNorm();
    return g;
}

BeamformerSet BeamformerSet::pad(const BeamformerSet& restricted, const std::vector<int>& active, int L)
{
    BeamformerSet out = zeros(L, restricted.N, static_cast<int>(restricted.v.cols()));
    for (std::size_t a = 0; a < active.size(); ++a)
        out.v.middleRows(active[a] * out.N, out.N) =
            restricted.v.middleRows(static_cast<Eigen::Index>(a) * out.N, out.N);
    return out;
}

double pathloss_gain(double distance, const PathlossParams& params)
{
    return params.reference_gain *
           std::pow(1.0 + distance / params.reference_distance, -params.exponent);
}

Topology generate_topology(const NetworkConfig& config, std::uint64_t seed)
{
    config.validate();
    Rng rng(seed);
    const double w = config.region_half_width;
    Topology t;
    t.rrh_positions.resize(config.L, 2);
    t.user_positions.resize(config.K, 2);
    for (int l = 0; l < config.L; ++l)
        for (int c = 0; c < 2; ++c) t.rrh_positions(l, c) = rng.uniform(-w, w);
    for (int k = 0; k < config.K; ++k)
        for (int c = 0; c < 2; ++c) t.user_positions(k, c) = rng.uniform(-w, w);

    if (config.pathloss.model == PathlossModel::fixed_matrix) {
        t.gains = config.pathloss.fixed;
        return t;
    }
    t.gains.resize(config.K, config.L);
    for (int k = 0; k < config.K; ++k)
        for (int l = 0; l < config.L; ++l) {
            const double dist = (t.user_positions.row(k) - t.rrh_positions.row(l)).norm();
            t.gains(k, l) = pathloss_gain(dist, config.pathloss);
        }
    return t;
}

ChannelRealization sample_channel(const Eigen::MatrixXd& gains, int N, std::uint64_t seed)
{
    const int K = static_cast<int>(gains.rows());
    const int L = static_cast<int>(gains.cols());
    Rng rng(seed);
    ChannelRealization ch;
    ch.L = L;
    ch.N = N;
    ch.gains = gains;
    ch.h.resize(L * N, K);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) {
            const double amp = std::sqrt(gains(k, l));
            for (int n = 0; n < N; ++n) ch.h(l * N + n, k) = amp * rng.complex_normal();
        }
    return ch;
}

ChannelRealization sample_channel(const Topology& topology, int N, std::uint64_t seed)
{
    return sample_channel(topology.gains, N, seed);
}

double sinr(const BeamformerSet& V, const ChannelRealization& channel, double sigma2, int k)
{
    const auto hk = channel.h.col(k);
    double interference = 0.0;
    double signal = 0.0;
    for (Eigen::Index i = 0; i < V.v.cols(); ++i) {
        const double g = std::norm(hk.dot(V.v.col(i))); // |h_k^H v_i|^2
        if (i == k) signal = g;
        else interference += g;
    }
    return signal / (interference + sigma2);
}

PowerBreakdown network_power(const BeamformerSet& V, const NetworkConfig& config)
{
    const Eigen::VectorXd g = V.group_norms();
    const double gmax = g.size() > 0 ? g.maxCoeff() : 0.0;
    PowerBreakdown out;
    for (int l = 0; l < V.L; ++l) {
        if (gmax > 0.0 && g(l) > kZeroGroupThreshold * gmax) out.f1 += config.pc(l);
        out.f2 += g(l) / config.zeta(l);
    }
    out.total = out.f1 + out.f2;
    return out;
}

} // namespace gsbf
