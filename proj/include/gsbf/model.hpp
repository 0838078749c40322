#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gsbf {

using cdouble = std::complex<double>;

enum class PathlossModel
{
    log_distance,
    fixed_matrix,
};

struct PathlossParams
{
    PathlossModel model = PathlossModel::log_distance;
    double exponent = 3.7;
    double reference_distance = 50.0;
    double reference_gain = 1.0;
    /// K x L gains used verbatim when model == fixed_matrix.
    Eigen::MatrixXd fixed;

    void validate() const;
};

/// Static scenario: dimensions, per-RRH power model and per-user QoS.
struct NetworkConfig
{
    int L = 1;                 ///< RRHs
    int K = 1;                 ///< single-antenna users
    int N = 1;                 ///< antennas per RRH
    Eigen::VectorXd pc;        ///< fronthaul power per RRH [W]
    Eigen::VectorXd zeta;      ///< amplifier drain efficiency per RRH
    Eigen::VectorXd nu;        ///< group weight per RRH
    Eigen::VectorXd gamma;     ///< linear SINR target per user
    Eigen::VectorXd sigma2;    ///< noise power per user [W]
    double region_half_width = 0.0;
    PathlossParams pathloss;

    /// Defaults used throughout: Pc = 0, zeta = 0.25, nu = 1, gamma = 1,
    /// sigma2 = 1, reference gain from default_reference_gain().
    static NetworkConfig with_defaults(int L, int K, int N, double region_half_width = 0.0);

    int antennas() const noexcept { return L * N; }

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

/// Reference gain giving a 10 dB receive SNR at distance equal to the
/// region half-width for unit transmit power and unit noise.
double default_reference_gain(double region_half_width, double exponent, double reference_distance);

struct Topology
{
    Eigen::MatrixX2d rrh_positions;  ///< L x 2
    Eigen::MatrixX2d user_positions; ///< K x 2
    Eigen::MatrixXd gains;           ///< K x L pathloss gains d_kl
};

/// Instantaneous channel. Column k of `h` is h_k in C^{LN}, stacked as L
/// consecutive N-blocks (one per RRH).
struct ChannelRealization
{
    Eigen::MatrixXcd h;    ///< LN x K
    Eigen::MatrixXd gains; ///< K x L generating statistics
    int L = 0;
    int N = 0;

    int users() const noexcept { return static_cast<int>(h.cols()); }

    /// h_kl, the N-block of user k's channel belonging to RRH l.
    auto block(int k, int l) const { return h.col(k).segment(l * N, N); }

    /// sum_k ||h_kl||^2 for each RRH l.
    Eigen::VectorXd per_rrh_energy() const;

    /// Channel seen when only the listed RRHs (in the listed order) are on.
    ChannelRealization restrict_to(const std::vector<int>& active) const;
};

/// Downlink beamformers; column k is v_k in C^{LN}, partitioned like h.
struct BeamformerSet
{
    Eigen::MatrixXcd v; ///< LN x K
    int L = 0;
    int N = 0;

    static BeamformerSet zeros(int L, int N, int K);

    auto block(int l, int k) const { return v.col(k).segment(l * N, N); }
    auto block(int l, int k) { return v.col(k).segment(l * N, N); }

    /// ||v~_l||^2 = sum_k ||v_lk||^2 for each RRH l.
    Eigen::VectorXd group_norms() const;

    /// Scatter a set computed on `active` RRHs back into an L-RRH layout,
    /// leaving inactive blocks exactly zero.
    static BeamformerSet pad(const BeamformerSet& restricted, const std::vector<int>& active, int L);
};

struct PowerBreakdown
{
    double f1 = 0.0;    ///< fronthaul power of the active RRHs
    double f2 = 0.0;    ///< transmit power scaled by 1/zeta
    double total = 0.0;
};

/// Relative threshold below which a group is treated as switched off.
inline constexpr double kZeroGroupThreshold = 1e-8;

double pathloss_gain(double distance, const PathlossParams& params);

/// Uniform i.i.d. positions on [-w, w]^2 (RRHs first, then users).
Topology generate_topology(const NetworkConfig& config, std::uint64_t seed);

/// h_kl = sqrt(d_kl) g_kl with g_kl ~ CN(0, I_N).
ChannelRealization sample_channel(const Topology& topology, int N, std::uint64_t seed);
ChannelRealization sample_channel(const Eigen::MatrixXd& gains, int N, std::uint64_t seed);

double sinr(const BeamformerSet& V, const ChannelRealization& channel, double sigma2, int k);

PowerBreakdown network_power(const BeamformerSet& V, const NetworkConfig& config);

} // namespace gsbf
