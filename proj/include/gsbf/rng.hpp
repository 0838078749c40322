#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace gsbf {

/// splitmix64 finalizer; decorrelates nearby integer seeds before they seed
/// the stream generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded random stream. mt19937_64 output is fixed by the standard, and the
/// uniform/Gaussian transforms below are spelled out so draws do not depend
/// on the standard library's distribution implementations.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform on [0, 1).
    double uniform01()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = 1 (Box-Muller).
    std::complex<double> complex_normal()
    {
        const double u1 = 1.0 - uniform01(); // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

private:
    std::mt19937_64 engine_;
};

} // namespace gsbf
