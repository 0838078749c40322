#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsbf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scenario parameters or malformed configuration.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Why an instance could not be solved with the given active RRHs.
enum class InfeasibilityReason
{
    ok,
    dimension_deficit,
    fixed_point_divergence,
    negative_power,
    singular,
};

std::string_view to_string(InfeasibilityReason reason);

/// Raised by the duality solver when the QoS constraints cannot be met.
class InfeasibleError : public Error
{
public:
    InfeasibleError(InfeasibilityReason reason, const std::string& what)
        : Error(what), reason_(reason) {}

    InfeasibilityReason reason() const noexcept { return reason_; }

private:
    InfeasibilityReason reason_;
};

/// Raised by the deterministic-equivalent machinery when the large-system
/// limit does not exist for the given statistics (e.g. spectral radius of the
/// power coupling matrix at or above one).
class AsymptoticInfeasibleError : public Error
{
public:
    AsymptoticInfeasibleError(const std::string& what, double measured = 0.0)
        : Error(what), measured_(measured) {}

    /// Offending quantity, when one exists (spectral norm, residual, ...).
    double measured() const noexcept { return measured_; }

private:
    double measured_;
};

} // namespace gsbf
