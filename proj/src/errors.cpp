#include <gsbf/errors.hpp>

namespace gsbf {

std::string_view to_string(InfeasibilityReason reason)
{
    switch (reason) {
    case InfeasibilityReason::ok: return "ok";
    case InfeasibilityReason::dimension_deficit: return "dimension-deficit";
    case InfeasibilityReason::fixed_point_divergence: return "fixed-point-divergence";
    case InfeasibilityReason::negative_power: return "negative-power";
    case InfeasibilityReason::singular: return "singular";
    }
    return "unknown";
}

} // namespace gsbf
