#include "swarmconn/model.hpp"

#include <cmath>

namespace swarmconn {

double effective_sigma(const WeightParams& params, double comm_range) {
    return params.sigma > 0.0 ? params.sigma : comm_range / 3.0;
}

double link_weight(double distance, double comm_range, const WeightParams& params) {
    if (distance > comm_range) return 0.0;
    if (params.mode == WeightMode::Binary) return 1.0;
    const double s = effective_sigma(params, comm_range);
    return std::exp(-distance * distance / (2.0 * s * s));
}

double link_weight_slope(double distance, double comm_range, const WeightParams& params) {
    if (distance > comm_range || params.mode == WeightMode::Binary) return 0.0;
    const double s = effective_sigma(params, comm_range);
    return -distance / (s * s) * link_weight(distance, comm_range, params);
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace swarmconn
