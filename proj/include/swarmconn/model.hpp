#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace swarmconn {

/// Position / displacement in the m-dimensional workspace (meters).
using Vec = Eigen::VectorXd;

using RobotId = std::uint32_t;
using Tick = std::int64_t;

/// Separation below which pairwise terms are treated as degenerate.
inline constexpr double kMinDistance = 0.01;

enum class WeightMode { Smooth, Binary };

/// Link weight model. Smooth: w(d) = exp(-d^2 / (2 sigma^2)) inside range.
/// Binary: w(d) = 1 inside range. Both are zero beyond comm_range.
struct WeightParams {
    WeightMode mode = WeightMode::Smooth;
    double sigma = 0.0;  // 0 selects comm_range / 3
};

struct RadioModel {
    double comm_range = 16.0;
    double drop_prob = 0.0;
    int max_hops = 0;  // 0 selects the team size
};

double effective_sigma(const WeightParams& params, double comm_range);

/// w(d); zero for d > comm_range.
double link_weight(double distance, double comm_range, const WeightParams& params);

/// dw/dd, zero outside range and for binary weights.
double link_weight_slope(double distance, double comm_range, const WeightParams& params);

bool all_finite(const Vec& v);

}  // namespace swarmconn
