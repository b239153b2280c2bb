#pragma once

// The three velocity contributions of the control law and their combination
//   u_i = sigma * u_c + psi * u_r + zeta * u_lj
// All inputs are local: relative positions, neighbor Fiedler entries and the
// agent's own neighbor tables.

#include "swarmconn/model.hpp"

#include <span>
#include <vector>

namespace swarmconn::net {
struct NeighborTable;
}

namespace swarmconn::control {

struct Gains {
    double sigma = 1.0;
    double psi = 1.0;
    double zeta = 1.0;
};

/// Generalized Lennard-Jones parameters (exponents a > b > 0, spacing delta,
/// strength iota).
struct LJParams {
    double a = 4.0;
    double b = 2.0;
    double delta = 0.0;  // 0 selects 0.9 * comm_range
    double iota = 5.0;
};

enum class TriggerDirection { Above, Below };

struct RobustnessParams {
    int k = 1;
    double r = 0.3;
    TriggerDirection trigger = TriggerDirection::Above;
};

/// Energy V(lambda) = coth((lambda - epsilon_lambda / 2) / scale).
struct VParams {
    double epsilon_lambda = 0.01;
    double scale = 1.0;
};

struct ConnectivityNeighbor {
    double fiedler = 0.0;
    Vec relative;  // p_j - p_i
};

/// Set when a pairwise term was skipped or zeroed for degenerate geometry.
struct Degeneracy {
    int coincident_neighbors = 0;
    bool barycentre_at_self = false;
};

double energy(double lambda, const VParams& v);
double energy_slope(double lambda, const VParams& v);  // dV/dlambda < 0

/// Simple-eigenvalue derivative d(lambda_2)/d(p_i) =
/// sum_j dw_ij/dp_i * (x_i - x_j)^2 for a unit-norm Fiedler vector.
Vec lambda2_gradient(double own_fiedler, std::span<const ConnectivityNeighbor> neighbors,
                     double comm_range, const WeightParams& weights, int dim,
                     Degeneracy* flags = nullptr);

/// u_c = -V'(lambda_2) * d(lambda_2)/d(p_i).
Vec connectivity_contribution(double lambda2_est, double own_fiedler,
                              std::span<const ConnectivityNeighbor> neighbors, double comm_range,
                              const WeightParams& weights, const VParams& v, int dim,
                              Degeneracy* flags = nullptr);

struct LocalRobustness {
    std::size_t pi_size = 0;
    std::vector<RobotId> path_set;  // ascending
    double nu = 0.0;
};

/// nu_i^k from the agent's 1-hop entries and the relays recorded for its
/// 2-hop entries.
LocalRobustness local_robustness(const net::NeighborTable& table, int k);

bool robustness_triggered(double nu, const RobustnessParams& params);

/// Unit vector towards the barycentre of Path_i(k) when triggered, else zero.
Vec robustness_contribution(const net::NeighborTable& table, const RobustnessParams& params,
                            int dim, Degeneracy* flags = nullptr);

/// Scalar force of the generalized Lennard-Jones potential at separation d;
/// negative values repel.
double lj_force(double distance, const LJParams& params);

/// Separation where lj_force changes sign, located by bisection.
double lj_equilibrium(const LJParams& params);

Vec coverage_contribution(std::span<const Vec> neighbor_relative, const LJParams& params,
                          int dim);

/// Weighted sum, norm-clamped to v_max with direction preserved.
Vec combine(const Vec& uc, const Vec& ur, const Vec& ulj, const Gains& gains, double v_max);

}  // namespace swarmconn::control
