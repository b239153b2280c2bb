#include "swarmconn/control.hpp"

#include "swarmconn/netsim.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmconn::control {

double energy(double lambda, const VParams& v) {
    return 1.0 / std::tanh((lambda - 0.5 * v.epsilon_lambda) / v.scale);
}

double energy_slope(double lambda, const VParams& v) {
    const double s = std::sinh((lambda - 0.5 * v.epsilon_lambda) / v.scale);
    return -1.0 / (v.scale * s * s);
}

Vec lambda2_gradient(double own_fiedler, std::span<const ConnectivityNeighbor> neighbors,
                     double comm_range, const WeightParams& weights, int dim, Degeneracy* flags) {
    Vec grad = Vec::Zero(dim);
    for (const auto& nb : neighbors) {
        const double d = nb.relative.norm();
        if (d < kMinDistance) {
            if (flags) ++flags->coincident_neighbors;
            continue;
        }
        // dw/dp_i = w'(d) * (p_i - p_j) / d
        const double slope = link_weight_slope(d, comm_range, weights);
        const double diff = own_fiedler - nb.fiedler;
        grad -= slope * diff * diff / d * nb.relative;
    }
    return grad;
}

Vec connectivity_contribution(double lambda2_est, double own_fiedler,
                              std::span<const ConnectivityNeighbor> neighbors, double comm_range,
                              const WeightParams& weights, const VParams& v, int dim,
                              Degeneracy* flags) {
    const Vec grad = lambda2_gradient(own_fiedler, neighbors, comm_range, weights, dim, flags);
    return -energy_slope(lambda2_est, v) * grad;
}

LocalRobustness local_robustness(const net::NeighborTable& table, int k) {
    if (k < 1) throw std::invalid_argument("path-count threshold k must be >= 1");
    LocalRobustness out;
    out.pi_size = table.one_hop.size() + table.two_hop.size();
    for (const auto& [id, entry] : table.two_hop)
        if (static_cast<int>(entry.relays.size()) <= k) out.path_set.push_back(id);
    if (out.pi_size > 0)
        out.nu = static_cast<double>(out.path_set.size()) / static_cast<double>(out.pi_size);
    return out;
}

bool robustness_triggered(double nu, const RobustnessParams& params) {
    return params.trigger == TriggerDirection::Above ? nu > params.r : nu < params.r;
}

Vec robustness_contribution(const net::NeighborTable& table, const RobustnessParams& params, int dim,
                            Degeneracy* flags) {
    Vec out = Vec::Zero(dim);
    const auto local = local_robustness(table, params.k);
    if (local.path_set.empty() || !robustness_triggered(local.nu, params)) return out;
    Vec barycentre = Vec::Zero(dim);
    for (RobotId id : local.path_set) barycentre += table.two_hop.at(id).relative();
    barycentre /= static_cast<double>(local.path_set.size());
    const double d = barycentre.norm();
    if (d < kMinDistance) {
        if (flags) flags->barycentre_at_self = true;
        return out;
    }
    return barycentre / d;
}

double lj_force(double distance, const LJParams& p) {
    const double d = std::max(distance, kMinDistance);
    const double repulsive = std::pow(p.a * std::pow(p.delta, p.a) / std::pow(d, p.a + 1.0), p.a);
    const double attractive = std::pow(p.b * p.delta / std::pow(d, p.b + 1.0), p.b);
    return -p.iota * (repulsive - 2.0 * attractive);
}

double lj_equilibrium(const LJParams& p) {
    if (!(p.a > p.b && p.b > 0.0 && p.delta > 0.0))
        throw std::invalid_argument("LJ parameters need a > b > 0 and delta > 0");
    // Sign only: compare the two terms without the iota factor.
    auto sign_probe = [&](double d) { return lj_force(d, LJParams{p.a, p.b, p.delta, 1.0}); };
    double lo = kMinDistance;
    double hi = p.delta;
    while (sign_probe(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (sign_probe(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Vec coverage_contribution(std::span<const Vec> neighbor_relative, const LJParams& params, int dim) {
    Vec u = Vec::Zero(dim);
    for (const auto& rel : neighbor_relative) {
        const double d = rel.norm();
        if (d == 0.0) continue;  // no defined direction
        u += lj_force(d, params) / d * rel;
    }
    return u;
}

Vec combine(const Vec& uc, const Vec& ur, const Vec& ulj, const Gains& gains, double v_max) {
    Vec u = gains.sigma * uc + gains.psi * ur + gains.zeta * ulj;
    const double norm = u.norm();
    if (norm > v_max) u *= v_max / norm;
    return u;
}

}  // namespace swarmconn::control
