#include "swarmconn/pi_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmconn::pi {

namespace {

double draw_entry(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return dist(rng);
}

FloodPayload contribution(const PiState& state, RobotId self, double lx) {
    return FloodPayload{state.round_id, self, state.x, state.x * state.x, state.x * lx};
}

}  // namespace

PiState make_state(double alpha, std::mt19937_64& rng) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    PiState s;
    s.alpha = alpha;
    s.x = draw_entry(rng);
    return s;
}

double default_alpha(double degree_bound) { return 1.0 / (2.0 * degree_bound + 1.0); }

double laplacian_row_product(double own_x, double own_degree,
                             std::span<const NeighborEntry> neighbors) {
    double lx = own_degree * own_x;
    for (const auto& nb : neighbors) lx -= nb.weight * nb.x;
    return lx;
}

PiState pi_advance(PiState state, double lx) {
    state.x -= state.alpha * lx;
    ++state.iteration;
    if (!std::isfinite(state.x) || std::abs(state.x) > kOverflowBound) state.unstable = true;
    return state;
}

PiState pi_step(PiState state, double own_degree, std::span<const NeighborEntry> neighbors) {
    return pi_advance(state, laplacian_row_product(state.x, own_degree, neighbors));
}

FloodPayload begin_correction(PiState& state, RobotId self, double lx) {
    ++state.round_id;
    state.unstable = false;
    return contribution(state, self, lx);
}

FloodPayload join_round(PiState& state, RobotId self, double lx, std::uint64_t round_id) {
    state.round_id = std::max(state.round_id, round_id);
    return contribution(state, self, lx);
}

FloodAccumulator absorb_flood(FloodAccumulator acc, const FloodPayload& msg) {
    if (msg.round_id < acc.round_id) return acc;
    if (msg.round_id > acc.round_id) {
        acc = FloodAccumulator{};
        acc.round_id = msg.round_id;
    }
    if (!acc.seen.insert(msg.origin).second) return acc;
    acc.sum_x += msg.x;
    acc.sum_x2 += msg.x2;
    acc.sum_xlx += msg.xlx;
    acc.count = acc.seen.size();
    return acc;
}

CorrectionMap correction_map(const FloodAccumulator& acc) {
    if (acc.count == 0) throw std::invalid_argument("correction needs at least one contribution");
    CorrectionMap m;
    const auto count = static_cast<double>(acc.count);
    m.shift = acc.sum_x / count;
    m.deflated_norm_sq = acc.sum_x2 - acc.sum_x * acc.sum_x / count;
    m.collapsed = !(m.deflated_norm_sq >= kCollapseBound);
    m.scale = m.collapsed ? 0.0 : 1.0 / std::sqrt(m.deflated_norm_sq);
    return m;
}

PiState apply_correction(PiState state, const FloodAccumulator& acc, std::mt19937_64& rng) {
    const auto m = correction_map(acc);
    if (m.collapsed) {
        state.x = draw_entry(rng);
    } else {
        state.x = m.scale * (state.x - m.shift);
        state.lambda2_est = std::max(0.0, acc.sum_xlx / m.deflated_norm_sq);
        state.has_estimate = true;
    }
    state.unstable = false;
    state.last_correction_iter = state.iteration;
    ++state.rounds_applied;
    return state;
}

double estimate_lambda2(const PiState& state, double epsilon_lambda) {
    if (!state.has_estimate) return epsilon_lambda;
    return std::max(epsilon_lambda, state.lambda2_est);
}

}  // namespace swarmconn::pi
