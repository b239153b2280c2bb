#pragma once

// Per-agent decentralized power iteration on M = I - alpha * L with a
// flood-based mean correction. Each agent owns one entry of the iterate; the
// all-ones direction is removed by subtracting the team mean carried in the
// flood, and the Rayleigh quotient terms travel with it so lambda_2 is read
// off the same round.

#include "swarmconn/model.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <span>

namespace swarmconn::pi {

/// Magnitude past which the iterate is declared numerically unstable.
inline constexpr double kOverflowBound = 1e12;
/// Post-deflation squared norm below which the iterate has collapsed.
inline constexpr double kCollapseBound = 1e-18;

struct NeighborEntry {
    double weight = 0.0;
    double x = 0.0;
};

struct PiState {
    double x = 0.0;
    double alpha = 0.1;
    std::uint64_t iteration = 0;
    std::uint64_t last_correction_iter = 0;
    double lambda2_est = 0.0;
    bool has_estimate = false;
    bool unstable = false;
    std::uint64_t round_id = 0;  // latest round this agent contributed to
    std::uint64_t rounds_applied = 0;
};

struct FloodPayload {
    std::uint64_t round_id = 0;
    RobotId origin = 0;
    double x = 0.0;
    double x2 = 0.0;
    double xlx = 0.0;  // x_k * (Lx)_k
};

struct FloodAccumulator {
    std::uint64_t round_id = 0;
    double sum_x = 0.0;
    double sum_x2 = 0.0;
    double sum_xlx = 0.0;
    std::size_t count = 0;
    std::set<RobotId> seen;
};

/// Affine map x -> scale * (x - shift) that one correction round applies.
struct CorrectionMap {
    double shift = 0.0;
    double scale = 1.0;
    double deflated_norm_sq = 0.0;
    bool collapsed = false;
};

PiState make_state(double alpha, std::mt19937_64& rng);

/// (Lx)_k = d_k x_k - sum_j w_kj x_j.
double laplacian_row_product(double own_x, double own_degree,
                             std::span<const NeighborEntry> neighbors);

/// One row of x <- (I - alpha L) x. Flags instability on overflow.
PiState pi_step(PiState state, double own_degree, std::span<const NeighborEntry> neighbors);

/// Advances x by a precomputed (Lx)_k.
PiState pi_advance(PiState state, double lx);

/// Opens the next round (round_id strictly increases) and returns this
/// agent's contribution. `lx` is (Lx)_k for the current x.
FloodPayload begin_correction(PiState& state, RobotId self, double lx);

/// Contributes to an already running round opened by another agent.
FloodPayload join_round(PiState& state, RobotId self, double lx, std::uint64_t round_id);

/// Newer rounds reset the accumulator; stale rounds and repeated
/// originators leave it unchanged.
FloodAccumulator absorb_flood(FloodAccumulator acc, const FloodPayload& msg);

CorrectionMap correction_map(const FloodAccumulator& acc);

/// Deflates and rescales x from the accumulated round and refreshes the
/// lambda_2 estimate. A collapsed round re-draws x from `rng`.
/// Throws std::invalid_argument when acc.count == 0.
PiState apply_correction(PiState state, const FloodAccumulator& acc, std::mt19937_64& rng);

/// Estimate clamped below by epsilon_lambda; the floor itself before any
/// correction round has completed.
double estimate_lambda2(const PiState& state, double epsilon_lambda);

/// alpha = 1 / (2 * degree_bound + 1).
double default_alpha(double degree_bound);

}  // namespace swarmconn::pi
