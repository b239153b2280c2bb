#pragma once

// Per-robot state machine. A step reads only the robot's own state and its
// frozen inbox; everything it wants to say goes into the returned outbox.

#include "swarmconn/config.hpp"
#include "swarmconn/control.hpp"
#include "swarmconn/netsim.hpp"
#include "swarmconn/pi_estimator.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace swarmconn::agent {

struct DegeneracyCounters {
    std::uint64_t coincident_neighbors = 0;
    std::uint64_t barycentre_at_self = 0;
    std::uint64_t collapsed_rounds = 0;
};

struct RobotState {
    RobotId id = 0;
    Vec position;
    bool alive = true;
    pi::PiState pi;
    net::NeighborTable table;
    pi::FloodAccumulator flood_acc;
    net::FloodSeen flood_seen;
    DegeneracyCounters degeneracy;
    std::uint64_t faults = 0;
    std::mt19937_64 rng;
};

/// Contributions computed during the last step (for inspection).
struct StepReport {
    Vec uc;
    Vec ur;
    Vec ulj;
    Vec velocity;
    bool corrected = false;
    bool faulted = false;
};

/// Independent per-robot stream derived from the scenario seed.
std::mt19937_64 robot_stream(std::uint64_t seed, RobotId id);

/// Fresh robot at `position` with a randomly drawn estimator entry. `cfg`
/// must be resolved.
RobotState make_robot(RobotId id, const Vec& position, const ScenarioConfig& cfg);

/// One control tick:
/// neighbor tables -> floods -> power iteration (and correction when due)
/// -> control contributions -> Euler integration -> beacon, digest, floods.
std::vector<net::Message> step(RobotState& robot, std::span<const net::Delivery> inbox,
                               const ScenarioConfig& cfg, Tick now, StepReport* report = nullptr);

/// Each alive robot dies with probability 1 - exp(-dt / mtbf); robots are
/// visited in order so a seeded `rng` is reproducible. Returns ids of the
/// robots that died.
std::vector<RobotId> inject_failures(std::span<RobotState> team, const FailureModel& model, double dt,
                                     std::mt19937_64& rng);

/// Clamps into [0, extent] per axis.
Vec clamp_to_arena(Vec position, std::span<const double> arena);

}  // namespace swarmconn::agent
