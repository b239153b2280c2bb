#pragma once

// Scenario execution, ground-truth metrics and run artifacts.
//
// Output directory layout (every text file starts with a "# swarmconn <name>
// v1" line):
//   metrics.csv       one row per tick:
//                     tick,lambda2_true,connected,min_distance,max_distance,
//                     alive_count, then per robot i:
//                     alive_i,lambda2_est_i,one_hop_i,two_hop_i
//   trajectories.csv  tick,robot,alive,x[,y[,z]]   (positions after the tick)
//   messages.csv      sent_tick,sender,receiver,kind,origin,origin_iteration,
//                     hop_count,delivered           (one row per link attempt)
//   summary.txt       key = value lines
//   config.ini        resolved scenario, seed included
//   trace.bin         every broadcast in the canonical wire layout

#include "swarmconn/agent.hpp"
#include "swarmconn/config.hpp"
#include "swarmconn/graph_oracle.hpp"
#include "swarmconn/netsim.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace swarmconn::harness {

struct MetricsRecord {
    Tick tick = 0;
    std::vector<Vec> positions;
    std::vector<bool> alive;
    std::vector<double> lambda2_est;  // NaN before the first correction round
    std::vector<std::size_t> one_hop;
    std::vector<std::size_t> two_hop;
    /// [receiver][origin] -> origin_iteration of the last message received
    /// from that origin, -1 if none yet.
    std::vector<std::vector<std::int64_t>> last_origin_iteration;
    double lambda2_true = 0.0;
    bool connected = false;
    double min_distance = 0.0;  // NaN with fewer than two alive robots
    double max_distance = 0.0;
};

struct SenderGap {
    RobotId sender = 0;
    std::uint64_t expected = 0;
    std::uint64_t missed = 0;
    double miss_ratio = 0.0;
};

struct PairCorrelation {
    RobotId a = 0;
    RobotId b = 0;
    double correlation = 0.0;  // 0 when either indicator is constant
};

/// Digest reception gaps seen by one receiver.
struct GapRatios {
    RobotId receiver = 0;
    std::uint64_t ticks = 0;  // ticks with at least one digest expected
    std::vector<SenderGap> senders;
    double exactly_one_ratio = 0.0;
    double none_ratio = 0.0;
    std::vector<PairCorrelation> correlations;
};

/// Expected digests are the attempted in-range transmissions; a miss is a
/// lost one.
std::vector<GapRatios> gap_ratios(std::span<const net::Transmission> log);

struct Summary {
    Tick ticks = 0;
    double connectivity_held_fraction = 0.0;
    double mean_rel_lambda2_error = 0.0;  // NaN with no samples
    std::uint64_t lambda2_error_samples = 0;
    double final_lambda2_true = 0.0;
    std::size_t final_alive = 0;
    std::uint64_t faults = 0;
    std::uint64_t malformed = 0;
    std::vector<GapRatios> gaps;
};

/// Starting layout: explicit positions, or uniform draws in the arena
/// (redrawn until connected when required). Throws std::runtime_error when
/// no connected draw is found.
std::vector<Vec> initial_positions(const ScenarioConfig& cfg);

/// Weighted graph over the alive robots only, and the index map back to ids.
struct AliveGraph {
    oracle::GraphSnapshot graph;
    std::vector<RobotId> ids;
};
AliveGraph alive_graph(std::span<const agent::RobotState> team, const ScenarioConfig& cfg);

class Simulation {
public:
    /// Resolves and validates `cfg`.
    explicit Simulation(const ScenarioConfig& cfg);

    /// failures -> deliver -> agent steps -> broadcasts -> oracle metrics
    MetricsRecord tick();

    [[nodiscard]] Tick now() const { return now_; }
    [[nodiscard]] const ScenarioConfig& config() const { return cfg_; }
    [[nodiscard]] const std::vector<agent::RobotState>& robots() const { return robots_; }
    [[nodiscard]] const net::Mailboxes& mailboxes() const { return boxes_; }

    void record_messages(bool on) { record_ = on; }
    [[nodiscard]] const std::vector<net::Transmission>& messages() const { return log_; }
    void set_trace(std::ostream* trace) { trace_ = trace; }

private:
    ScenarioConfig cfg_;
    std::vector<agent::RobotState> robots_;
    net::Mailboxes boxes_;
    std::mt19937_64 net_rng_;
    std::mt19937_64 failure_rng_;
    std::vector<std::vector<std::int64_t>> last_origin_;
    std::vector<net::Transmission> log_;
    bool record_ = false;
    std::ostream* trace_ = nullptr;
    Tick now_ = 0;
};

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;
    bool record_messages = false;  // implied by out_dir
    bool keep_metrics = false;
};

struct RunResult {
    Summary summary;
    std::vector<MetricsRecord> metrics;
    std::vector<net::Transmission> messages;
    std::vector<agent::RobotState> final_robots;
};

RunResult run(const ScenarioConfig& cfg, const RunOptions& options = {});

std::string format_summary(const Summary& s);

/// Output files compared by replay.
const std::vector<std::string>& artifact_names();

}  // namespace swarmconn::harness
