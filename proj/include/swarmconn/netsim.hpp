#pragma once

// Simulated limited-range lossy radio. Messages broadcast during tick t land
// in the receivers' next-tick inbox and become readable only after
// Mailboxes::deliver() at the start of tick t+1.

#include "swarmconn/graph_oracle.hpp"
#include "swarmconn/model.hpp"
#include "swarmconn/pi_estimator.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace swarmconn::net {

enum class MessageKind : std::uint8_t { Beacon = 1, Digest = 2, Flood = 3 };

const char* kind_name(MessageKind kind);

/// Position and current power-iteration entry of the sender.
struct BeaconPayload {
    Vec position;
    double fiedler = 0.0;
    std::uint64_t iteration = 0;
};

struct DigestEntry {
    RobotId id = 0;
    Vec relative;  // listed neighbor relative to the digest's sender
};

/// The sender's current 1-hop list.
struct DigestPayload {
    std::vector<DigestEntry> neighbors;
};

using FloodPayload = pi::FloodPayload;

using Payload = std::variant<BeaconPayload, DigestPayload, FloodPayload>;

struct Message {
    MessageKind kind = MessageKind::Beacon;
    RobotId sender = 0;
    RobotId origin = 0;
    std::uint64_t origin_iteration = 0;
    std::uint32_t hop_count = 0;
    Payload payload;
};

/// A message as seen by one receiver. `bearing` is the sender's position
/// relative to the receiver at transmission time (situated communication).
struct Delivery {
    Message message;
    Vec bearing;
    RobotId receiver = 0;
    Tick sent_tick = 0;
};

/// One attempted link transmission, delivered or lost.
struct Transmission {
    Tick sent_tick = 0;
    RobotId sender = 0;
    RobotId receiver = 0;
    MessageKind kind = MessageKind::Beacon;
    RobotId origin = 0;
    std::uint64_t origin_iteration = 0;
    std::uint32_t hop_count = 0;
    bool delivered = false;
};

/// Double-buffered per-robot inboxes.
class Mailboxes {
public:
    explicit Mailboxes(std::size_t n);

    /// Makes everything enqueued since the previous call readable and
    /// discards the previously readable batch.
    void deliver();

    [[nodiscard]] std::span<const Delivery> inbox(RobotId id) const;
    void enqueue(Delivery delivery);

    void set_alive(RobotId id, bool alive);
    [[nodiscard]] bool alive(RobotId id) const { return alive_.at(id) != 0; }
    [[nodiscard]] std::size_t size() const { return alive_.size(); }

private:
    std::vector<std::vector<Delivery>> current_;
    std::vector<std::vector<Delivery>> pending_;
    std::vector<char> alive_;
};

/// Enqueues `msg` for every alive robot within comm_range of the sender that
/// survives an independent Bernoulli(1 - drop_prob) trial. Receivers are
/// visited in id order so a seeded `rng` gives a reproducible trace.
std::vector<RobotId> broadcast(Mailboxes& boxes, RobotId sender, const Message& msg,
                               const oracle::GraphSnapshot& world, const RadioModel& radio,
                               std::mt19937_64& rng, Tick now,
                               std::vector<Transmission>* log = nullptr);

/// (round_id, origin) pairs already relayed by an agent.
using FloodSeen = std::set<std::pair<std::uint64_t, RobotId>>;

/// Floods not seen before and still under the hop budget, re-addressed from
/// `self` with hop_count + 1. Throws if radio.max_hops < 1.
std::vector<Message> relay_flood(RobotId self, std::span<const Message> floods, FloodSeen& seen,
                                 const RadioModel& radio);

struct OneHopEntry {
    Vec relative;  // neighbor position relative to the owner
    double fiedler = 0.0;
    Tick last_heard = 0;
    std::uint64_t origin_iteration = 0;
};

struct RelayReport {
    Vec relative;  // 2-hop node relative to the owner, through this relay
    Tick heard = 0;
};

struct TwoHopEntry {
    std::map<RobotId, RelayReport> relays;
    Tick last_heard = 0;

    /// Mean of the relays' position reports.
    [[nodiscard]] Vec relative() const;
};

struct NeighborTable {
    RobotId self = 0;
    std::map<RobotId, OneHopEntry> one_hop;
    std::map<RobotId, TwoHopEntry> two_hop;
    std::uint64_t malformed = 0;
};

/// Kind matches payload, vectors have `dim` finite components.
bool well_formed(const Delivery& delivery, int dim);

/// Beacons refresh 1-hop entries, digests replace their sender's 2-hop
/// reports, anything silent for more than `ttl` ticks is evicted, and ids
/// known as 1-hop are removed from the 2-hop map.
NeighborTable update_neighbor_table(NeighborTable table, std::span<const Delivery> inbox, Tick now,
                                    Tick ttl, int dim);

}  // namespace swarmconn::net
