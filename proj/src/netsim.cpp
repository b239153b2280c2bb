#include "swarmconn/netsim.hpp"

#include <cmath>
#include <stdexcept>

namespace swarmconn::net {

const char* kind_name(MessageKind kind) {
    switch (kind) {
        case MessageKind::Beacon: return "beacon";
        case MessageKind::Digest: return "digest";
        case MessageKind::Flood: return "flood";
    }
    return "unknown";
}

Mailboxes::Mailboxes(std::size_t n) : current_(n), pending_(n), alive_(n, 1) {}

void Mailboxes::deliver() {
    for (std::size_t i = 0; i < current_.size(); ++i) {
        current_[i].clear();
        std::swap(current_[i], pending_[i]);
        if (!alive_[i]) current_[i].clear();
    }
}

std::span<const Delivery> Mailboxes::inbox(RobotId id) const { return current_.at(id); }

void Mailboxes::enqueue(Delivery delivery) {
    pending_.at(delivery.receiver).push_back(std::move(delivery));
}

void Mailboxes::set_alive(RobotId id, bool alive) {
    alive_.at(id) = alive ? 1 : 0;
    if (!alive) {
        current_[id].clear();
        pending_[id].clear();
    }
}

std::vector<RobotId> broadcast(Mailboxes& boxes, RobotId sender, const Message& msg,
                               const oracle::GraphSnapshot& world, const RadioModel& radio,
                               std::mt19937_64& rng, Tick now, std::vector<Transmission>* log) {
    std::vector<RobotId> reached;
    if (!boxes.alive(sender)) return reached;
    std::bernoulli_distribution survives(1.0 - radio.drop_prob);
    const Vec& origin = world.positions.at(sender);
    for (RobotId r = 0; r < world.n; ++r) {
        if (r == sender || !boxes.alive(r)) continue;
        const Vec bearing = origin - world.positions[r];
        if (bearing.norm() > radio.comm_range) continue;
        const bool ok = survives(rng);
        if (log) {
            log->push_back(Transmission{now, sender, r, msg.kind, msg.origin, msg.origin_iteration,
                                        msg.hop_count, ok});
        }
        if (!ok) continue;
        boxes.enqueue(Delivery{msg, bearing, r, now});
        reached.push_back(r);
    }
    return reached;
}

std::vector<Message> relay_flood(RobotId self, std::span<const Message> floods, FloodSeen& seen,
                                 const RadioModel& radio) {
    if (radio.max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");
    std::vector<Message> out;
    for (const auto& msg : floods) {
        const auto* payload = std::get_if<FloodPayload>(&msg.payload);
        if (msg.kind != MessageKind::Flood || payload == nullptr) continue;
        if (!seen.emplace(payload->round_id, payload->origin).second) continue;
        if (msg.hop_count >= static_cast<std::uint32_t>(radio.max_hops)) continue;
        Message relayed = msg;
        relayed.sender = self;
        relayed.hop_count = msg.hop_count + 1;
        out.push_back(std::move(relayed));
    }
    return out;
}

Vec TwoHopEntry::relative() const {
    Vec sum = relays.begin()->second.relative;
    for (auto it = std::next(relays.begin()); it != relays.end(); ++it) sum += it->second.relative;
    return sum / static_cast<double>(relays.size());
}

namespace {

bool valid_vec(const Vec& v, int dim) { return v.size() == dim && v.allFinite(); }

}  // namespace

bool well_formed(const Delivery& d, int dim) {
    const auto& m = d.message;
    if (!valid_vec(d.bearing, dim)) return false;
    switch (m.kind) {
        case MessageKind::Beacon: {
            const auto* p = std::get_if<BeaconPayload>(&m.payload);
            return p && valid_vec(p->position, dim) && std::isfinite(p->fiedler);
        }
        case MessageKind::Digest: {
            const auto* p = std::get_if<DigestPayload>(&m.payload);
            if (!p) return false;
            for (const auto& e : p->neighbors)
                if (!valid_vec(e.relative, dim)) return false;
            return true;
        }
        case MessageKind::Flood: {
            const auto* p = std::get_if<FloodPayload>(&m.payload);
            return p && std::isfinite(p->x) && std::isfinite(p->x2) && std::isfinite(p->xlx);
        }
    }
    return false;
}

NeighborTable update_neighbor_table(NeighborTable table, std::span<const Delivery> inbox, Tick now,
                                    Tick ttl, int dim) {
    // Beacons first so that digests see this tick's 1-hop view.
    for (const auto& d : inbox) {
        if (!well_formed(d, dim)) {
            ++table.malformed;
            continue;
        }
        if (d.message.kind != MessageKind::Beacon || d.message.sender == table.self) continue;
        const auto& beacon = std::get<BeaconPayload>(d.message.payload);
        table.one_hop[d.message.sender] =
            OneHopEntry{d.bearing, beacon.fiedler, now, d.message.origin_iteration};
    }
    for (const auto& d : inbox) {
        if (d.message.kind != MessageKind::Digest || !well_formed(d, dim)) continue;
        const RobotId relay = d.message.sender;
        if (relay == table.self) continue;
        for (auto& [id, entry] : table.two_hop) entry.relays.erase(relay);
        for (const auto& e : std::get<DigestPayload>(d.message.payload).neighbors) {
            if (e.id == table.self || e.id == relay) continue;
            auto& entry = table.two_hop[e.id];
            entry.relays[relay] = RelayReport{d.bearing + e.relative, now};
            entry.last_heard = now;
        }
    }

    std::erase_if(table.one_hop, [&](const auto& kv) { return now - kv.second.last_heard > ttl; });
    for (auto it = table.two_hop.begin(); it != table.two_hop.end();) {
        auto& relays = it->second.relays;
        std::erase_if(relays, [&](const auto& kv) { return now - kv.second.heard > ttl; });
        if (relays.empty() || table.one_hop.contains(it->first)) {
            it = table.two_hop.erase(it);
        } else {
            ++it;
        }
    }
    return table;
}

}  // namespace swarmconn::net
