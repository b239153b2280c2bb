#include "swarmconn/agent.hpp"

#include <algorithm>
#include <cmath>

namespace swarmconn::agent {

namespace {

Vec zeros(int dim) { return Vec::Zero(dim); }

}  // namespace

std::mt19937_64 robot_stream(std::uint64_t seed, RobotId id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id), 0x5eedu};
    return std::mt19937_64(seq);
}

RobotState make_robot(RobotId id, const Vec& position, const ScenarioConfig& cfg) {
    RobotState r;
    r.id = id;
    r.position = position;
    r.rng = robot_stream(cfg.seed, id);
    r.pi = pi::make_state(cfg.pi.alpha, r.rng);
    r.table.self = id;
    return r;
}

Vec clamp_to_arena(Vec position, std::span<const double> arena) {
    for (Eigen::Index d = 0; d < position.size(); ++d)
        position(d) = std::clamp(position(d), 0.0, arena[static_cast<std::size_t>(d)]);
    return position;
}

std::vector<net::Message> step(RobotState& robot, std::span<const net::Delivery> inbox,
                               const ScenarioConfig& cfg, Tick now, StepReport* report) {
    std::vector<net::Message> outbox;
    if (!robot.alive) return outbox;
    const int dim = cfg.dim;
    StepReport local;
    StepReport& rep = report ? *report : local;
    rep = StepReport{zeros(dim), zeros(dim), zeros(dim), zeros(dim), false, false};

    robot.table = net::update_neighbor_table(std::move(robot.table), inbox, now, cfg.staleness_ttl, dim);

    // Floods: absorb the current round, relay unseen ones.
    std::vector<net::Message> floods;
    for (const auto& d : inbox) {
        if (d.message.kind != net::MessageKind::Flood || !net::well_formed(d, dim)) continue;
        const auto& payload = std::get<net::FloodPayload>(d.message.payload);
        if (payload.round_id < robot.flood_acc.round_id) continue;
        robot.flood_acc = pi::absorb_flood(std::move(robot.flood_acc), payload);
        floods.push_back(d.message);
    }
    auto relays = net::relay_flood(robot.id, floods, robot.flood_seen, cfg.radio);
    if (robot.flood_acc.round_id > 0) {
        const auto oldest = robot.flood_acc.round_id;
        robot.flood_seen.erase(robot.flood_seen.begin(),
                               robot.flood_seen.lower_bound({oldest, RobotId{0}}));
    }

    // Power iteration row, using the neighbors' last broadcast entries.
    std::vector<pi::NeighborEntry> entries;
    std::vector<control::ConnectivityNeighbor> conn;
    std::vector<Vec> relative;
    entries.reserve(robot.table.one_hop.size());
    double degree = 0.0;
    for (const auto& [id, e] : robot.table.one_hop) {
        const double w = link_weight(e.relative.norm(), cfg.radio.comm_range, cfg.weights);
        degree += w;
        entries.push_back({w, e.fiedler});
        conn.push_back({e.fiedler, e.relative});
        relative.push_back(e.relative);
    }
    double lx = pi::laplacian_row_product(robot.pi.x, degree, entries);

    auto open_flood = [&](const pi::FloodPayload& payload) {
        robot.flood_acc = pi::absorb_flood(std::move(robot.flood_acc), payload);
        robot.flood_seen.emplace(payload.round_id, robot.id);
        outbox.push_back(net::Message{net::MessageKind::Flood, robot.id, robot.id, robot.pi.iteration, 0,
                                      payload});
    };

    const bool periodic = robot.pi.iteration > 0 && robot.pi.iteration % cfg.pi.period == 0;
    if (robot.flood_acc.round_id > robot.pi.round_id) {
        open_flood(pi::join_round(robot.pi, robot.id, lx, robot.flood_acc.round_id));
    } else if (periodic || robot.pi.unstable) {
        if (robot.flood_acc.count > 0) {
            const auto map = pi::correction_map(robot.flood_acc);
            robot.pi = pi::apply_correction(robot.pi, robot.flood_acc, robot.rng);
            rep.corrected = true;
            if (map.collapsed) {
                ++robot.degeneracy.collapsed_rounds;
                lx = 0.0;
            } else {
                // Every agent applies the same affine map this tick; L kills
                // the shift, so the row product only scales.
                lx *= map.scale;
                for (auto& c : conn) c.fiedler = map.scale * (c.fiedler - map.shift);
            }
        }
        open_flood(pi::begin_correction(robot.pi, robot.id, lx));
    }

    // Control law.
    control::Degeneracy flags;
    if (robot.pi.has_estimate) {
        const double lambda = pi::estimate_lambda2(robot.pi, cfg.vparams.epsilon_lambda);
        rep.uc = control::connectivity_contribution(lambda, robot.pi.x, conn, cfg.radio.comm_range,
                                                    cfg.weights, cfg.vparams, dim, &flags);
    }
    rep.ur = control::robustness_contribution(robot.table, cfg.robustness, dim, &flags);
    rep.ulj = control::coverage_contribution(relative, cfg.lj, dim);
    robot.degeneracy.coincident_neighbors += static_cast<std::uint64_t>(flags.coincident_neighbors);
    if (flags.barycentre_at_self) ++robot.degeneracy.barycentre_at_self;

    robot.pi = pi::pi_advance(robot.pi, lx);
    if (!std::isfinite(robot.pi.x)) {
        robot.pi.x = std::uniform_real_distribution<double>(-1.0, 1.0)(robot.rng);
        rep.faulted = true;
    }

    Vec u = control::combine(rep.uc, rep.ur, rep.ulj, cfg.gains, cfg.v_max);
    if (!u.allFinite()) rep.faulted = true;
    if (rep.faulted) u = zeros(dim);
    if (rep.faulted) ++robot.faults;
    rep.velocity = u;
    robot.position = clamp_to_arena(robot.position + u * cfg.dt, cfg.arena);

    outbox.push_back(net::Message{net::MessageKind::Beacon, robot.id, robot.id, robot.pi.iteration, 0,
                                  net::BeaconPayload{robot.position, robot.pi.x, robot.pi.iteration}});
    if (now % cfg.digest_period == 0) {
        net::DigestPayload digest;
        for (const auto& [id, e] : robot.table.one_hop) digest.neighbors.push_back({id, e.relative});
        outbox.push_back(net::Message{net::MessageKind::Digest, robot.id, robot.id, robot.pi.iteration, 0,
                                      std::move(digest)});
    }
    for (auto& m : relays) outbox.push_back(std::move(m));
    return outbox;
}

std::vector<RobotId> inject_failures(std::span<RobotState> team, const FailureModel& model, double dt,
                                     std::mt19937_64& rng) {
    std::vector<RobotId> died;
    if (!model.mtbf) return died;
    const double p = 1.0 - std::exp(-dt / *model.mtbf);
    std::bernoulli_distribution dies(p);
    for (auto& r : team) {
        if (!r.alive) continue;
        if (dies(rng)) {
            r.alive = false;
            died.push_back(r.id);
        }
    }
    return died;
}

}  // namespace swarmconn::agent
