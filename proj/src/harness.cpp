#include "swarmconn/harness.hpp"

#include "swarmconn/wire.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace swarmconn::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kConnectedLambda = 1e-9;

std::mt19937_64 harness_stream(std::uint64_t seed, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag,
                      0xc0ffeeu};
    return std::mt19937_64(seq);
}

enum StreamTag : std::uint32_t { kPlacement = 1, kNetwork = 2, kFailure = 3 };

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double pearson(const std::vector<int>& x, const std::vector<int>& y) {
    const auto n = static_cast<double>(x.size());
    if (x.empty()) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::vector<GapRatios> gap_ratios(std::span<const net::Transmission> log) {
    // receiver -> tick -> sender -> missed
    std::map<RobotId, std::map<Tick, std::map<RobotId, bool>>> attempts;
    for (const auto& t : log) {
        if (t.kind != net::MessageKind::Digest) continue;
        attempts[t.receiver][t.sent_tick][t.sender] = !t.delivered;
    }

    std::vector<GapRatios> out;
    for (const auto& [receiver, by_tick] : attempts) {
        GapRatios g;
        g.receiver = receiver;
        g.ticks = by_tick.size();
        std::map<RobotId, SenderGap> senders;
        std::uint64_t exactly_one = 0, none = 0;
        for (const auto& [tick, row] : by_tick) {
            std::size_t missed = 0;
            for (const auto& [sender, miss] : row) {
                auto& s = senders[sender];
                s.sender = sender;
                ++s.expected;
                if (miss) {
                    ++s.missed;
                    ++missed;
                }
            }
            if (missed == 1) ++exactly_one;
            if (missed == row.size()) ++none;
        }
        for (auto& [id, s] : senders) {
            s.miss_ratio = static_cast<double>(s.missed) / static_cast<double>(s.expected);
            g.senders.push_back(s);
        }
        g.exactly_one_ratio = static_cast<double>(exactly_one) / static_cast<double>(g.ticks);
        g.none_ratio = static_cast<double>(none) / static_cast<double>(g.ticks);

        for (auto a = senders.begin(); a != senders.end(); ++a) {
            for (auto b = std::next(a); b != senders.end(); ++b) {
                std::vector<int> xa, xb;
                for (const auto& [tick, row] : by_tick) {
                    const auto ia = row.find(a->first);
                    const auto ib = row.find(b->first);
                    if (ia == row.end() || ib == row.end()) continue;
                    xa.push_back(ia->second ? 1 : 0);
                    xb.push_back(ib->second ? 1 : 0);
                }
                g.correlations.push_back({a->first, b->first, pearson(xa, xb)});
            }
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<Vec> initial_positions(const ScenarioConfig& cfg) {
    if (cfg.placement.mode == PlacementMode::Explicit) return cfg.placement.positions;
    auto rng = harness_stream(cfg.seed, kPlacement);
    for (int attempt = 0; attempt < cfg.placement.max_attempts; ++attempt) {
        std::vector<Vec> positions;
        for (std::size_t i = 0; i < cfg.n; ++i) {
            Vec p(cfg.dim);
            for (int d = 0; d < cfg.dim; ++d) {
                const auto axis = static_cast<std::size_t>(d);
                const double extent = cfg.arena[axis];
                const auto& spawn = cfg.placement.spawn;
                const double box = axis < spawn.size() && spawn[axis] > 0.0 ? std::min(spawn[axis], extent) : extent;
                const double lo = 0.5 * (extent - box);
                p(d) = std::uniform_real_distribution<double>(lo, lo + box)(rng);
            }
            positions.push_back(std::move(p));
        }
        if (!cfg.placement.require_connected) return positions;
        if (oracle::is_connected(oracle::build_graph(positions, cfg.radio, cfg.weights))) return positions;
    }
    throw std::runtime_error("no connected placement found within placement.max_attempts draws");
}

AliveGraph alive_graph(std::span<const agent::RobotState> team, const ScenarioConfig& cfg) {
    AliveGraph out;
    std::vector<Vec> positions;
    for (const auto& r : team) {
        if (!r.alive) continue;
        out.ids.push_back(r.id);
        positions.push_back(r.position);
    }
    out.graph = oracle::build_graph(positions, cfg.radio, cfg.weights);
    return out;
}

Simulation::Simulation(const ScenarioConfig& cfg)
    : cfg_(resolved(cfg)),
      boxes_(cfg.n),
      net_rng_(harness_stream(cfg.seed, kNetwork)),
      failure_rng_(harness_stream(cfg.seed, kFailure)),
      last_origin_(cfg.n, std::vector<std::int64_t>(cfg.n, -1)) {
    validate(cfg_);
    const auto start = initial_positions(cfg_);
    for (std::size_t i = 0; i < cfg_.n; ++i)
        robots_.push_back(agent::make_robot(static_cast<RobotId>(i), start[i], cfg_));
}

MetricsRecord Simulation::tick() {
    const Tick t = now_;
    for (RobotId id : agent::inject_failures(robots_, cfg_.failure, cfg_.dt, failure_rng_))
        boxes_.set_alive(id, false);
    boxes_.deliver();

    std::vector<std::vector<net::Message>> outboxes(robots_.size());
    for (auto& r : robots_) {
        if (!r.alive) continue;
        const auto inbox = boxes_.inbox(r.id);
        for (const auto& d : inbox)
            last_origin_[r.id][d.message.origin] = static_cast<std::int64_t>(d.message.origin_iteration);
        outboxes[r.id] = agent::step(r, inbox, cfg_, t);
    }

    oracle::GraphSnapshot world;
    world.n = robots_.size();
    world.comm_range = cfg_.radio.comm_range;
    for (const auto& r : robots_) world.positions.push_back(r.position);
    for (const auto& r : robots_) {
        for (const auto& msg : outboxes[r.id]) {
            if (trace_) wire::write_trace_record(*trace_, t, msg);
            net::broadcast(boxes_, r.id, msg, world, cfg_.radio, net_rng_, t, record_ ? &log_ : nullptr);
        }
    }

    MetricsRecord m;
    m.tick = t;
    for (const auto& r : robots_) {
        m.positions.push_back(r.position);
        m.alive.push_back(r.alive);
        m.lambda2_est.push_back(r.pi.has_estimate ? r.pi.lambda2_est : kNaN);
        m.one_hop.push_back(r.table.one_hop.size());
        m.two_hop.push_back(r.table.two_hop.size());
    }
    m.last_origin_iteration = last_origin_;
    const auto alive = alive_graph(robots_, cfg_);
    const auto& g = alive.graph;
    m.lambda2_true = g.n >= 2 ? oracle::fiedler(g).lambda2 : 0.0;
    m.connected = oracle::is_connected(g);
    if (g.n >= 2) {
        m.min_distance = std::numeric_limits<double>::infinity();
        m.max_distance = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            for (std::size_t j = i + 1; j < g.n; ++j) {
                const double d = (g.positions[i] - g.positions[j]).norm();
                m.min_distance = std::min(m.min_distance, d);
                m.max_distance = std::max(m.max_distance, d);
            }
        }
    } else {
        m.min_distance = m.max_distance = kNaN;
    }
    ++now_;
    return m;
}

const std::vector<std::string>& artifact_names() {
    static const std::vector<std::string> names = {"metrics.csv", "trajectories.csv", "messages.csv",
                                                   "summary.txt", "config.ini", "trace.bin"};
    return names;
}

namespace {

void write_metrics_header(std::ostream& out, std::size_t n) {
    out << "# swarmconn metrics v1\n";
    out << "tick,lambda2_true,connected,min_distance,max_distance,alive_count";
    for (std::size_t i = 0; i < n; ++i)
        out << ",alive_" << i << ",lambda2_est_" << i << ",one_hop_" << i << ",two_hop_" << i;
    out << "\n";
}

void write_metrics_row(std::ostream& out, const MetricsRecord& m) {
    const auto alive_count = std::count(m.alive.begin(), m.alive.end(), true);
    out << m.tick << ',' << num(m.lambda2_true) << ',' << (m.connected ? 1 : 0) << ',' << num(m.min_distance)
        << ',' << num(m.max_distance) << ',' << alive_count;
    for (std::size_t i = 0; i < m.alive.size(); ++i)
        out << ',' << (m.alive[i] ? 1 : 0) << ',' << num(m.lambda2_est[i]) << ',' << m.one_hop[i] << ','
            << m.two_hop[i];
    out << '\n';
}

void write_trajectories_header(std::ostream& out, int dim) {
    static const char* axes[] = {"x", "y", "z"};
    out << "# swarmconn trajectories v1\ntick,robot,alive";
    for (int d = 0; d < dim; ++d) out << ',' << axes[d];
    out << '\n';
}

void write_trajectory_rows(std::ostream& out, const MetricsRecord& m) {
    for (std::size_t i = 0; i < m.positions.size(); ++i) {
        out << m.tick << ',' << i << ',' << (m.alive[i] ? 1 : 0);
        for (Eigen::Index d = 0; d < m.positions[i].size(); ++d) out << ',' << num(m.positions[i](d));
        out << '\n';
    }
}

void write_messages(std::ostream& out, std::span<const net::Transmission> log) {
    out << "# swarmconn messages v1\n";
    out << "sent_tick,sender,receiver,kind,origin,origin_iteration,hop_count,delivered\n";
    for (const auto& t : log)
        out << t.sent_tick << ',' << t.sender << ',' << t.receiver << ',' << net::kind_name(t.kind) << ','
            << t.origin << ',' << t.origin_iteration << ',' << t.hop_count << ',' << (t.delivered ? 1 : 0)
            << '\n';
}

std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_summary(const Summary& s) {
    std::ostringstream os;
    os << "# swarmconn summary v1\n";
    os << "ticks = " << s.ticks << "\n";
    os << "connectivity_held_fraction = " << num(s.connectivity_held_fraction) << "\n";
    os << "mean_rel_lambda2_error = " << num(s.mean_rel_lambda2_error) << "\n";
    os << "lambda2_error_samples = " << s.lambda2_error_samples << "\n";
    os << "final_lambda2_true = " << num(s.final_lambda2_true) << "\n";
    os << "final_alive = " << s.final_alive << "\n";
    os << "faults = " << s.faults << "\n";
    os << "malformed = " << s.malformed << "\n";
    for (const auto& g : s.gaps) {
        const auto prefix = "gap." + std::to_string(g.receiver) + ".";
        os << prefix << "ticks = " << g.ticks << "\n";
        for (const auto& sg : g.senders)
            os << prefix << "miss_ratio." << sg.sender << " = " << num(sg.miss_ratio) << "\n";
        os << prefix << "exactly_one_ratio = " << num(g.exactly_one_ratio) << "\n";
        os << prefix << "none_ratio = " << num(g.none_ratio) << "\n";
        for (const auto& c : g.correlations)
            os << prefix << "correlation." << c.a << "." << c.b << " = " << num(c.correlation) << "\n";
    }
    return os.str();
}

RunResult run(const ScenarioConfig& cfg, const RunOptions& options) {
    Simulation sim(cfg);
    const bool record = options.record_messages || options.out_dir.has_value();
    sim.record_messages(record);

    std::ofstream metrics_out, traj_out, trace_out;
    if (options.out_dir) {
        std::filesystem::create_directories(*options.out_dir);
        metrics_out = open_output(*options.out_dir / "metrics.csv");
        traj_out = open_output(*options.out_dir / "trajectories.csv");
        trace_out = open_output(*options.out_dir / "trace.bin", true);
        write_metrics_header(metrics_out, sim.config().n);
        write_trajectories_header(traj_out, sim.config().dim);
        sim.set_trace(&trace_out);
    }

    RunResult result;
    Summary& s = result.summary;
    std::uint64_t connected_ticks = 0;
    double error_sum = 0.0;
    for (Tick t = 0; t < sim.config().ticks; ++t) {
        auto m = sim.tick();
        if (m.connected) ++connected_ticks;
        if (m.lambda2_true > kConnectedLambda) {
            for (std::size_t i = 0; i < m.alive.size(); ++i) {
                if (!m.alive[i] || std::isnan(m.lambda2_est[i])) continue;
                error_sum += std::abs(m.lambda2_est[i] - m.lambda2_true) / m.lambda2_true;
                ++s.lambda2_error_samples;
            }
        }
        s.final_lambda2_true = m.lambda2_true;
        if (options.out_dir) {
            write_metrics_row(metrics_out, m);
            write_trajectory_rows(traj_out, m);
        }
        if (options.keep_metrics) result.metrics.push_back(std::move(m));
    }

    s.ticks = sim.config().ticks;
    s.connectivity_held_fraction = static_cast<double>(connected_ticks) / static_cast<double>(s.ticks);
    s.mean_rel_lambda2_error = s.lambda2_error_samples ? error_sum / static_cast<double>(s.lambda2_error_samples) : kNaN;
    for (const auto& r : sim.robots()) {
        if (r.alive) ++s.final_alive;
        s.faults += r.faults;
        s.malformed += r.table.malformed;
    }
    if (record) s.gaps = gap_ratios(sim.messages());

    if (options.out_dir) {
        sim.set_trace(nullptr);
        auto messages_out = open_output(*options.out_dir / "messages.csv");
        write_messages(messages_out, sim.messages());
        auto summary_out = open_output(*options.out_dir / "summary.txt");
        summary_out << format_summary(s);
        auto config_out = open_output(*options.out_dir / "config.ini");
        config_out << "# swarmconn config v1\n" << to_ini(sim.config());
    }
    if (record) result.messages = sim.messages();
    result.final_robots = sim.robots();
    return result;
}

}  // namespace swarmconn::harness
