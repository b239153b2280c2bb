#include "swarmconn/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace swarmconn::harness {
namespace {

namespace fs = std::filesystem;

Vec v2(double x, double y) { return Vec{{x, y}}; }

ScenarioConfig fixed(std::vector<Vec> positions, Tick ticks) {
    ScenarioConfig c;
    c.n = positions.size();
    c.ticks = ticks;
    c.placement.mode = PlacementMode::Explicit;
    c.placement.positions = std::move(positions);
    return c;
}

ScenarioConfig static_triangle(double drop, Tick ticks) {
    auto c = fixed({v2(20, 20), v2(30, 20), v2(25, 28)}, ticks);
    c.gains = {0, 0, 0};
    c.radio.drop_prob = drop;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("swarmconn_test_" + name);
    fs::remove_all(dir);
    return dir;
}

TEST(Run, StaticTriangleEstimatesConverge) {
    RunOptions opt;
    opt.keep_metrics = true;
    const auto r = run(static_triangle(0.0, 600), opt);
    const auto& last = r.metrics.back();
    for (std::size_t i = 0; i < 3; ++i) {
        ASSERT_FALSE(std::isnan(last.lambda2_est[i]));
        EXPECT_NEAR(last.lambda2_est[i], last.lambda2_true, 0.05 * last.lambda2_true);
    }
    EXPECT_DOUBLE_EQ(r.summary.connectivity_held_fraction, 1.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(last.positions[i], r.final_robots[i].position);
}

TEST(Run, TotalLossEmptiesTables) {
    RunOptions opt;
    opt.keep_metrics = true;
    const auto r = run(static_triangle(1.0, 20), opt);
    for (const auto& m : r.metrics)
        for (auto c : m.one_hop) EXPECT_EQ(c, 0u);
}

TEST(Run, OutOfRangePairNeverConnected) {
    auto c = fixed({v2(5, 5), v2(40, 40)}, 50);
    RunOptions opt;
    opt.keep_metrics = true;
    const auto r = run(c, opt);
    for (const auto& m : r.metrics) {
        EXPECT_FALSE(m.connected);
        EXPECT_EQ(m.lambda2_true, 0.0);
    }
}

TEST(Run, LastOriginIterationTracksSenders) {
    RunOptions opt;
    opt.keep_metrics = true;
    const auto r = run(static_triangle(0.0, 30), opt);
    const auto& last = r.metrics.back().last_origin_iteration;
    EXPECT_GT(last[0][1], 20);
    EXPECT_GT(last[2][1], 20);
}

TEST(Run, RecencyWithinHopWindow) {
    ScenarioConfig c;
    c.n = 10;
    c.ticks = 200;
    const auto r = run(c, RunOptions{std::nullopt, true, false});
    // (receiver, origin) -> (best origin_iteration so far, tick it arrived)
    std::map<std::pair<RobotId, RobotId>, std::pair<std::uint64_t, Tick>> best;
    const auto window = static_cast<Tick>(resolved(c).radio.max_hops);
    for (const auto& t : r.messages) {
        if (!t.delivered) continue;
        auto [it, fresh] = best.try_emplace({t.receiver, t.origin}, t.origin_iteration, t.sent_tick);
        if (fresh) continue;
        if (t.origin_iteration >= it->second.first) {
            it->second = {t.origin_iteration, t.sent_tick};
        } else {
            EXPECT_LE(t.sent_tick - it->second.second, window);
        }
    }
}

TEST(Run, FilesAndSchemas) {
    const auto dir = scratch("files");
    auto c = static_triangle(0.1, 40);
    RunOptions opt;
    opt.out_dir = dir;
    run(c, opt);
    for (const auto& name : artifact_names()) EXPECT_TRUE(fs::exists(dir / name)) << name;

    std::ifstream metrics(dir / "metrics.csv");
    std::string line;
    std::getline(metrics, line);
    EXPECT_EQ(line, "# swarmconn metrics v1");
    std::getline(metrics, line);
    EXPECT_EQ(line.rfind("tick,lambda2_true,connected,min_distance,max_distance,alive_count,alive_0,", 0), 0u);
    int rows = 0;
    while (std::getline(metrics, line)) ++rows;
    EXPECT_EQ(rows, 40);

    std::ifstream traj(dir / "trajectories.csv");
    std::getline(traj, line);
    std::getline(traj, line);
    EXPECT_EQ(line, "tick,robot,alive,x,y");
    rows = 0;
    while (std::getline(traj, line)) ++rows;
    EXPECT_EQ(rows, 120);

    std::ifstream msgs(dir / "messages.csv");
    std::getline(msgs, line);
    EXPECT_EQ(line, "# swarmconn messages v1");
    std::getline(msgs, line);
    EXPECT_EQ(line, "sent_tick,sender,receiver,kind,origin,origin_iteration,hop_count,delivered");

    const auto reloaded = load_config(dir / "config.ini");
    EXPECT_EQ(to_ini(reloaded), to_ini(resolved(c)));
    EXPECT_NE(slurp(dir / "summary.txt").find("connectivity_held_fraction = "), std::string::npos);
    fs::remove_all(dir);
}

TEST(Run, SameSeedSameBytes) {
    ScenarioConfig c;
    c.n = 8;
    c.ticks = 150;
    c.radio.drop_prob = 0.2;
    c.failure.mtbf = 20.0;
    c.seed = 77;
    const auto a = scratch("det_a"), b = scratch("det_b");
    run(c, RunOptions{a});
    run(c, RunOptions{b});
    for (const auto& name : artifact_names()) EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    c.seed = 78;
    const auto other = scratch("det_c");
    run(c, RunOptions{other});
    EXPECT_NE(slurp(a / "trajectories.csv"), slurp(other / "trajectories.csv"));
    for (const auto& d : {a, b, other}) fs::remove_all(d);
}

TEST(Placement, RandomStartIsConnectedAndInsideSpawnBox) {
    ScenarioConfig c;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        c.seed = seed;
        const auto p = initial_positions(resolved(c));
        ASSERT_EQ(p.size(), 20u);
        for (const auto& x : p) {
            EXPECT_GE(x.minCoeff(), 15.0);
            EXPECT_LE(x.maxCoeff(), 35.0);
        }
        EXPECT_TRUE(oracle::is_connected(oracle::build_graph(p, c.radio, c.weights)));
    }
    c.n = 20;
    c.arena = {500.0, 500.0};
    c.placement.spawn.clear();
    c.placement.max_attempts = 3;
    EXPECT_THROW(initial_positions(resolved(c)), std::runtime_error);
}

net::Transmission digest(Tick t, RobotId s, RobotId r, bool ok) {
    return net::Transmission{t, s, r, net::MessageKind::Digest, s, 0, 0, ok};
}

TEST(GapRatios, HandBuiltLog) {
    // receiver 0 hears senders 1 and 2 over 4 ticks:
    // t0 both, t1 misses 1, t2 misses both, t3 misses 2
    const std::vector<net::Transmission> log{
        digest(0, 1, 0, true),  digest(0, 2, 0, true),  digest(1, 1, 0, false), digest(1, 2, 0, true),
        digest(2, 1, 0, false), digest(2, 2, 0, false), digest(3, 1, 0, true),  digest(3, 2, 0, false),
        net::Transmission{3, 1, 0, net::MessageKind::Beacon, 1, 0, 0, false},
    };
    const auto g = gap_ratios(log);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].ticks, 4u);
    ASSERT_EQ(g[0].senders.size(), 2u);
    EXPECT_DOUBLE_EQ(g[0].senders[0].miss_ratio, 0.5);
    EXPECT_DOUBLE_EQ(g[0].senders[1].miss_ratio, 0.5);
    EXPECT_DOUBLE_EQ(g[0].exactly_one_ratio, 0.5);
    EXPECT_DOUBLE_EQ(g[0].none_ratio, 0.25);
    // indicators (0,1,1,0) and (0,0,1,1): covariance 0.
    ASSERT_EQ(g[0].correlations.size(), 1u);
    EXPECT_NEAR(g[0].correlations[0].correlation, 0.0, 1e-15);
}

TEST(GapRatios, ConstantIndicatorHasZeroCorrelation) {
    const std::vector<net::Transmission> log{digest(0, 1, 0, true), digest(0, 2, 0, false),
                                             digest(1, 1, 0, false), digest(1, 2, 0, false)};
    EXPECT_EQ(gap_ratios(log)[0].correlations[0].correlation, 0.0);
}

TEST(GapRatios, LosslessTriangleIsZero) {
    const auto r = run(static_triangle(0.0, 200), RunOptions{std::nullopt, true, false});
    ASSERT_EQ(r.summary.gaps.size(), 3u);
    for (const auto& g : r.summary.gaps) {
        EXPECT_EQ(g.exactly_one_ratio, 0.0);
        EXPECT_EQ(g.none_ratio, 0.0);
        for (const auto& s : g.senders) EXPECT_EQ(s.miss_ratio, 0.0);
    }
}

TEST(GapRatios, QuarterLossMatchesBernoulli) {
    const auto r = run(static_triangle(0.25, 3000), RunOptions{std::nullopt, true, false});
    for (const auto& g : r.summary.gaps)
        for (const auto& s : g.senders) EXPECT_NEAR(s.miss_ratio, 0.25, 0.02);
}

}  // namespace
}  // namespace swarmconn::harness
