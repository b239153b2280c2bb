#include "swarmconn/agent.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

namespace swarmconn::agent {
namespace {

Vec v2(double x, double y) { return Vec{{x, y}}; }

ScenarioConfig config_with(control::Gains gains) {
    ScenarioConfig c;
    c.gains = gains;
    return resolved(c);
}

net::Delivery beacon(RobotId from, RobotId to, const Vec& from_pos, const Vec& to_pos, double x = 0.0) {
    net::Message m;
    m.kind = net::MessageKind::Beacon;
    m.sender = m.origin = from;
    m.payload = net::BeaconPayload{from_pos, x, 0};
    return net::Delivery{m, from_pos - to_pos, to, 0};
}

int count_kind(const std::vector<net::Message>& out, net::MessageKind kind) {
    int n = 0;
    for (const auto& m : out) n += m.kind == kind;
    return n;
}

TEST(Step, LoneRobotStaysPut) {
    const auto cfg = config_with({});
    auto r = make_robot(0, v2(25, 25), cfg);
    for (Tick t = 0; t < 50; ++t) {
        StepReport rep;
        const auto out = step(r, {}, cfg, t, &rep);
        EXPECT_EQ(rep.velocity, Vec::Zero(2));
        EXPECT_EQ(count_kind(out, net::MessageKind::Beacon), 1);
        EXPECT_EQ(count_kind(out, net::MessageKind::Digest), 1);
    }
    EXPECT_EQ(r.position, v2(25, 25));
}

TEST(Step, CoverageRepelsInsideEquilibrium) {
    const auto cfg = config_with({0, 0, 1});
    ASSERT_GT(control::lj_equilibrium(cfg.lj), 5.0);
    auto r = make_robot(0, v2(25, 25), cfg);
    const std::vector<net::Delivery> inbox{beacon(1, 0, v2(30, 25), v2(25, 25))};
    StepReport rep;
    step(r, inbox, cfg, 1, &rep);
    EXPECT_LT(r.position(0), 25.0);
    EXPECT_NEAR(r.position(1), 25.0, 1e-12);
}

TEST(Step, DisplacementBoundedBySpeedLimit) {
    const auto cfg = config_with({1, 1, 1});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-15.0, 15.0), x(-1.0, 1.0);
    auto r = make_robot(0, v2(25, 25), cfg);
    for (Tick t = 0; t < 200; ++t) {
        std::vector<net::Delivery> inbox;
        for (RobotId j = 1; j < 5; ++j) inbox.push_back(beacon(j, 0, r.position + v2(u(rng), u(rng)), r.position, x(rng)));
        const Vec before = r.position;
        step(r, inbox, cfg, t);
        EXPECT_LE((r.position - before).norm(), cfg.v_max * cfg.dt + 1e-12);
    }
}

TEST(Step, ZeroGainsNeverMove) {
    const auto cfg = config_with({0, 0, 0});
    auto r = make_robot(0, v2(10, 10), cfg);
    for (Tick t = 0; t < 100; ++t) step(r, std::vector<net::Delivery>{beacon(1, 0, v2(12, 10), v2(10, 10), 0.4)}, cfg, t);
    EXPECT_EQ(r.position, v2(10, 10));
}

TEST(Step, ClampsToArena) {
    const auto cfg = config_with({0, 0, 1});
    auto r = make_robot(0, v2(0, 25), cfg);
    step(r, std::vector<net::Delivery>{beacon(1, 0, v2(3, 25), v2(0, 25))}, cfg, 1);
    EXPECT_EQ(r.position(0), 0.0);
    const std::vector<double> arena{50.0, 50.0};
    EXPECT_EQ(clamp_to_arena(v2(-1, 60), arena), v2(0, 50));
}

TEST(Step, NonFiniteStateFreezesAndCounts) {
    const auto cfg = config_with({0, 0, 1});
    auto r = make_robot(0, v2(25, 25), cfg);
    r.pi.x = std::numeric_limits<double>::quiet_NaN();
    StepReport rep;
    const auto out = step(r, std::vector<net::Delivery>{beacon(1, 0, v2(30, 25), v2(25, 25))}, cfg, 1, &rep);
    EXPECT_TRUE(rep.faulted);
    EXPECT_EQ(r.faults, 1u);
    EXPECT_EQ(r.position, v2(25, 25));
    EXPECT_TRUE(std::isfinite(r.pi.x));
    for (const auto& m : out)
        if (m.kind == net::MessageKind::Beacon) EXPECT_TRUE(std::isfinite(std::get<net::BeaconPayload>(m.payload).fiedler));
}

TEST(Step, DeadRobotIsSilent) {
    const auto cfg = config_with({});
    auto r = make_robot(0, v2(25, 25), cfg);
    r.alive = false;
    EXPECT_TRUE(step(r, std::vector<net::Delivery>{beacon(1, 0, v2(30, 25), v2(25, 25))}, cfg, 1).empty());
    EXPECT_EQ(r.position, v2(25, 25));
}

TEST(Step, DigestPeriod) {
    auto c = ScenarioConfig{};
    c.digest_period = 3;
    const auto cfg = resolved(c);
    auto r = make_robot(0, v2(25, 25), cfg);
    int digests = 0;
    for (Tick t = 0; t < 9; ++t)
        digests += count_kind(step(r, {}, cfg, t), net::MessageKind::Digest);
    EXPECT_EQ(digests, 3);
}

TEST(Streams, IndependentPerRobotAndSeed) {
    auto a = robot_stream(1, 0), b = robot_stream(1, 1), c = robot_stream(2, 0), d = robot_stream(1, 0);
    const auto x = a();
    EXPECT_NE(x, b());
    EXPECT_NE(x, c());
    EXPECT_EQ(x, d());
}

TEST(Failures, NoneMeansNoDeaths) {
    const auto cfg = config_with({});
    std::vector<RobotState> team;
    for (RobotId i = 0; i < 10; ++i) team.push_back(make_robot(i, v2(i, 0), cfg));
    std::mt19937_64 rng(1);
    for (int t = 0; t < 1000; ++t) EXPECT_TRUE(inject_failures(team, FailureModel{}, 0.1, rng).empty());
    for (int t = 0; t < 1000; ++t) EXPECT_TRUE(inject_failures(team, FailureModel{1e300}, 0.1, rng).empty());
}

TEST(Failures, ExponentialDeathRate) {
    // mtbf 100 s at dt 0.1 s: 1 - exp(-1e-3) per robot-tick.
    const auto cfg = config_with({});
    std::vector<RobotState> team(10000);
    for (RobotId i = 0; i < team.size(); ++i) team[i].id = i;
    std::mt19937_64 rng(2024);
    std::uint64_t deaths = 0, exposure = 0;
    for (int t = 0; t < 100; ++t) {
        for (const auto& r : team) exposure += r.alive;
        deaths += inject_failures(team, FailureModel{100.0}, 0.1, rng).size();
    }
    EXPECT_NEAR(static_cast<double>(deaths) / static_cast<double>(exposure), 1e-3, 1e-4);
    std::size_t dead = 0;
    for (const auto& r : team) dead += !r.alive;
    EXPECT_EQ(dead, deaths);
}

}  // namespace
}  // namespace swarmconn::agent
