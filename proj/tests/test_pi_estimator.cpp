#include "swarmconn/pi_estimator.hpp"

#include "swarmconn/graph_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace swarmconn::pi {
namespace {

using oracle::GraphSnapshot;

PiState with_x(double x, double alpha) {
    PiState s;
    s.x = x;
    s.alpha = alpha;
    return s;
}

GraphSnapshot binary_graph(std::vector<Vec> p) {
    return oracle::build_graph(p, RadioModel{16.0, 0.0, 0}, WeightParams{WeightMode::Binary, 0.0});
}

GraphSnapshot path3() { return binary_graph({Vec{{0.0, 0.0}}, Vec{{10.0, 0.0}}, Vec{{20.0, 0.0}}}); }
GraphSnapshot triangle() { return binary_graph({Vec{{0.0, 0.0}}, Vec{{10.0, 0.0}}, Vec{{5.0, 8.0}}}); }

// Lossless synchronous team: every agent sees its neighbors' current entry
// and every correction round reaches everybody.
struct Team {
    GraphSnapshot g;
    std::vector<PiState> agents;
    std::mt19937_64 rng{99};

    Team(GraphSnapshot graph, double alpha) : g(std::move(graph)) {
        for (std::size_t i = 0; i < g.n; ++i) agents.push_back(make_state(alpha, rng));
    }

    std::vector<double> row_products() const {
        std::vector<double> lx(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            std::vector<NeighborEntry> nb;
            double degree = 0.0;
            for (std::size_t j = 0; j < g.n; ++j) {
                if (g.weights(i, j) <= 0.0) continue;
                nb.push_back({g.weights(i, j), agents[j].x});
                degree += g.weights(i, j);
            }
            lx[i] = laplacian_row_product(agents[i].x, degree, nb);
        }
        return lx;
    }

    void iterate(int steps) {
        for (int s = 0; s < steps; ++s) {
            const auto lx = row_products();
            for (std::size_t i = 0; i < g.n; ++i) agents[i] = pi_advance(agents[i], lx[i]);
        }
    }

    void correct() {
        const auto lx = row_products();
        FloodAccumulator acc;
        for (std::size_t i = 0; i < g.n; ++i)
            acc = absorb_flood(acc, begin_correction(agents[i], static_cast<RobotId>(i), lx[i]));
        for (auto& a : agents) a = apply_correction(a, acc, rng);
    }

    Eigen::VectorXd vector() const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(g.n));
        for (std::size_t i = 0; i < g.n; ++i) x(static_cast<Eigen::Index>(i)) = agents[i].x;
        return x;
    }
};

TEST(PiStep, SingleEdgeHalvesTheDifference) {
    // L = [[1,-1],[-1,1]], x = (1,-1): Lx = (2,-2), x - 0.25 Lx = (0.5,-0.5).
    const auto a = pi_step(with_x(1.0, 0.25), 1.0, std::vector<NeighborEntry>{{1.0, -1.0}});
    const auto b = pi_step(with_x(-1.0, 0.25), 1.0, std::vector<NeighborEntry>{{1.0, 1.0}});
    EXPECT_DOUBLE_EQ(a.x, 0.5);
    EXPECT_DOUBLE_EQ(b.x, -0.5);
    EXPECT_EQ(a.iteration, 1u);
}

TEST(PiStep, ConstantVectorIsFixed) {
    const auto s = pi_step(with_x(0.7, 0.2), 2.5, std::vector<NeighborEntry>{{1.0, 0.7}, {1.5, 0.7}});
    EXPECT_DOUBLE_EQ(s.x, 0.7);
}

TEST(PiStep, FiedlerVectorOfPathScales) {
    const auto g = path3();
    const auto f = oracle::fiedler(g).fiedler_vector;
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<NeighborEntry> nb;
        double degree = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (g.weights(i, j) > 0.0) {
                nb.push_back({g.weights(i, j), f(static_cast<Eigen::Index>(j))});
                degree += g.weights(i, j);
            }
        }
        const auto s = pi_step(with_x(f(static_cast<Eigen::Index>(i)), 0.1), degree, nb);
        EXPECT_NEAR(s.x, 0.9 * f(static_cast<Eigen::Index>(i)), 1e-12);
    }
}

TEST(PiStep, OverflowFlagsInstability) {
    const auto s = pi_step(with_x(1e12, 1.0), 3.0, std::vector<NeighborEntry>{{1.0, -1e12}});
    EXPECT_TRUE(s.unstable);
}

TEST(BeginCorrection, PayloadFields) {
    auto s = with_x(0.5, 0.1);
    const auto p = begin_correction(s, 4, 0.1);
    EXPECT_EQ(p.origin, 4u);
    EXPECT_DOUBLE_EQ(p.x, 0.5);
    EXPECT_DOUBLE_EQ(p.x2, 0.25);
    EXPECT_DOUBLE_EQ(p.xlx, 0.05);
    const auto q = begin_correction(s, 4, 0.1);
    EXPECT_GT(q.round_id, p.round_id);
}

TEST(BeginCorrection, AllowedWhenUnstable) {
    auto s = with_x(0.5, 0.1);
    s.unstable = true;
    const auto p = begin_correction(s, 1, 0.0);
    EXPECT_EQ(p.round_id, 1u);
    EXPECT_FALSE(s.unstable);
}

TEST(AbsorbFlood, IdempotentAndCounts) {
    FloodAccumulator acc;
    const FloodPayload m1{1, 0, 0.5, 0.25, 0.1};
    acc = absorb_flood(acc, m1);
    const auto once = acc;
    acc = absorb_flood(acc, m1);
    EXPECT_EQ(acc.count, once.count);
    EXPECT_EQ(acc.sum_x, once.sum_x);
    acc = absorb_flood(acc, FloodPayload{1, 1, -0.2, 0.04, 0.0});
    acc = absorb_flood(acc, FloodPayload{1, 2, -0.3, 0.09, 0.0});
    EXPECT_EQ(acc.count, 3u);
    EXPECT_EQ(acc.count, acc.seen.size());
}

TEST(AbsorbFlood, NewerRoundResetsAndStaleIsIgnored) {
    FloodAccumulator acc;
    acc = absorb_flood(acc, FloodPayload{2, 0, 1.0, 1.0, 0.0});
    acc = absorb_flood(acc, FloodPayload{2, 1, 1.0, 1.0, 0.0});
    acc = absorb_flood(acc, FloodPayload{3, 5, 0.25, 0.0625, 0.0});
    EXPECT_EQ(acc.round_id, 3u);
    EXPECT_EQ(acc.count, 1u);
    EXPECT_DOUBLE_EQ(acc.sum_x, 0.25);
    const auto before = acc;
    acc = absorb_flood(acc, FloodPayload{2, 7, 9.0, 81.0, 0.0});
    EXPECT_EQ(acc.count, before.count);
    EXPECT_EQ(acc.sum_x, before.sum_x);
}

TEST(AbsorbFlood, OrderIndependent) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<FloodPayload> msgs;
    for (RobotId i = 0; i < 12; ++i) {
        const double x = u(rng);
        msgs.push_back({1, i, x, x * x, u(rng)});
    }
    FloodAccumulator forward;
    for (const auto& m : msgs) forward = absorb_flood(forward, m);
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(msgs.begin(), msgs.end(), rng);
        FloodAccumulator acc;
        for (const auto& m : msgs) acc = absorb_flood(acc, m);
        EXPECT_NEAR(acc.sum_x, forward.sum_x, 1e-12);
        EXPECT_NEAR(acc.sum_x2, forward.sum_x2, 1e-12);
        EXPECT_NEAR(acc.sum_xlx, forward.sum_xlx, 1e-12);
        EXPECT_EQ(acc.count, forward.count);
    }
}

TEST(ApplyCorrection, OnesVectorCollapsesAndIsRedrawn) {
    std::mt19937_64 rng(2);
    FloodAccumulator acc;
    for (RobotId i = 0; i < 3; ++i) acc = absorb_flood(acc, FloodPayload{1, i, 1.0, 1.0, 0.0});
    EXPECT_TRUE(correction_map(acc).collapsed);
    const auto s = apply_correction(with_x(1.0, 0.1), acc, rng);
    EXPECT_NE(s.x, 0.0);
    EXPECT_GE(s.x, -1.0);
    EXPECT_LE(s.x, 1.0);
    EXPECT_FALSE(s.has_estimate);
}

TEST(ApplyCorrection, FiedlerVectorIsAFixedPoint) {
    Team team(path3(), 0.1);
    const auto f = oracle::fiedler(team.g).fiedler_vector;
    for (std::size_t i = 0; i < 3; ++i) team.agents[i].x = f(static_cast<Eigen::Index>(i));
    team.correct();
    EXPECT_LE((team.vector() - f).cwiseAbs().maxCoeff(), 1e-9);
    for (const auto& a : team.agents) EXPECT_NEAR(a.lambda2_est, 1.0, 1e-9);
}

TEST(ApplyCorrection, DeflatesTheOnesComponent) {
    Team team(path3(), 0.1);
    const auto f = oracle::fiedler(team.g).fiedler_vector;
    for (std::size_t i = 0; i < 3; ++i) team.agents[i].x = f(static_cast<Eigen::Index>(i)) + 0.3;
    team.correct();
    const auto x = team.vector();
    EXPECT_LE((x.normalized() - f).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(std::abs(x.sum()), 1e-9 * 3);
}

TEST(ApplyCorrection, RequiresAContribution) {
    std::mt19937_64 rng(0);
    EXPECT_THROW(apply_correction(with_x(1.0, 0.1), FloodAccumulator{}, rng), std::invalid_argument);
}

TEST(EstimateLambda2, FloorBeforeFirstRound) {
    EXPECT_EQ(estimate_lambda2(with_x(0.3, 0.1), 0.01), 0.01);
}

TEST(EstimateLambda2, ConvergesOnPathAndTriangle) {
    for (auto [g, expected] : {std::pair{path3(), 1.0}, std::pair{triangle(), 3.0}}) {
        Team team(g, default_alpha(2.0));
        for (int round = 0; round < 50; ++round) {
            team.iterate(10);
            team.correct();
        }
        for (const auto& a : team.agents) EXPECT_NEAR(estimate_lambda2(a, 0.01), expected, 0.05 * expected);
    }
}

TEST(EstimateLambda2, RandomGraphsConvergeInValueAndDirection) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    int checked = 0;
    for (int trial = 0; checked < 20 && trial < 200; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 9);
        std::vector<Vec> p;
        for (std::size_t i = 0; i < n; ++i) p.push_back(Vec{{u(rng), u(rng)}});
        const auto g = oracle::build_graph(p, RadioModel{16.0, 0.0, 0}, WeightParams{});
        if (!oracle::is_connected(g)) continue;
        const auto truth = oracle::fiedler(g);
        const double max_degree = g.weights.rowwise().sum().maxCoeff();
        Team team(g, default_alpha(max_degree));
        for (int round = 0; round < 50; ++round) {
            team.iterate(10);
            team.correct();
            for (const auto& a : team.agents) ASSERT_FALSE(a.unstable);
        }
        ++checked;
        // Team mean stays removed after a complete round.
        EXPECT_LE(std::abs(team.vector().sum()), 1e-9 * static_cast<double>(n));
        for (const auto& a : team.agents) EXPECT_NEAR(a.lambda2_est, truth.lambda2, 0.05 * truth.lambda2);
        EXPECT_GE(std::abs(team.vector().normalized().dot(truth.fiedler_vector)), 0.99);
    }
    EXPECT_EQ(checked, 20);
}

}  // namespace
}  // namespace swarmconn::pi
