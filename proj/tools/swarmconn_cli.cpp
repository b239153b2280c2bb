// swarmconn run | oracle | replay
//
// SWARMCONN_LOG=trace|debug|info|warn|error|off sets stderr verbosity
// (default warn).

#include "swarmconn/config.hpp"
#include "swarmconn/graph_oracle.hpp"
#include "swarmconn/harness.hpp"
#include "swarmconn/wire.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace swarmconn;

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("swarmconn");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SWARMCONN_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off
        if (level == spdlog::level::off && std::string(env) != "off")
            spdlog::warn("SWARMCONN_LOG={} not recognised, keeping warn", env);
        else
            spdlog::set_level(level);
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int cmd_run(const fs::path& config_path, std::uint64_t seed, const fs::path& out) {
    auto cfg = load_config(config_path);
    cfg.seed = seed;
    spdlog::info("running {} robots for {} ticks, seed {}", cfg.n, cfg.ticks, seed);
    harness::RunOptions opt;
    opt.out_dir = out;
    const auto result = harness::run(cfg, opt);
    spdlog::info("wrote {}", out.string());
    if (result.summary.faults) spdlog::warn("{} robot faults during the run", result.summary.faults);
    if (result.summary.malformed) spdlog::warn("{} malformed messages dropped", result.summary.malformed);
    std::cout << harness::format_summary(result.summary);
    return 0;
}

int cmd_oracle(const fs::path& config_path) {
    const auto cfg = resolved(load_config(config_path));
    const auto positions = harness::initial_positions(cfg);
    const auto g = oracle::build_graph(positions, cfg.radio, cfg.weights);
    std::printf("n = %zu\nconnected = %s\n", g.n, oracle::is_connected(g) ? "true" : "false");
    if (g.n < 2) return 0;
    const auto f = oracle::fiedler(g);
    std::printf("lambda2 = %.17g\n", f.lambda2);
    for (std::size_t i = 0; i < g.n; ++i) {
        std::printf("fiedler.%zu = %.17g", i, f.fiedler_vector(static_cast<Eigen::Index>(i)));
        for (Eigen::Index d = 0; d < positions[i].size(); ++d) std::printf("%s%.17g", d ? " " : "  # at ", positions[i](d));
        std::printf("\n");
    }
    return 0;
}

// Re-runs the stored config into a scratch directory and compares every
// artifact byte for byte.
int cmd_replay(const fs::path& dir) {
    const auto cfg = load_config(dir / "config.ini");
    std::ifstream trace_in(dir / "trace.bin", std::ios::binary);
    if (!trace_in) throw std::runtime_error("missing " + (dir / "trace.bin").string());
    const auto records = wire::read_trace(trace_in);
    std::map<std::string, std::size_t> kinds;
    for (const auto& r : records) ++kinds[net::kind_name(r.message.kind)];
    std::printf("trace: %zu messages", records.size());
    for (const auto& [k, c] : kinds) std::printf(", %s %zu", k.c_str(), c);
    std::printf("\n");

    const auto scratch = fs::temp_directory_path() / ("swarmconn_replay_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    harness::RunOptions opt;
    opt.out_dir = scratch;
    harness::run(cfg, opt);
    int mismatches = 0;
    for (const auto& name : harness::artifact_names()) {
        const bool same = fs::exists(dir / name) && slurp(dir / name) == slurp(scratch / name);
        std::printf("%s %s\n", same ? "identical" : "DIFFERS  ", name.c_str());
        if (!same) ++mismatches;
    }
    fs::remove_all(scratch);
    std::printf("replay %s\n", mismatches ? "FAILED" : "ok");
    return mismatches ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Connectivity-maintaining swarm simulator"};
    app.require_subcommand(1);

    fs::path config_path, out_dir, trace_dir;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "simulate a scenario and write its artifacts");
    run->add_option("--config", config_path, "scenario INI file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "random seed")->required();
    run->add_option("--out", out_dir, "output directory")->required();

    auto* orc = app.add_subcommand("oracle", "print lambda_2 and the Fiedler vector of the initial layout");
    orc->add_option("--config", config_path, "scenario INI file")->required()->check(CLI::ExistingFile);

    auto* rep = app.add_subcommand("replay", "re-run a stored output directory and compare artifacts");
    rep->add_option("--trace", trace_dir, "directory written by run")->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, seed, out_dir);
        if (*orc) return cmd_oracle(config_path);
        if (*rep) return cmd_replay(trace_dir);
    } catch (const ConfigError& e) {
        spdlog::error("config: {}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
