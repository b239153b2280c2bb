#pragma once

// Scenario description. On disk it is an INI-style file:
//
//   n = 20               ; top-level keys: n, ticks, dt, dim, seed
//   [radio]
//   comm_range = 16
//   [positions]          ; only with placement.mode = explicit
//   0 = 0.0, 0.0
//
// Sections: arena, radio, weights, gains, lj, robustness, energy, pi,
// failure, placement, positions. Unknown sections or keys are rejected.
// Keys documented as "0 = derive" take their value from other settings in
// resolved().

#include "swarmconn/control.hpp"
#include "swarmconn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmconn {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(key) {}
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct PiConfig {
    double alpha = 0.0;         // 0 = derive from degree_bound
    double degree_bound = 3.0;  // bound on weighted degree used to derive alpha
    std::uint64_t period = 10;  // iterations between correction rounds
};

/// Permanent robot failures, exponentially distributed with mean mtbf
/// seconds. Absent means no failures.
struct FailureModel {
    std::optional<double> mtbf;
};

enum class PlacementMode { Random, Explicit };

struct Placement {
    PlacementMode mode = PlacementMode::Random;
    std::vector<Vec> positions;  // explicit mode only
    std::vector<double> spawn{20.0, 20.0};  // random mode: centred box per axis, capped at the arena; 0 or missing = full extent
    bool require_connected = true;
    int max_attempts = 1000;
};

struct ScenarioConfig {
    std::size_t n = 20;
    int dim = 2;
    double dt = 0.1;
    Tick ticks = 3000;
    std::uint64_t seed = 1;
    std::vector<double> arena = {50.0, 50.0};  // extent per dimension

    RadioModel radio;
    Tick staleness_ttl = 5;
    Tick digest_period = 1;
    WeightParams weights;

    control::Gains gains;
    double v_max = 1.0;
    control::LJParams lj;
    control::RobustnessParams robustness;
    control::VParams vparams;

    PiConfig pi;
    FailureModel failure;
    Placement placement;
};

/// Throws ConfigError naming the first offending key.
void validate(const ScenarioConfig& cfg);

/// Copy with every "0 = derive" value replaced by its derived value.
ScenarioConfig resolved(ScenarioConfig cfg);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Round-trippable text form (doubles printed with 17 significant digits).
std::string to_ini(const ScenarioConfig& cfg);

}  // namespace swarmconn
