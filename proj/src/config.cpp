#include "swarmconn/config.hpp"

#include "swarmconn/pi_estimator.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace swarmconn {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"", {"n", "ticks", "dt", "dim", "seed"}},
        {"arena", {"width", "height", "depth"}},
        {"radio", {"comm_range", "drop_prob", "max_hops", "staleness_ttl", "digest_period"}},
        {"weights", {"mode", "sigma"}},
        {"gains", {"sigma", "psi", "zeta", "v_max"}},
        {"lj", {"a", "b", "delta", "iota"}},
        {"robustness", {"k", "r", "trigger"}},
        {"energy", {"epsilon_lambda", "scale"}},
        {"pi", {"alpha", "degree_bound", "period"}},
        {"failure", {"mtbf"}},
        {"placement", {"mode", "require_connected", "max_attempts", "spawn_width", "spawn_height", "spawn_depth"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& raw) {
    const auto text = trim(raw);
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) throw ConfigError(key, "not a number: '" + raw + "'");
    return v;
}

std::int64_t to_int(const std::string& key, const std::string& raw) {
    const auto text = trim(raw);
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) throw ConfigError(key, "not an integer: '" + raw + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& raw) {
    const auto v = to_int(key, raw);
    if (v < 0) throw ConfigError(key, "must be non-negative");
    return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& key, const std::string& raw) {
    const auto text = trim(raw);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(key, "expected true/false");
}

Vec to_point(const std::string& key, const std::string& raw) {
    std::vector<double> coords;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) coords.push_back(to_double(key, item));
    Vec v(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) v(static_cast<Eigen::Index>(i)) = coords[i];
    return v;
}

// Visits the value at `section.key` if present.
template <typename F>
void with(const pt::ptree& tree, const std::string& section, const std::string& key, F&& apply) {
    const pt::ptree* node = &tree;
    if (!section.empty()) {
        const auto child = tree.get_child_optional(section);
        if (!child) return;
        node = &*child;
    }
    const auto value = node->get_optional<std::string>(key);
    if (value) apply(section.empty() ? key : section + "." + key, *value);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void validate(const ScenarioConfig& c) {
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok) throw ConfigError(key, what);
    };
    require(c.n >= 1, "n", "must be >= 1");
    require(c.ticks >= 1, "ticks", "must be >= 1");
    require(c.dim >= 1 && c.dim <= 3, "dim", "must be 1, 2 or 3");
    require(std::isfinite(c.dt) && c.dt > 0.0, "dt", "must be positive");
    require(c.arena.size() >= static_cast<std::size_t>(c.dim), "arena", "needs an extent per dimension");
    for (double e : c.arena) require(std::isfinite(e) && e > 0.0, "arena", "extents must be positive");
    require(std::isfinite(c.radio.comm_range) && c.radio.comm_range > 0.0, "radio.comm_range",
            "must be positive");
    require(c.radio.drop_prob >= 0.0 && c.radio.drop_prob <= 1.0, "radio.drop_prob", "must be in [0, 1]");
    require(c.radio.max_hops >= 0, "radio.max_hops", "must be >= 1 (0 = team size)");
    require(c.staleness_ttl >= 0, "radio.staleness_ttl", "must be non-negative");
    require(c.digest_period >= 1, "radio.digest_period", "must be >= 1");
    require(c.weights.sigma >= 0.0, "weights.sigma", "must be positive (0 = derive)");
    for (double g : {c.gains.sigma, c.gains.psi, c.gains.zeta})
        require(std::isfinite(g), "gains", "must be finite");
    require(std::isfinite(c.v_max) && c.v_max > 0.0, "gains.v_max", "must be positive");
    require(c.lj.b > 0.0 && c.lj.a > c.lj.b, "lj.a", "need a > b > 0");
    require(c.lj.delta >= 0.0, "lj.delta", "must be positive (0 = derive)");
    require(c.lj.iota >= 0.0, "lj.iota", "must be non-negative");
    require(c.robustness.k >= 1, "robustness.k", "must be >= 1");
    require(c.robustness.r >= 0.0 && c.robustness.r <= 1.0, "robustness.r", "must be in [0, 1]");
    require(c.vparams.epsilon_lambda > 0.0, "energy.epsilon_lambda", "must be positive");
    require(c.vparams.scale > 0.0, "energy.scale", "must be positive");
    require(c.pi.alpha >= 0.0, "pi.alpha", "must be positive (0 = derive)");
    require(c.pi.degree_bound > 0.0, "pi.degree_bound", "must be positive");
    require(c.pi.period >= 1, "pi.period", "must be >= 1");
    if (c.failure.mtbf) require(*c.failure.mtbf > 0.0, "failure.mtbf", "must be positive");
    if (c.placement.mode == PlacementMode::Explicit) {
        require(c.placement.positions.size() == c.n, "positions", "need exactly n entries");
        for (const auto& p : c.placement.positions)
            require(p.size() == c.dim && p.allFinite(), "positions", "entries need dim finite coordinates");
    }
    for (double s : c.placement.spawn)
        require(std::isfinite(s) && s >= 0.0, "placement.spawn", "must be non-negative (0 = full extent)");
    require(c.placement.max_attempts >= 1, "placement.max_attempts", "must be >= 1");
}

ScenarioConfig resolved(ScenarioConfig c) {
    if (c.weights.sigma == 0.0) c.weights.sigma = effective_sigma(c.weights, c.radio.comm_range);
    if (c.lj.delta == 0.0) c.lj.delta = 0.9 * c.radio.comm_range;
    if (c.radio.max_hops == 0) c.radio.max_hops = static_cast<int>(c.n);
    if (c.pi.alpha == 0.0) c.pi.alpha = pi::default_alpha(c.pi.degree_bound);
    return c;
}

ScenarioConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }

    for (const auto& [name, node] : tree) {
        if (name == "positions") continue;
        if (node.empty()) {
            if (!known_keys().at("").contains(name)) throw ConfigError(name, "unknown key");
            continue;
        }
        const auto section = known_keys().find(name);
        if (section == known_keys().end()) throw ConfigError(name, "unknown section");
        for (const auto& [key, value] : node)
            if (!section->second.contains(key)) throw ConfigError(name + "." + key, "unknown key");
    }

    ScenarioConfig c;
    with(tree, "", "n", [&](auto k, auto v) {
        const auto n = to_int(k, v);
        if (n < 1) throw ConfigError(k, "must be >= 1");
        c.n = static_cast<std::size_t>(n);
    });
    with(tree, "", "ticks", [&](auto k, auto v) { c.ticks = to_int(k, v); });
    with(tree, "", "dt", [&](auto k, auto v) { c.dt = to_double(k, v); });
    with(tree, "", "dim", [&](auto k, auto v) { c.dim = static_cast<int>(to_int(k, v)); });
    with(tree, "", "seed", [&](auto k, auto v) { c.seed = to_uint(k, v); });

    c.arena.resize(3, 0.0);
    c.arena[2] = c.arena[0];
    with(tree, "arena", "width", [&](auto k, auto v) { c.arena[0] = to_double(k, v); });
    with(tree, "arena", "height", [&](auto k, auto v) { c.arena[1] = to_double(k, v); });
    c.arena[2] = c.arena[0];
    with(tree, "arena", "depth", [&](auto k, auto v) { c.arena[2] = to_double(k, v); });
    c.arena.resize(static_cast<std::size_t>(std::clamp(c.dim, 1, 3)));

    with(tree, "radio", "comm_range", [&](auto k, auto v) { c.radio.comm_range = to_double(k, v); });
    with(tree, "radio", "drop_prob", [&](auto k, auto v) { c.radio.drop_prob = to_double(k, v); });
    with(tree, "radio", "max_hops", [&](auto k, auto v) { c.radio.max_hops = static_cast<int>(to_int(k, v)); });
    with(tree, "radio", "staleness_ttl", [&](auto k, auto v) { c.staleness_ttl = to_int(k, v); });
    with(tree, "radio", "digest_period", [&](auto k, auto v) { c.digest_period = to_int(k, v); });

    with(tree, "weights", "mode", [&](auto k, auto v) {
        const auto m = trim(v);
        if (m == "smooth") c.weights.mode = WeightMode::Smooth;
        else if (m == "binary") c.weights.mode = WeightMode::Binary;
        else throw ConfigError(k, "expected smooth or binary");
    });
    with(tree, "weights", "sigma", [&](auto k, auto v) { c.weights.sigma = to_double(k, v); });

    with(tree, "gains", "sigma", [&](auto k, auto v) { c.gains.sigma = to_double(k, v); });
    with(tree, "gains", "psi", [&](auto k, auto v) { c.gains.psi = to_double(k, v); });
    with(tree, "gains", "zeta", [&](auto k, auto v) { c.gains.zeta = to_double(k, v); });
    with(tree, "gains", "v_max", [&](auto k, auto v) { c.v_max = to_double(k, v); });

    with(tree, "lj", "a", [&](auto k, auto v) { c.lj.a = to_double(k, v); });
    with(tree, "lj", "b", [&](auto k, auto v) { c.lj.b = to_double(k, v); });
    with(tree, "lj", "delta", [&](auto k, auto v) { c.lj.delta = to_double(k, v); });
    with(tree, "lj", "iota", [&](auto k, auto v) { c.lj.iota = to_double(k, v); });

    with(tree, "robustness", "k", [&](auto k, auto v) { c.robustness.k = static_cast<int>(to_int(k, v)); });
    with(tree, "robustness", "r", [&](auto k, auto v) { c.robustness.r = to_double(k, v); });
    with(tree, "robustness", "trigger", [&](auto k, auto v) {
        const auto t = trim(v);
        if (t == "above") c.robustness.trigger = control::TriggerDirection::Above;
        else if (t == "below") c.robustness.trigger = control::TriggerDirection::Below;
        else throw ConfigError(k, "expected above or below");
    });

    with(tree, "energy", "epsilon_lambda", [&](auto k, auto v) { c.vparams.epsilon_lambda = to_double(k, v); });
    with(tree, "energy", "scale", [&](auto k, auto v) { c.vparams.scale = to_double(k, v); });

    with(tree, "pi", "alpha", [&](auto k, auto v) { c.pi.alpha = to_double(k, v); });
    with(tree, "pi", "degree_bound", [&](auto k, auto v) { c.pi.degree_bound = to_double(k, v); });
    with(tree, "pi", "period", [&](auto k, auto v) { c.pi.period = to_uint(k, v); });

    with(tree, "failure", "mtbf", [&](auto k, auto v) {
        const double mtbf = to_double(k, v);
        if (mtbf != 0.0) c.failure.mtbf = mtbf;
    });

    with(tree, "placement", "mode", [&](auto k, auto v) {
        const auto m = trim(v);
        if (m == "random") c.placement.mode = PlacementMode::Random;
        else if (m == "explicit") c.placement.mode = PlacementMode::Explicit;
        else throw ConfigError(k, "expected random or explicit");
    });
    with(tree, "placement", "require_connected",
         [&](auto k, auto v) { c.placement.require_connected = to_bool(k, v); });
    with(tree, "placement", "max_attempts",
         [&](auto k, auto v) { c.placement.max_attempts = static_cast<int>(to_int(k, v)); });
    {
        const char* axes[] = {"spawn_width", "spawn_height", "spawn_depth"};
        for (std::size_t a = 0; a < 3; ++a) {
            with(tree, "placement", axes[a], [&](auto k, auto v) {
                if (c.placement.spawn.size() <= a) c.placement.spawn.resize(a + 1, 0.0);
                c.placement.spawn[a] = to_double(k, v);
            });
        }
    }

    if (const auto positions = tree.get_child_optional("positions")) {
        if (c.placement.mode != PlacementMode::Explicit)
            throw ConfigError("positions", "requires placement.mode = explicit");
        std::map<std::int64_t, Vec> by_id;
        for (const auto& [id, node] : *positions) {
            const auto key = "positions." + id;
            const auto index = to_int(key, id);
            if (index < 0 || static_cast<std::size_t>(index) >= c.n) throw ConfigError(key, "robot id out of range");
            by_id[index] = to_point(key, node.data());
        }
        for (auto& [id, p] : by_id) c.placement.positions.push_back(std::move(p));
    }

    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string to_ini(const ScenarioConfig& c) {
    std::ostringstream os;
    const auto f = format_double;
    os << "n = " << c.n << "\nticks = " << c.ticks << "\ndt = " << f(c.dt) << "\ndim = " << c.dim
       << "\nseed = " << c.seed << "\n";
    os << "\n[arena]\nwidth = " << f(c.arena.at(0)) << "\n";
    if (c.arena.size() > 1) os << "height = " << f(c.arena[1]) << "\n";
    if (c.arena.size() > 2) os << "depth = " << f(c.arena[2]) << "\n";
    os << "\n[radio]\ncomm_range = " << f(c.radio.comm_range) << "\ndrop_prob = " << f(c.radio.drop_prob)
       << "\nmax_hops = " << c.radio.max_hops << "\nstaleness_ttl = " << c.staleness_ttl
       << "\ndigest_period = " << c.digest_period << "\n";
    os << "\n[weights]\nmode = " << (c.weights.mode == WeightMode::Smooth ? "smooth" : "binary")
       << "\nsigma = " << f(c.weights.sigma) << "\n";
    os << "\n[gains]\nsigma = " << f(c.gains.sigma) << "\npsi = " << f(c.gains.psi) << "\nzeta = " << f(c.gains.zeta)
       << "\nv_max = " << f(c.v_max) << "\n";
    os << "\n[lj]\na = " << f(c.lj.a) << "\nb = " << f(c.lj.b) << "\ndelta = " << f(c.lj.delta)
       << "\niota = " << f(c.lj.iota) << "\n";
    os << "\n[robustness]\nk = " << c.robustness.k << "\nr = " << f(c.robustness.r) << "\ntrigger = "
       << (c.robustness.trigger == control::TriggerDirection::Above ? "above" : "below") << "\n";
    os << "\n[energy]\nepsilon_lambda = " << f(c.vparams.epsilon_lambda) << "\nscale = " << f(c.vparams.scale)
       << "\n";
    os << "\n[pi]\nalpha = " << f(c.pi.alpha) << "\ndegree_bound = " << f(c.pi.degree_bound)
       << "\nperiod = " << c.pi.period << "\n";
    os << "\n[failure]\nmtbf = " << f(c.failure.mtbf.value_or(0.0)) << "\n";
    os << "\n[placement]\nmode = " << (c.placement.mode == PlacementMode::Random ? "random" : "explicit")
       << "\nrequire_connected = " << (c.placement.require_connected ? "true" : "false")
       << "\nmax_attempts = " << c.placement.max_attempts << "\n";
    {
        const char* axes[] = {"spawn_width", "spawn_height", "spawn_depth"};
        for (std::size_t a = 0; a < c.placement.spawn.size() && a < 3; ++a)
            os << axes[a] << " = " << f(c.placement.spawn[a]) << "\n";
    }
    if (c.placement.mode == PlacementMode::Explicit) {
        os << "\n[positions]\n";
        for (std::size_t i = 0; i < c.placement.positions.size(); ++i) {
            const auto& p = c.placement.positions[i];
            os << i << " = ";
            for (Eigen::Index d = 0; d < p.size(); ++d) os << (d ? ", " : "") << f(p(d));
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace swarmconn
