#include "swarmconn/control.hpp"
#include "swarmconn/graph_oracle.hpp"
#include "swarmconn/harness.hpp"
#include "swarmconn/pi_estimator.hpp"
#include "swarmconn/wire.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

namespace py = pybind11;
using namespace swarmconn;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<Vec> rows_of(const RowMatrix& m) {
    std::vector<Vec> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
    return out;
}

RowMatrix stack(const std::vector<Vec>& v) {
    if (v.empty()) return RowMatrix(0, 0);
    RowMatrix m(static_cast<Eigen::Index>(v.size()), v.front().size());
    for (std::size_t i = 0; i < v.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
    return m;
}

WeightParams weights_of(const std::string& mode, double sigma) {
    if (mode == "smooth") return {WeightMode::Smooth, sigma};
    if (mode == "binary") return {WeightMode::Binary, sigma};
    throw py::value_error("weights must be 'smooth' or 'binary'");
}

py::dict gaps_dict(const harness::GapRatios& g) {
    py::dict d;
    d["receiver"] = g.receiver;
    d["ticks"] = g.ticks;
    py::dict miss;
    for (const auto& s : g.senders) miss[py::int_(s.sender)] = s.miss_ratio;
    d["miss_ratio"] = miss;
    d["exactly_one_ratio"] = g.exactly_one_ratio;
    d["none_ratio"] = g.none_ratio;
    py::dict corr;
    for (const auto& c : g.correlations) corr[py::make_tuple(c.a, c.b)] = c.correlation;
    d["correlation"] = corr;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Connectivity-maintaining swarm simulator: graph oracle, control terms and scenario runs.";

    py::class_<oracle::GraphSnapshot>(m, "Graph")
        .def_readonly("n", &oracle::GraphSnapshot::n)
        .def_readonly("comm_range", &oracle::GraphSnapshot::comm_range)
        .def_readonly("weights", &oracle::GraphSnapshot::weights)
        .def_property_readonly("positions", [](const oracle::GraphSnapshot& g) { return stack(g.positions); });

    m.def(
        "build_graph",
        [](const RowMatrix& positions, double comm_range, const std::string& weights, double sigma) {
            return oracle::build_graph(rows_of(positions), RadioModel{comm_range, 0.0, 0}, weights_of(weights, sigma));
        },
        py::arg("positions"), py::arg("comm_range") = 16.0, py::arg("weights") = "smooth", py::arg("sigma") = 0.0,
        "Weighted communication graph of an (n, m) position array.");
    m.def("graph_from_weights", &oracle::graph_from_weights, py::arg("weights"));
    m.def("laplacian", &oracle::laplacian, py::arg("graph"));
    m.def("laplacian_spectrum", &oracle::laplacian_spectrum, py::arg("graph"));
    m.def(
        "fiedler",
        [](const oracle::GraphSnapshot& g) {
            const auto r = oracle::fiedler(g);
            return py::make_tuple(r.lambda2, r.fiedler_vector);
        },
        py::arg("graph"), "(lambda_2, unit Fiedler vector)");
    m.def("is_connected", &oracle::is_connected, py::arg("graph"));
    m.def("hop_distances", &oracle::hop_distances, py::arg("graph"), py::arg("source"));
    m.def(
        "two_hop_structure",
        [](const oracle::GraphSnapshot& g, std::size_t i, int k) {
            const auto s = oracle::two_hop_structure(g, i, k);
            return py::make_tuple(s.pi_size, s.path_set);
        },
        py::arg("graph"), py::arg("i"), py::arg("k"), "(|Pi_i|, Path_i(k))");
    m.def("robustness_score", &oracle::robustness_score, py::arg("graph"), py::arg("i"), py::arg("k"));

    m.def("energy", [](double l, double eps, double scale) { return control::energy(l, {eps, scale}); },
          py::arg("lambda2"), py::arg("epsilon_lambda") = 0.01, py::arg("scale") = 1.0);
    m.def("energy_slope", [](double l, double eps, double scale) { return control::energy_slope(l, {eps, scale}); },
          py::arg("lambda2"), py::arg("epsilon_lambda") = 0.01, py::arg("scale") = 1.0);
    m.def(
        "connectivity_contribution",
        [](double lambda2, double own, const Eigen::VectorXd& fiedler, const RowMatrix& relative, double comm_range,
           double sigma, double eps, double scale) {
            if (fiedler.size() != relative.rows()) throw py::value_error("one Fiedler entry per neighbor");
            std::vector<control::ConnectivityNeighbor> nb;
            for (Eigen::Index j = 0; j < relative.rows(); ++j) nb.push_back({fiedler(j), relative.row(j).transpose()});
            const int dim = relative.rows() ? static_cast<int>(relative.cols()) : 2;
            return control::connectivity_contribution(lambda2, own, nb, comm_range, {WeightMode::Smooth, sigma},
                                                      {eps, scale}, dim);
        },
        py::arg("lambda2"), py::arg("own_fiedler"), py::arg("neighbor_fiedler"), py::arg("relative"),
        py::arg("comm_range") = 16.0, py::arg("sigma") = 0.0, py::arg("epsilon_lambda") = 0.01,
        py::arg("scale") = 1.0);
    m.def("lj_force", [](double d, double a, double b, double delta, double iota) {
        return control::lj_force(d, {a, b, delta, iota});
    }, py::arg("distance"), py::arg("a"), py::arg("b"), py::arg("delta"), py::arg("iota"));
    m.def("lj_equilibrium", [](double a, double b, double delta) {
        return control::lj_equilibrium({a, b, delta, 1.0});
    }, py::arg("a"), py::arg("b"), py::arg("delta"));
    m.def(
        "coverage_contribution",
        [](const RowMatrix& relative, double a, double b, double delta, double iota) {
            const int dim = relative.rows() ? static_cast<int>(relative.cols()) : 2;
            return control::coverage_contribution(rows_of(relative), {a, b, delta, iota}, dim);
        },
        py::arg("relative"), py::arg("a"), py::arg("b"), py::arg("delta"), py::arg("iota"));
    m.def(
        "combine",
        [](const Vec& uc, const Vec& ur, const Vec& ulj, std::tuple<double, double, double> gains, double v_max) {
            auto [s, p, z] = gains;
            return control::combine(uc, ur, ulj, {s, p, z}, v_max);
        },
        py::arg("uc"), py::arg("ur"), py::arg("ulj"), py::arg("gains"), py::arg("v_max"));
    m.def("default_alpha", &pi::default_alpha, py::arg("degree_bound"));

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("n", &ScenarioConfig::n)
        .def_readwrite("ticks", &ScenarioConfig::ticks)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("dt", &ScenarioConfig::dt)
        .def_property("comm_range", [](const ScenarioConfig& c) { return c.radio.comm_range; },
                      [](ScenarioConfig& c, double v) { c.radio.comm_range = v; })
        .def_property("drop_prob", [](const ScenarioConfig& c) { return c.radio.drop_prob; },
                      [](ScenarioConfig& c, double v) { c.radio.drop_prob = v; })
        .def_property("gains", [](const ScenarioConfig& c) { return py::make_tuple(c.gains.sigma, c.gains.psi, c.gains.zeta); },
                      [](ScenarioConfig& c, std::tuple<double, double, double> g) {
                          c.gains = {std::get<0>(g), std::get<1>(g), std::get<2>(g)};
                      })
        .def_property("mtbf", [](const ScenarioConfig& c) { return c.failure.mtbf; },
                      [](ScenarioConfig& c, std::optional<double> v) { c.failure.mtbf = v; })
        .def("to_ini", [](const ScenarioConfig& c) { return to_ini(c); });

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<wire::WireError>(m, "WireError", PyExc_ValueError);
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("initial_positions", [](const ScenarioConfig& c) { return stack(harness::initial_positions(resolved(c))); },
          py::arg("config"));

    m.def(
        "run",
        [](const ScenarioConfig& cfg, std::optional<std::filesystem::path> out_dir) {
            harness::RunOptions opt;
            opt.out_dir = std::move(out_dir);
            opt.record_messages = true;
            opt.keep_metrics = true;
            harness::RunResult r;
            {
                py::gil_scoped_release release;
                r = harness::run(cfg, opt);
            }
            const auto& s = r.summary;
            py::dict summary;
            summary["ticks"] = s.ticks;
            summary["connectivity_held_fraction"] = s.connectivity_held_fraction;
            summary["mean_rel_lambda2_error"] = s.mean_rel_lambda2_error;
            summary["final_lambda2_true"] = s.final_lambda2_true;
            summary["final_alive"] = s.final_alive;
            summary["faults"] = s.faults;
            summary["malformed"] = s.malformed;
            py::list gaps;
            for (const auto& g : s.gaps) gaps.append(gaps_dict(g));
            summary["gaps"] = gaps;
            Eigen::VectorXd lambda2(static_cast<Eigen::Index>(r.metrics.size()));
            Eigen::Matrix<bool, Eigen::Dynamic, 1> connected(static_cast<Eigen::Index>(r.metrics.size()));
            for (std::size_t t = 0; t < r.metrics.size(); ++t) {
                lambda2(static_cast<Eigen::Index>(t)) = r.metrics[t].lambda2_true;
                connected(static_cast<Eigen::Index>(t)) = r.metrics[t].connected;
            }
            summary["lambda2_true"] = lambda2;
            summary["connected"] = connected;
            std::vector<Vec> final_positions;
            for (const auto& robot : r.final_robots) final_positions.push_back(robot.position);
            summary["final_positions"] = stack(final_positions);
            return summary;
        },
        py::arg("config"), py::arg("out_dir") = py::none(),
        "Run a scenario; returns the summary with per-tick lambda2_true and connected arrays.");

    m.def(
        "read_trace",
        [](const std::filesystem::path& path) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw py::value_error("cannot open " + path.string());
            py::list out;
            for (const auto& rec : wire::read_trace(in)) {
                py::dict d;
                d["tick"] = rec.tick;
                d["kind"] = net::kind_name(rec.message.kind);
                d["sender"] = rec.message.sender;
                d["origin"] = rec.message.origin;
                d["origin_iteration"] = rec.message.origin_iteration;
                d["hop_count"] = rec.message.hop_count;
                out.append(d);
            }
            return out;
        },
        py::arg("path"), "Decode a trace.bin file into a list of message headers.");
}
