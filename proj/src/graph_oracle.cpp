#include "swarmconn/graph_oracle.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <queue>
#include <stdexcept>

namespace swarmconn::oracle {

namespace {

constexpr double kSignTolerance = 1e-12;

// Orthonormal basis (n x n-1) of the subspace orthogonal to the ones vector
// (normalized Helmert contrasts).
Eigen::MatrixXd ones_complement_basis(std::size_t n) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n - 1));
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double m = static_cast<double>(c + 1);
        const double scale = 1.0 / std::sqrt(m * (m + 1.0));
        for (std::size_t r = 0; r <= c; ++r) q(r, c) = scale;
        q(c + 1, c) = -m * scale;
    }
    return q;
}

void check_index(const GraphSnapshot& g, std::size_t i) {
    if (i >= g.n) throw std::invalid_argument("node index out of range");
}

}  // namespace

GraphSnapshot build_graph(std::span<const Vec> positions, const RadioModel& radio,
                          const WeightParams& weight_params) {
    if (!(radio.comm_range > 0.0)) throw std::invalid_argument("comm_range must be positive");
    const auto n = positions.size();
    for (const auto& p : positions) {
        if (!p.allFinite()) throw std::invalid_argument("non-finite robot position");
        if (p.size() != positions.front().size())
            throw std::invalid_argument("positions have mixed dimensions");
    }

    GraphSnapshot g;
    g.n = n;
    g.positions.assign(positions.begin(), positions.end());
    g.comm_range = radio.comm_range;
    g.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = (positions[i] - positions[j]).norm();
            const double w = link_weight(d, radio.comm_range, weight_params);
            g.weights(i, j) = w;
            g.weights(j, i) = w;
        }
    }
    return g;
}

GraphSnapshot graph_from_weights(const Eigen::MatrixXd& weights) {
    if (weights.rows() != weights.cols()) throw std::invalid_argument("weight matrix not square");
    const bool symmetric = (weights - weights.transpose()).cwiseAbs().sum() == 0.0;
    const bool valid = symmetric && (weights.array() >= 0.0).all() &&
                       (weights.diagonal().array() == 0.0).all();
    if (!valid)
        throw std::invalid_argument("weights must be symmetric, nonnegative, zero-diagonal");
    GraphSnapshot g;
    g.n = static_cast<std::size_t>(weights.rows());
    g.weights = weights;
    return g;
}

Eigen::MatrixXd laplacian(const GraphSnapshot& g) {
    Eigen::MatrixXd l = -g.weights;
    l.diagonal() = g.weights.rowwise().sum();
    return l;
}

Eigen::VectorXd laplacian_spectrum(const GraphSnapshot& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(g), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

SpectralResult fiedler(const GraphSnapshot& g) {
    if (g.n < 2) throw std::invalid_argument("fiedler requires at least two nodes");
    const Eigen::MatrixXd q = ones_complement_basis(g.n);
    const Eigen::MatrixXd reduced = q.transpose() * laplacian(g) * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);

    SpectralResult out;
    out.lambda2 = std::max(0.0, solver.eigenvalues()(0));
    out.fiedler_vector = q * solver.eigenvectors().col(0);
    out.fiedler_vector.normalize();
    for (Eigen::Index i = 0; i < out.fiedler_vector.size(); ++i) {
        if (std::abs(out.fiedler_vector(i)) > kSignTolerance) {
            if (out.fiedler_vector(i) < 0.0) out.fiedler_vector = -out.fiedler_vector;
            break;
        }
    }
    return out;
}

std::vector<int> hop_distances(const GraphSnapshot& g, std::size_t source) {
    check_index(g, source);
    std::vector<int> dist(g.n, -1);
    std::queue<std::size_t> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < g.n; ++v) {
            if (dist[v] < 0 && g.weights(u, v) > 0.0) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

bool is_connected(const GraphSnapshot& g) {
    if (g.n <= 1) return true;
    const auto dist = hop_distances(g, 0);
    for (int d : dist)
        if (d < 0) return false;
    return true;
}

TwoHopStructure two_hop_structure(const GraphSnapshot& g, std::size_t i, int k) {
    check_index(g, i);
    if (k < 1) throw std::invalid_argument("path-count threshold k must be >= 1");
    const auto dist = hop_distances(g, i);
    TwoHopStructure out;
    for (std::size_t j = 0; j < g.n; ++j) {
        if (dist[j] == 1 || dist[j] == 2) ++out.pi_size;
        if (dist[j] != 2) continue;
        int relays = 0;
        for (std::size_t m = 0; m < g.n; ++m)
            if (g.weights(i, m) > 0.0 && g.weights(m, j) > 0.0) ++relays;
        if (relays <= k) out.path_set.push_back(j);
    }
    return out;
}

double robustness_score(const GraphSnapshot& g, std::size_t i, int k) {
    const auto s = two_hop_structure(g, i, k);
    if (s.pi_size == 0) return 0.0;
    return static_cast<double>(s.path_set.size()) / static_cast<double>(s.pi_size);
}

}  // namespace swarmconn::oracle
