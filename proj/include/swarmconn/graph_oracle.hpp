#pragma once

// Centralized ground truth over a full snapshot of the team. Agents never
// call into this module; it backs verification and run metrics.

#include "swarmconn/model.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace swarmconn::oracle {

struct GraphSnapshot {
    std::size_t n = 0;
    std::vector<Vec> positions;
    Eigen::MatrixXd weights;  // symmetric, zero diagonal
    double comm_range = 0.0;
};

struct SpectralResult {
    double lambda2 = 0.0;
    Eigen::VectorXd fiedler_vector;  // unit norm, orthogonal to ones
};

struct TwoHopStructure {
    std::size_t pi_size = 0;              // |Pi_i|: nodes at hop distance 1 or 2
    std::vector<std::size_t> path_set;    // Path_i(k), ascending
};

/// Throws std::invalid_argument on non-finite positions, mixed dimensions or
/// a non-positive range.
GraphSnapshot build_graph(std::span<const Vec> positions, const RadioModel& radio,
                          const WeightParams& weight_params);

/// Same, from an explicit weight matrix (used by tests for abstract graphs).
GraphSnapshot graph_from_weights(const Eigen::MatrixXd& weights);

/// L = D - W.
Eigen::MatrixXd laplacian(const GraphSnapshot& g);

/// Second-smallest Laplacian eigenpair. The vector is computed inside the
/// complement of the all-ones vector and signed so that its first
/// non-negligible entry is positive. Throws for n < 2.
SpectralResult fiedler(const GraphSnapshot& g);

/// Full ascending Laplacian spectrum.
Eigen::VectorXd laplacian_spectrum(const GraphSnapshot& g);

bool is_connected(const GraphSnapshot& g);

/// Unweighted hop distances from `source`; -1 for unreachable nodes.
std::vector<int> hop_distances(const GraphSnapshot& g, std::size_t source);

TwoHopStructure two_hop_structure(const GraphSnapshot& g, std::size_t i, int k);

/// nu_i^k = |Path_i(k)| / |Pi_i|, zero when Pi_i is empty.
double robustness_score(const GraphSnapshot& g, std::size_t i, int k);

}  // namespace swarmconn::oracle
