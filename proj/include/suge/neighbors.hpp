#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "suge/dataset.hpp"
#include "suge/exec.hpp"
#include "suge/geometry.hpp"
#include "suge/matrix.hpp"

namespace suge {

struct NeighborConfig {
    std::size_t k = 4;
    double ridge_lambda = 1e-3;

    void validate() const;  ///< throws ConfigError
};

/// How neighbor weights are formed from the neighbor list.
enum class NeighborWeighting {
    reconstruction,  ///< ridge-regularized locally linear reconstruction
    uniform,         ///< 1/K each
};

/// Same-person neighbors of one sample. Indices are dataset row positions.
struct NeighborSet {
    std::size_t sample = 0;
    std::vector<std::size_t> neighbors;
    std::vector<double> weights;  ///< sums to 1 whenever neighbors is non-empty
    bool degenerate = false;      ///< fewer than k same-person candidates

    friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

struct NeighborList {
    std::vector<std::size_t> neighbors;  ///< nearest first, ties by lower index
    bool degenerate = false;

    friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

/// k nearest same-person rows of every row, self excluded, one k-d tree per
/// person. Queries run in parallel under `exec`.
std::vector<NeighborList> knn_same_person(const Matrix& features, std::span<const std::int64_t> person_ids,
                                          std::size_t k, ExecPolicy exec = {});

/// O(N^2) serial reference for knn_same_person; identical output.
std::vector<NeighborList> knn_same_person_exhaustive(const Matrix& features,
                                                     std::span<const std::int64_t> person_ids, std::size_t k);

/// Weights minimizing ||x - sum_j w_j n_j||^2 + lambda ||w||^2 subject to
/// sum_j w_j = 1, via (S + lambda I)^-1 1 normalized, where S is the Gram
/// matrix of the differences x - n_j. Throws NumericalError when the system
/// is singular (lambda = 0 with degenerate geometry).
std::vector<double> reconstruction_weights(std::span<const double> feature,
                                           std::span<const std::span<const double>> neighbor_features,
                                           double lambda);

/// Solves A x = b for a small dense system (row-major n x n) by Gaussian
/// elimination with partial pivoting. Throws NumericalError on a zero pivot.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n);

/// Neighbor lists plus weights for every sample.
std::vector<NeighborSet> build_neighbor_sets(const Matrix& features, std::span<const std::int64_t> person_ids,
                                             const NeighborConfig& cfg,
                                             NeighborWeighting weighting = NeighborWeighting::reconstruction,
                                             ExecPolicy exec = {});

/// sum_j w_j * values[n_j] for each set; a set with no neighbors yields `fallback[i]`.
std::vector<GazeLabel> weighted_label_sum(std::span<const NeighborSet> sets, std::span<const GazeLabel> values,
                                          std::span<const GazeLabel> fallback, ExecPolicy exec = {});

/// Neighboring labels from the dataset's ground-truth labels.
std::vector<GazeLabel> neighboring_labels(const Dataset& ds, const Matrix& features, const NeighborConfig& cfg,
                                          ExecPolicy exec = {});

}  // namespace suge
