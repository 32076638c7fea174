#include "suge/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "suge/error.hpp"
#include "suge/kdtree.hpp"

namespace suge {

void NeighborConfig::validate() const {
    if (k < 1) throw ConfigError("k_neighbors", "must be at least 1");
    if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
        throw ConfigError("ridge_lambda", "must be finite and >= 0");
    }
}

namespace {

std::map<std::int64_t, std::vector<std::size_t>> group_rows(std::span<const std::int64_t> person_ids) {
    std::map<std::int64_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < person_ids.size(); ++i) groups[person_ids[i]].push_back(i);
    return groups;
}

void check_shapes(const Matrix& features, std::span<const std::int64_t> person_ids) {
    if (features.rows() != person_ids.size()) {
        throw InvalidInputError("knn: feature rows and person ids differ in length");
    }
}

}  // namespace

std::vector<NeighborList> knn_same_person(const Matrix& features, std::span<const std::int64_t> person_ids,
                                          std::size_t k, ExecPolicy exec) {
    check_shapes(features, person_ids);
    const auto groups = group_rows(person_ids);

    // Build phase is serial; queries share the immutable trees.
    std::map<std::int64_t, KdTree> trees;
    for (const auto& [person, rows] : groups) trees.try_emplace(person, features, rows);
    std::vector<const KdTree*> tree_of(person_ids.size());
    for (std::size_t i = 0; i < person_ids.size(); ++i) tree_of[i] = &trees.at(person_ids[i]);

    std::vector<NeighborList> out(person_ids.size());
    parallel_for(person_ids.size(), exec, [&](std::size_t i) {
        const KdTree& tree = *tree_of[i];
        const auto found = tree.query(features.row(i), k, i);
        NeighborList& list = out[i];
        list.neighbors.reserve(found.size());
        for (const Neighbor& nb : found) list.neighbors.push_back(nb.index);
        list.degenerate = found.size() < k;
    });
    return out;
}

std::vector<NeighborList> knn_same_person_exhaustive(const Matrix& features,
                                                     std::span<const std::int64_t> person_ids, std::size_t k) {
    check_shapes(features, person_ids);
    const auto groups = group_rows(person_ids);
    std::vector<NeighborList> out(person_ids.size());
    for (std::size_t i = 0; i < person_ids.size(); ++i) {
        std::vector<Neighbor> all;
        for (std::size_t j : groups.at(person_ids[i])) {
            if (j != i) all.push_back({squared_distance(features.row(i), features.row(j)), j});
        }
        std::sort(all.begin(), all.end());
        const std::size_t take = std::min(k, all.size());
        for (std::size_t t = 0; t < take; ++t) out[i].neighbors.push_back(all[t].index);
        out[i].degenerate = all.size() < k;
    }
    return out;
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tol = scale * 1e-14 * static_cast<double>(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        if (!(std::abs(a[piv * n + col]) > tol)) {
            throw NumericalError("singular linear system in neighbor weight solve; use ridge_lambda > 0");
        }
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
        x[r] = acc / a[r * n + r];
    }
    return x;
}

std::vector<double> reconstruction_weights(std::span<const double> feature,
                                           std::span<const std::span<const double>> neighbor_features,
                                           double lambda) {
    const std::size_t k = neighbor_features.size();
    if (k == 0) throw InvalidInputError("reconstruction_weights: no neighbors");
    if (!(lambda >= 0.0)) throw InvalidInputError("reconstruction_weights: lambda must be >= 0");
    if (k == 1) return {1.0};

    const std::size_t d = feature.size();
    std::vector<double> delta(k * d);
    for (std::size_t j = 0; j < k; ++j) {
        if (neighbor_features[j].size() != d) throw InvalidInputError("reconstruction_weights: dimension mismatch");
        for (std::size_t c = 0; c < d; ++c) delta[j * d + c] = feature[c] - neighbor_features[j][c];
    }
    std::vector<double> gram(k * k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) acc += delta[a * d + c] * delta[b * d + c];
            gram[a * k + b] = acc;
            gram[b * k + a] = acc;
        }
        gram[a * k + a] += lambda;
    }
    std::vector<double> w;
    try {
        w = solve_dense(gram, std::vector<double>(k, 1.0), k);
    } catch (const NumericalError&) {
        // Singular S: the constrained minimum can still be unique, e.g. a
        // query at the midpoint of two neighbors. Solve the bordered system
        // [S 1; 1' 0] [w; mu] = [0; 1] instead.
        const std::size_t n = k + 1;
        std::vector<double> kkt(n * n, 0.0), rhs(n, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) kkt[a * n + b] = gram[a * k + b];
            kkt[a * n + k] = 1.0;
            kkt[k * n + a] = 1.0;
        }
        rhs[k] = 1.0;
        try {
            w = solve_dense(std::move(kkt), std::move(rhs), n);
        } catch (const NumericalError&) {
            throw NumericalError("singular linear system in neighbor weight solve; use ridge_lambda > 0");
        }
        w.resize(k);
    }
    double total = 0.0;
    for (double v : w) total += v;
    if (!(std::abs(total) > 0.0) || !std::isfinite(total)) {
        throw NumericalError("reconstruction weights do not normalize; use ridge_lambda > 0");
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<NeighborSet> build_neighbor_sets(const Matrix& features, std::span<const std::int64_t> person_ids,
                                             const NeighborConfig& cfg, NeighborWeighting weighting,
                                             ExecPolicy exec) {
    cfg.validate();
    const std::vector<NeighborList> lists = knn_same_person(features, person_ids, cfg.k, exec);
    std::vector<NeighborSet> sets(lists.size());
    parallel_for(lists.size(), exec, [&](std::size_t i) {
        NeighborSet& set = sets[i];
        set.sample = i;
        set.neighbors = lists[i].neighbors;
        set.degenerate = lists[i].degenerate;
        const std::size_t m = set.neighbors.size();
        if (m == 0) return;
        if (weighting == NeighborWeighting::uniform) {
            set.weights.assign(m, 1.0 / static_cast<double>(m));
            return;
        }
        std::vector<std::span<const double>> nbrs;
        nbrs.reserve(m);
        for (std::size_t j : set.neighbors) nbrs.push_back(features.row(j));
        set.weights = reconstruction_weights(features.row(i), nbrs, cfg.ridge_lambda);
    });
    return sets;
}

std::vector<GazeLabel> weighted_label_sum(std::span<const NeighborSet> sets, std::span<const GazeLabel> values,
                                          std::span<const GazeLabel> fallback, ExecPolicy exec) {
    std::vector<GazeLabel> out(sets.size());
    parallel_for(sets.size(), exec, [&](std::size_t i) {
        const NeighborSet& set = sets[i];
        if (set.neighbors.empty()) {
            out[i] = fallback[i];
            return;
        }
        GazeLabel acc{};
        for (std::size_t j = 0; j < set.neighbors.size(); ++j) acc = acc + set.weights[j] * values[set.neighbors[j]];
        out[i] = acc;
    });
    return out;
}

std::vector<GazeLabel> neighboring_labels(const Dataset& ds, const Matrix& features, const NeighborConfig& cfg,
                                          ExecPolicy exec) {
    const auto persons = ds.person_ids();
    const auto labels = ds.labels();
    const auto sets = build_neighbor_sets(features, persons, cfg, NeighborWeighting::reconstruction, exec);
    return weighted_label_sum(sets, labels, labels, exec);
}

}  // namespace suge
