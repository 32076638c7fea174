#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "suge/matrix.hpp"

namespace suge {

/// Squared Euclidean distance, summed in coordinate order. Every neighbor
/// routine uses this one function so that exact ties compare equal.
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

struct Neighbor {
    double dist2 = 0.0;
    std::size_t index = 0;  ///< row in the source matrix

    /// Nearest first; equal distances broken by lower row index.
    friend bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
        return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
    }
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact k-d tree over a subset of rows of a matrix. The matrix must outlive
/// the tree and stay unmodified. Queries are const and thread-safe.
class KdTree {
public:
    KdTree(const Matrix& points, std::vector<std::size_t> rows, std::size_t leaf_size = 8);

    /// The k nearest indexed rows to `query`, skipping row `exclude` (pass
    /// npos to keep all). Sorted nearest first with index tie-breaking.
    std::vector<Neighbor> query(std::span<const double> query, std::size_t k,
                                std::size_t exclude = npos) const;

    std::size_t size() const noexcept { return rows_.size(); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct Node {
        std::size_t begin = 0, end = 0;  // range in rows_
        std::size_t split_dim = 0;
        double split = 0.0;
        int left = -1, right = -1;       // -1 marks a leaf
    };

    int build(std::size_t begin, std::size_t end);
    void search(int node, std::span<const double> q, std::size_t k, std::size_t exclude,
                std::vector<Neighbor>& heap) const;

    const Matrix* points_;
    std::vector<std::size_t> rows_;
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
};

}  // namespace suge
