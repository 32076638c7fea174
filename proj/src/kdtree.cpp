#include "suge/kdtree.hpp"

#include <algorithm>

namespace suge {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
    }
    return acc;
}

KdTree::KdTree(const Matrix& points, std::vector<std::size_t> rows, std::size_t leaf_size)
    : points_(&points), rows_(std::move(rows)), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    if (!rows_.empty()) {
        nodes_.reserve(2 * rows_.size() / leaf_size_ + 1);
        build(0, rows_.size());
    }
}

int KdTree::build(std::size_t begin, std::size_t end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= leaf_size_) return id;

    // Split on the dimension of widest spread, at the median.
    const std::size_t dims = points_->cols();
    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < dims; ++d) {
        double lo = (*points_)(rows_[begin], d), hi = lo;
        for (std::size_t i = begin + 1; i < end; ++i) {
            const double v = (*points_)(rows_[i], d);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (best_spread <= 0.0) return id;  // all points identical: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    auto key = [&](std::size_t r) { return (*points_)(r, best_dim); };
    std::nth_element(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                     rows_.begin() + static_cast<std::ptrdiff_t>(mid),
                     rows_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    const double split = key(rows_[mid]);

    nodes_[id].split_dim = best_dim;
    nodes_[id].split = split;
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

std::vector<Neighbor> KdTree::query(std::span<const double> q, std::size_t k, std::size_t exclude) const {
    std::vector<Neighbor> heap;
    if (k == 0 || nodes_.empty()) return heap;
    heap.reserve(k + 1);
    search(0, q, k, exclude, heap);
    std::sort_heap(heap.begin(), heap.end());
    return heap;
}

void KdTree::search(int node_id, std::span<const double> q, std::size_t k, std::size_t exclude,
                    std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) {
            const std::size_t r = rows_[i];
            if (r == exclude) continue;
            const Neighbor cand{squared_distance(q, points_->row(r)), r};
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    // Left holds values <= split, right holds values >= split.
    const double diff = q[node.split_dim] - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    search(near, q, k, exclude, heap);
    // Visit on equality too: a tied point with a lower index may sit across the plane.
    if (heap.size() < k || diff * diff <= heap.front().dist2) search(far, q, k, exclude, heap);
}

}  // namespace suge
