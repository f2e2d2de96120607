#include "hullkit/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hullkit {

template <int D>
KdTree<D>::KdTree(std::vector<Point> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size(), 0);
  }
}

template <int D>
int KdTree<D>::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  // Split along the axis of largest spread.
  Point lo = points_[order_[begin]], hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  (void)depth;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <int D>
typename KdTree<D>::Hit KdTree<D>::nearest(const Point& q) const {
  Hit best{0, std::numeric_limits<double>::infinity()};
  search_nearest(0, q, best);
  return best;
}

template <int D>
double KdTree<D>::distance(const Point& q) const {
  return std::sqrt(nearest(q).dist2);
}

template <int D>
void KdTree<D>::search_nearest(int id, const Point& q, Hit& best) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const double d2 = (points_[order_[i]] - q).squaredNorm();
      if (d2 < best.dist2) best = Hit{order_[i], d2};
    }
    return;
  }
  const double diff = q[n.axis] - n.split;
  const int first = diff < 0.0 ? n.left : n.right;
  const int second = diff < 0.0 ? n.right : n.left;
  search_nearest(first, q, best);
  if (diff * diff < best.dist2) search_nearest(second, q, best);
}

template <int D>
std::vector<typename KdTree<D>::Hit> KdTree<D>::knn(const Point& q,
                                                    std::size_t k) const {
  std::vector<Hit> heap;
  if (points_.empty() || k == 0) return heap;
  heap.reserve(k + 1);
  search_knn(0, q, k, heap);
  std::sort_heap(heap.begin(), heap.end(),
                 [](const Hit& a, const Hit& b) { return a.dist2 < b.dist2; });
  return heap;
}

template <int D>
void KdTree<D>::search_knn(int id, const Point& q, std::size_t k,
                           std::vector<Hit>& heap) const {
  const auto cmp = [](const Hit& a, const Hit& b) { return a.dist2 < b.dist2; };
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.axis < 0) {
    for (std::size_t i = n.begin; i < n.end; ++i) {
      const double d2 = (points_[order_[i]] - q).squaredNorm();
      if (heap.size() < k) {
        heap.push_back(Hit{order_[i], d2});
        std::push_heap(heap.begin(), heap.end(), cmp);
      } else if (d2 < heap.front().dist2) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        heap.back() = Hit{order_[i], d2};
        std::push_heap(heap.begin(), heap.end(), cmp);
      }
    }
    return;
  }
  const double diff = q[n.axis] - n.split;
  const int first = diff < 0.0 ? n.left : n.right;
  const int second = diff < 0.0 ? n.right : n.left;
  search_knn(first, q, k, heap);
  if (heap.size() < k || diff * diff < heap.front().dist2) {
    search_knn(second, q, k, heap);
  }
}

template class KdTree<3>;
template class KdTree<6>;

}  // namespace hullkit
