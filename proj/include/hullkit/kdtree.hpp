#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hullkit {

/// Static k-d tree over points in R^D (median splits, leaf buckets).
template <int D>
class KdTree {
 public:
  using Point = Eigen::Matrix<double, D, 1>;

  struct Hit {
    std::size_t index;
    double dist2;
  };

  KdTree() = default;
  explicit KdTree(std::vector<Point> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& point(std::size_t i) const { return points_[i]; }

  /// Nearest stored point. Precondition: !empty().
  Hit nearest(const Point& q) const;

  /// k nearest stored points sorted by distance (fewer if size() < k).
  std::vector<Hit> knn(const Point& q, std::size_t k) const;

  double distance(const Point& q) const;

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    std::size_t begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth);
  void search_nearest(int node, const Point& q, Hit& best) const;
  void search_knn(int node, const Point& q, std::size_t k,
                  std::vector<Hit>& heap) const;

  static constexpr std::size_t kLeafSize = 12;

  std::vector<Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

using KdTree3 = KdTree<3>;
using KdTree6 = KdTree<6>;

extern template class KdTree<3>;
extern template class KdTree<6>;

}  // namespace hullkit
