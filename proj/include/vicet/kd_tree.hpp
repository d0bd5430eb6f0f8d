#pragma once

// Exact 3-d kd-tree for nearest-neighbour queries. Splits on the widest
// axis at the median, so the tree is balanced regardless of input order.
// Queries prune with the usual hyperplane test and are exact, not
// approximate — chamfer distances depend on it.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"

namespace vicet {

class KdTree {
 public:
  struct Hit {
    int index = -1;  // into the points() array
    double dist2 = std::numeric_limits<double>::infinity();
  };

  explicit KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.empty()) throw DataError("kd-tree needs at least one point");
    std::vector<int> order(points_.size());
    std::iota(order.begin(), order.end(), 0);
    nodes_.reserve(points_.size());
    root_ = build(order.data(), static_cast<int>(order.size()));
  }

  Hit nearest(const Vec3& query) const {
    Hit best;
    search(root_, query, best);
    return best;
  }

  const std::vector<Vec3>& points() const { return points_; }
  size_t size() const { return points_.size(); }

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(int* order, int count) {
    if (count == 0) return -1;

    Vec3 lo = points_[order[0]], hi = points_[order[0]];
    for (int i = 1; i < count; ++i) {
      lo = lo.cwiseMin(points_[order[i]]);
      hi = hi.cwiseMax(points_[order[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);

    const int mid = count / 2;
    std::nth_element(order, order + mid, order + count,
                     [&](int a, int b) {
                       return points_[a][axis] < points_[b][axis];
                     });

    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({order[mid], axis, -1, -1});
    const int left = build(order, mid);
    const int right = build(order + mid + 1, count - mid - 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(int id, const Vec3& query, Hit& best) const {
    if (id < 0) return;
    const Node& node = nodes_[id];
    const Vec3& p = points_[node.point];

    const double d2 = (query - p).squaredNorm();
    if (d2 < best.dist2) best = {node.point, d2};

    const double gap = query[node.axis] - p[node.axis];
    const int first = gap < 0 ? node.left : node.right;
    const int second = gap < 0 ? node.right : node.left;
    search(first, query, best);
    if (gap * gap < best.dist2) search(second, query, best);
  }

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace vicet
