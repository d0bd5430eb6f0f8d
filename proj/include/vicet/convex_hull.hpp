#pragma once

// 3-d convex hull (incremental quickhull-style construction) supporting the
// inflated membership test used by chamfer evaluation: a point is accepted
// when it lies inside the hull scaled by (1 + inflation) about the mean of
// the hull vertices. Coplanar input (no volume) is an error — half-space
// membership would be meaningless.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "vicet/errors.hpp"
#include "vicet/geometry.hpp"

namespace vicet {

class ConvexHull3 {
 public:
  struct Facet {
    int a, b, c;     // vertex indices into the input points, outward wound
    Vec3 normal;     // unit outward normal
    double offset;   // normal . x == offset on the facet plane
  };

  static ConvexHull3 build(const std::vector<Vec3>& points) {
    if (points.size() < 4)
      throw DataError("convex hull needs at least 4 points");

    Vec3 lo = points[0], hi = points[0];
    for (const Vec3& p : points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double scale = (hi - lo).norm();
    if (!(scale > 0))
      throw DataError("convex hull input is degenerate (all points equal)");
    const double eps = 1e-9 * scale;

    ConvexHull3 hull;
    hull.seed_tetrahedron(points, eps);
    for (int i = 0; i < static_cast<int>(points.size()); ++i)
      hull.add_point(points, i, eps);
    hull.finish(points);
    return hull;
  }

  // True when p falls inside the hull inflated by the given factor about
  // the vertex mean (0 = exact hull; infinity accepts everything).
  bool contains(const Vec3& p, double inflation = 0.0) const {
    if (std::isinf(inflation)) return true;
    const Vec3 q = centroid_ + (p - centroid_) / (1.0 + inflation);
    for (const Facet& f : facets_)
      if (f.normal.dot(q) > f.offset + tol_) return false;
    return true;
  }

  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<int>& vertex_indices() const { return vertices_; }
  const Vec3& centroid() const { return centroid_; }

 private:
  struct Face {
    int a, b, c;
    Vec3 normal;
    double offset;
    bool alive = true;
  };

  static Face make_face(const std::vector<Vec3>& pts, int a, int b, int c) {
    Face f{a, b, c, Vec3::Zero(), 0.0, true};
    f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double len = f.normal.norm();
    if (len > 0) f.normal /= len;
    f.offset = f.normal.dot(pts[a]);
    return f;
  }

  void seed_tetrahedron(const std::vector<Vec3>& pts, double eps) {
    const int n = static_cast<int>(pts.size());

    // Two points far apart, then the farthest from their line, then the
    // farthest from that plane.
    int i0 = 0, i1 = 0;
    double best = -1.0;
    for (int d = 0; d < 3; ++d) {
      int lo = 0, hi = 0;
      for (int i = 1; i < n; ++i) {
        if (pts[i][d] < pts[lo][d]) lo = i;
        if (pts[i][d] > pts[hi][d]) hi = i;
      }
      const double dist = (pts[hi] - pts[lo]).norm();
      if (dist > best) { best = dist; i0 = lo; i1 = hi; }
    }
    if (best <= eps) throw DataError("convex hull input is degenerate");

    const Vec3 axis = (pts[i1] - pts[i0]).normalized();
    int i2 = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
      const Vec3 off = pts[i] - pts[i0];
      const double dist = (off - axis.dot(off) * axis).norm();
      if (dist > best) { best = dist; i2 = i; }
    }
    if (i2 < 0) throw DataError("convex hull input is collinear");

    const Vec3 normal = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
    int i3 = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
      const double dist = std::abs(normal.dot(pts[i] - pts[i0]));
      if (dist > best) { best = dist; i3 = i; }
    }
    if (i3 < 0) throw DataError("convex hull input is coplanar");

    faces_.push_back(make_face(pts, i0, i1, i2));
    faces_.push_back(make_face(pts, i0, i2, i3));
    faces_.push_back(make_face(pts, i0, i3, i1));
    faces_.push_back(make_face(pts, i1, i3, i2));
    const Vec3 inner = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
    for (Face& f : faces_) {
      if (f.normal.dot(inner) > f.offset) {  // flip to face outward
        std::swap(f.b, f.c);
        f = make_face(pts, f.a, f.b, f.c);
      }
    }
  }

  void add_point(const std::vector<Vec3>& pts, int idx, double eps) {
    const Vec3& p = pts[idx];

    std::vector<int> visible;
    for (int i = 0; i < static_cast<int>(faces_.size()); ++i)
      if (faces_[i].alive && faces_[i].normal.dot(p) > faces_[i].offset + eps)
        visible.push_back(i);
    if (visible.empty()) return;

    // Horizon: directed edges of visible faces whose reverse edge is not
    // itself part of a visible face.
    std::set<std::pair<int, int>> edges;
    for (int i : visible) {
      const Face& f = faces_[i];
      edges.insert({f.a, f.b});
      edges.insert({f.b, f.c});
      edges.insert({f.c, f.a});
      faces_[i].alive = false;
    }
    for (const auto& [a, b] : edges) {
      if (edges.count({b, a})) continue;  // interior edge
      Face nf = make_face(pts, a, b, idx);
      if (nf.normal.norm() == 0) continue;  // collinear horizon sliver
      faces_.push_back(nf);
    }
  }

  void finish(const std::vector<Vec3>& pts) {
    std::set<int> used;
    for (const Face& f : faces_) {
      if (!f.alive) continue;
      facets_.push_back({f.a, f.b, f.c, f.normal, f.offset});
      used.insert(f.a);
      used.insert(f.b);
      used.insert(f.c);
    }
    if (facets_.size() < 4)
      throw DataError("convex hull construction collapsed");

    centroid_ = Vec3::Zero();
    for (int i : used) {
      vertices_.push_back(i);
      centroid_ += pts[i];
    }
    centroid_ /= static_cast<double>(used.size());

    Vec3 lo = pts[*used.begin()], hi = lo;
    for (int i : used) {
      lo = lo.cwiseMin(pts[i]);
      hi = hi.cwiseMax(pts[i]);
    }
    tol_ = 1e-9 * (1.0 + (hi - lo).norm());
  }

  std::vector<Face> faces_;
  std::vector<Facet> facets_;
  std::vector<int> vertices_;
  Vec3 centroid_ = Vec3::Zero();
  double tol_ = 1e-9;
};

}  // namespace vicet
