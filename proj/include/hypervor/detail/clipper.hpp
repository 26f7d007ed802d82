#pragma once

// Incremental half-space clipping of a bounded Euclidean polytope
// (double-description style). Each vertex carries the full set of plane ids
// it lies on; edges are kept explicitly and new polygon edges are recovered
// combinatorially from active sets.

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "hypervor/errors.hpp"
#include "hypervor/kernel.hpp"
#include "hypervor/tolerances.hpp"

namespace hypervor::detail {

// a.k <= b with |a| = 1.
struct Plane {
  Vec3 a;
  double b;
};

struct Vertex {
  Vec3 k;
  std::vector<int> active;  // sorted plane ids
};

using Edge = std::pair<int, int>;

inline std::vector<int> intersect_sorted(const std::vector<int>& x,
                                         const std::vector<int>& y) {
  std::vector<int> out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                        std::back_inserter(out));
  return out;
}

inline bool includes_sorted(const std::vector<int>& big,
                            const std::vector<int>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline void insert_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

inline Plane normalized_plane(const Vec3& a, double b) {
  const double n = norm3(a);
  if (!(n > 0.0)) throw InvariantViolation("plane with zero normal");
  return {(1.0 / n) * a, b / n};
}

class Clipper {
 public:
  Clipper() = default;
  Clipper(std::vector<Plane> planes, std::vector<Vertex> verts,
          std::vector<Edge> edges)
      : planes_(std::move(planes)),
        verts_(std::move(verts)),
        edges_(std::move(edges)) {}

  // Axis-aligned cube [-h, h]^3; plane ids 0..5.
  static Clipper box(double h) {
    std::vector<Plane> planes;
    for (int axis = 0; axis < 3; ++axis)
      for (double s : {1.0, -1.0}) {
        Vec3 a{0, 0, 0};
        a[axis] = s;
        planes.push_back({a, h});
      }
    std::vector<Vertex> verts;
    for (int i = 0; i < 8; ++i) {
      Vertex v;
      v.k = {(i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h};
      for (int axis = 0; axis < 3; ++axis)
        insert_sorted(v.active, 2 * axis + (((i >> axis) & 1) ? 0 : 1));
      verts.push_back(v);
    }
    std::vector<Edge> edges;
    for (int i = 0; i < 8; ++i)
      for (int axis = 0; axis < 3; ++axis) {
        const int j = i ^ (1 << axis);
        if (i < j) edges.emplace_back(i, j);
      }
    return Clipper(std::move(planes), std::move(verts), std::move(edges));
  }

  const std::vector<Plane>& planes() const { return planes_; }
  const std::vector<Vertex>& vertices() const { return verts_; }
  const std::vector<Edge>& edges() const { return edges_; }

  double residual(const Vec3& k, int plane) const {
    return dot3(planes_[plane].a, k) - planes_[plane].b;
  }

  // Appends the plane and clips; returns its id.
  int add(const Plane& p) {
    planes_.push_back(p);
    const int id = static_cast<int>(planes_.size()) - 1;
    clip(id);
    return id;
  }

 private:
  enum class Side { In, On, Out };

  void clip(int h) {
    const std::size_t n = verts_.size();
    std::vector<double> r(n);
    std::vector<Side> side(n);
    bool any_out = false, any_kept = false;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = residual(verts_[i].k, h);
      const double a = std::abs(r[i]);
      if (a > tol::kSnap && a <= tol::kAmbiguous) {
        std::ostringstream os;
        os << "plane passes within " << a
           << " of a vertex (ambiguous incidence); perturb the input";
        throw DegenerateInput(os.str());
      }
      side[i] = r[i] > tol::kSnap ? Side::Out
                : r[i] < -tol::kSnap ? Side::In
                                     : Side::On;
      any_out |= side[i] == Side::Out;
      any_kept |= side[i] != Side::Out;
    }
    if (!any_kept) throw EmptyPolyhedron("half-space misses the polytope");
    if (!any_out) {
      for (std::size_t i = 0; i < n; ++i)
        if (side[i] == Side::On) insert_sorted(verts_[i].active, h);
      return;
    }

    std::vector<int> remap(n, -1);
    std::vector<Vertex> next;
    for (std::size_t i = 0; i < n; ++i) {
      if (side[i] == Side::Out) continue;
      remap[i] = static_cast<int>(next.size());
      next.push_back(verts_[i]);
      if (side[i] == Side::On) insert_sorted(next.back().active, h);
    }

    std::set<Edge> edge_set;
    auto add_edge = [&](int a, int b) {
      if (a == b) return;
      edge_set.insert(a < b ? Edge{a, b} : Edge{b, a});
    };
    for (const auto& [u, v] : edges_) {
      const Side su = side[u], sv = side[v];
      if (su != Side::Out && sv != Side::Out) {
        add_edge(remap[u], remap[v]);
      } else if ((su == Side::In && sv == Side::Out) ||
                 (su == Side::Out && sv == Side::In)) {
        const int in = su == Side::In ? u : v;
        const int out = su == Side::In ? v : u;
        const double t = r[in] / (r[in] - r[out]);
        Vertex nv;
        nv.k = verts_[in].k + t * (verts_[out].k - verts_[in].k);
        nv.active = intersect_sorted(verts_[u].active, verts_[v].active);
        insert_sorted(nv.active, h);
        next.push_back(std::move(nv));
        add_edge(remap[in], static_cast<int>(next.size()) - 1);
      }
    }

    // New polygon on plane h.
    std::vector<int> on_h;
    for (int i = 0; i < static_cast<int>(next.size()); ++i)
      if (std::binary_search(next[i].active.begin(), next[i].active.end(), h))
        on_h.push_back(i);
    for (std::size_t x = 0; x < on_h.size(); ++x)
      for (std::size_t y = x + 1; y < on_h.size(); ++y) {
        const int u = on_h[x], v = on_h[y];
        if (edge_set.count({u, v})) continue;
        const auto common = intersect_sorted(next[u].active, next[v].active);
        bool spans_line = false;
        for (int g : common)
          if (g != h && norm3(cross3(planes_[g].a, planes_[h].a)) > 1e-9) {
            spans_line = true;
            break;
          }
        if (!spans_line) continue;
        bool blocked = false;
        for (int w : on_h)
          if (w != u && w != v && includes_sorted(next[w].active, common)) {
            blocked = true;
            break;
          }
        if (!blocked) edge_set.insert({u, v});
      }

    verts_ = std::move(next);
    edges_.assign(edge_set.begin(), edge_set.end());
  }

  std::vector<Plane> planes_;
  std::vector<Vertex> verts_;
  std::vector<Edge> edges_;
};

}  // namespace hypervor::detail
