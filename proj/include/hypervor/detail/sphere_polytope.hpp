#pragma once

// Fixed 80-plane approximation of the unit sphere: one plane per triangle
// of a once-subdivided icosahedron, normal through the triangle centroid.
// Built once by clipping a cube, then scaled per use.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "hypervor/detail/clipper.hpp"

namespace hypervor::detail {

inline std::vector<Vec3> icosahedron_vertices() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p = (1.0 / norm3(p)) * p;
  return v;
}

inline std::vector<std::array<int, 3>> icosahedron_faces() {
  return {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

struct UnitSphereTruncation {
  std::vector<Plane> planes;  // offset 1 (inradius 1)
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  double circumradius = 0.0;  // max vertex norm
};

inline UnitSphereTruncation build_unit_sphere_truncation() {
  auto verts = icosahedron_vertices();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    Vec3 m = 0.5 * (verts[a] + verts[b]);
    m = (1.0 / norm3(m)) * m;
    verts.push_back(m);
    const int id = static_cast<int>(verts.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  std::vector<Vec3> normals;
  for (const auto& f : icosahedron_faces()) {
    const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
    const std::array<std::array<int, 3>, 4> tris = {
        {{f[0], a, c}, {f[1], b, a}, {f[2], c, b}, {a, b, c}}};
    for (const auto& t : tris) {
      const Vec3 g = verts[t[0]] + verts[t[1]] + verts[t[2]];
      normals.push_back((1.0 / norm3(g)) * g);
    }
  }

  Clipper c = Clipper::box(4.0);
  for (const auto& n : normals) c.add({n, 1.0});

  // Drop the six box planes from the ids.
  UnitSphereTruncation out;
  out.planes.assign(c.planes().begin() + 6, c.planes().end());
  for (const auto& v : c.vertices()) {
    Vertex w;
    w.k = v.k;
    for (int id : v.active) {
      if (id < 6) throw InvariantViolation("sphere approximation is unbounded");
      w.active.push_back(id - 6);
    }
    out.circumradius = std::max(out.circumradius, norm3(v.k));
    out.vertices.push_back(std::move(w));
  }
  out.edges = c.edges();
  return out;
}

inline const UnitSphereTruncation& unit_sphere_truncation() {
  static const UnitSphereTruncation t = build_unit_sphere_truncation();
  return t;
}

inline constexpr int kSpherePlanes = 80;

// Approximation of the Euclidean ball of radius `rho` (< 1 in Klein use):
// vertices lie on the sphere of radius rho, plane ids 0..79.
inline Clipper sphere_clipper(double rho) {
  const auto& u = unit_sphere_truncation();
  const double s = rho / u.circumradius;
  std::vector<Plane> planes = u.planes;
  for (auto& p : planes) p.b *= s;
  std::vector<Vertex> verts = u.vertices;
  for (auto& v : verts) v.k = s * v.k;
  return Clipper(std::move(planes), std::move(verts), u.edges);
}

// Radius of the largest centered ball inside sphere_clipper(rho).
inline double sphere_inradius(double rho) {
  return rho / unit_sphere_truncation().circumradius;
}

}  // namespace hypervor::detail
