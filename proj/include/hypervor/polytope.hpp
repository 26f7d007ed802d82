#pragma once

// Convex polyhedra in H^3 as finite half-space intersections.
//
// Every polyhedron is computed in the Beltrami-Klein chart of a frame
// centred at a chosen point, where hyperbolic half-spaces are Euclidean
// half-spaces. Unbounded polyhedra are cut by a fixed 80-plane polytope
// whose vertices lie on the Klein sphere of the truncation radius; faces
// that rest on that polytope are flagged artificial.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "hypervor/detail/clipper.hpp"
#include "hypervor/detail/sphere_polytope.hpp"
#include "hypervor/errors.hpp"
#include "hypervor/kernel.hpp"
#include "hypervor/tolerances.hpp"

namespace hypervor {

// Klein chart of the frame obtained by boosting the basepoint to `center`.
class KleinFrame {
 public:
  KleinFrame() = default;
  explicit KleinFrame(const MinkowskiPoint& center)
      : center_(center),
        to_world_(LorentzIsometry::boost_to(center)),
        to_local_(to_world_.inverse()) {}

  const MinkowskiPoint& center() const { return center_; }
  const LorentzIsometry& to_world() const { return to_world_; }
  const LorentzIsometry& to_local() const { return to_local_; }

  Vec3 klein(const MinkowskiPoint& x) const {
    return apply(to_local_, x).klein();
  }

  MinkowskiPoint lift(const Vec3& k) const {
    return apply(to_world_, MinkowskiPoint::from_klein(k));
  }

  detail::Plane plane(const HalfSpace& h) const {
    const Vec4 u = to_local_.apply_vector(h.normal());
    return detail::normalized_plane({u[1], u[2], u[3]}, u[0]);
  }

  HalfSpace halfspace(const Vec3& a, double b) const {
    return HalfSpace::from_covector(to_world_.apply_vector({b, a[0], a[1], a[2]}));
  }

 private:
  MinkowskiPoint center_;
  LorentzIsometry to_world_;
  LorentzIsometry to_local_;
};

struct Face {
  int dim = 0;
  // Active half-spaces, as indices into ConvexPolyhedron::halfspaces().
  std::vector<int> defining_halfspace_indices;
  // Every input half-space active on the face, including weakly redundant
  // ones, as indices into ConvexPolyhedron::input_halfspaces().
  std::vector<int> support;
  std::vector<int> vertex_ids;
  std::vector<MinkowskiPoint> vertex_witnesses;
  // Lies on the truncation polytope.
  bool is_artificial = false;
  // Genuine face with an artificial sub-face (unbounded before truncation).
  bool clipped = false;
};

class ConvexPolyhedron;

namespace detail {
struct PolyhedronBuilder;
}

class ConvexPolyhedron {
 public:
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  const std::vector<HalfSpace>& input_halfspaces() const { return inputs_; }
  // Input index of each irredundant half-space.
  const std::vector<int>& kept_inputs() const { return kept_; }
  double truncation_radius() const { return radius_; }
  // Every point within this distance of the centre lies inside the
  // truncation polytope.
  double core_radius() const { return core_radius_; }
  const KleinFrame& frame() const { return frame_; }
  const MinkowskiPoint& center() const { return frame_.center(); }
  int dim() const { return dim_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<MinkowskiPoint>& vertices() const { return vertices_; }
  const std::vector<Vec3>& klein_vertices() const { return klein_; }

  std::vector<int> face_ids(int d) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(faces_.size()); ++i)
      if (faces_[i].dim == d) out.push_back(i);
    return out;
  }

  std::size_t count(int d, bool genuine_only = false) const {
    std::size_t n = 0;
    for (const auto& f : faces_)
      if (f.dim == d && !(genuine_only && f.is_artificial)) ++n;
    return n;
  }

  // No face lies on the truncation polytope.
  bool compact() const {
    for (const auto& f : faces_)
      if (f.is_artificial) return false;
    return true;
  }

  // Membership in the half-space intersection (ignores truncation).
  bool contains(const MinkowskiPoint& x, double slack = tol::kGeom) const {
    for (const auto& h : halfspaces_)
      if (!h.contains(x, slack)) return false;
    return true;
  }

  // Index of the whole polyhedron as a face.
  int top_face() const {
    for (int i = 0; i < static_cast<int>(faces_.size()); ++i)
      if (faces_[i].dim == dim_) return i;
    return -1;
  }

 private:
  friend struct detail::PolyhedronBuilder;

  std::vector<HalfSpace> inputs_;
  std::vector<HalfSpace> halfspaces_;
  std::vector<int> kept_;
  KleinFrame frame_;
  double radius_ = 0.0;
  double core_radius_ = 0.0;
  int dim_ = 0;
  std::vector<Face> faces_;
  std::vector<MinkowskiPoint> vertices_;
  std::vector<Vec3> klein_;
};

namespace detail {

inline int affine_rank(const std::vector<Vec3>& pts,
                       const std::vector<int>& ids) {
  if (ids.size() <= 1) return 0;
  Eigen::MatrixXd d(ids.size() - 1, 3);
  const Vec3& o = pts[ids[0]];
  for (std::size_t r = 1; r < ids.size(); ++r)
    for (int c = 0; c < 3; ++c) d(r - 1, c) = pts[ids[r]][c] - o[c];
  // Absolute floor guards against rank being read off numerical noise when
  // all points coincide.
  if (d.norm() < tol::kSnap) return 0;
  return relative_rank(d, tol::kRank);
}

enum class Start { Sphere, Box };

struct PolyhedronBuilder {
  // Runs the clipper over `planes` (frame coordinates). Truncation plane
  // ids occupy [0, ntrunc).
  static Clipper run(const std::vector<Plane>& planes, Start start,
                     double rho, int& ntrunc) {
    Clipper c = start == Start::Sphere ? sphere_clipper(rho) : Clipper::box(1.0);
    ntrunc = static_cast<int>(c.planes().size());
    for (const auto& p : planes) c.add(p);
    return c;
  }

  static std::vector<Vec3> positions(const Clipper& c) {
    std::vector<Vec3> out;
    for (const auto& v : c.vertices()) out.push_back(v.k);
    return out;
  }

  static bool same_vertex_sets(const Clipper& a, const Clipper& b) {
    if (a.vertices().size() != b.vertices().size()) return false;
    for (const auto& v : a.vertices()) {
      bool found = false;
      for (const auto& w : b.vertices())
        if (norm3(v.k - w.k) <= 1e3 * tol::kSnap) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }

  static ConvexPolyhedron build(const std::vector<HalfSpace>& inputs,
                                const MinkowskiPoint& center, double radius,
                                Start start) {
    if (!(radius > 0.0)) throw DomainError("truncation radius must be positive");
    ConvexPolyhedron p;
    p.inputs_ = inputs;
    p.frame_ = KleinFrame(center);
    p.radius_ = radius;
    const double rho = std::tanh(radius);
    p.core_radius_ = start == Start::Sphere ? std::atanh(sphere_inradius(rho))
                                            : radius;

    std::vector<Plane> planes;
    planes.reserve(inputs.size());
    for (const auto& h : inputs) planes.push_back(p.frame_.plane(h));

    int ntrunc = 0;
    Clipper c = run(planes, start, rho, ntrunc);
    auto input_of = [&](int id) { return id - ntrunc; };

    const auto pos = positions(c);
    std::vector<int> all(pos.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    p.dim_ = affine_rank(pos, all);

    for (const auto& k : pos) {
      if (!(dot3(k, k) < 1.0))
        throw InvariantViolation("polyhedron vertex outside the Klein ball");
      p.klein_.push_back(k);
      p.vertices_.push_back(p.frame_.lift(k));
    }

    // Faces as (vertex set, support) pairs.
    struct Raw {
      int dim;
      std::vector<int> verts;
      std::vector<int> active;  // clipper plane ids
    };
    std::vector<Raw> raw;
    const auto& V = c.vertices();
    for (int i = 0; i < static_cast<int>(V.size()); ++i)
      raw.push_back({0, {i}, V[i].active});
    if (p.dim_ >= 2) {
      for (const auto& [u, v] : c.edges())
        raw.push_back({1, {u, v}, intersect_sorted(V[u].active, V[v].active)});
    }
    std::map<std::vector<int>, int> facet_of_vertex_set;
    std::vector<int> facet_plane_of;  // clipper plane id of each facet
    if (p.dim_ == 3) {
      std::set<int> used;
      for (const auto& v : V) used.insert(v.active.begin(), v.active.end());
      for (int id : used) {
        std::vector<int> vs;
        for (int i = 0; i < static_cast<int>(V.size()); ++i)
          if (std::binary_search(V[i].active.begin(), V[i].active.end(), id))
            vs.push_back(i);
        if (vs.size() < 3 || affine_rank(pos, vs) != 2) continue;
        if (facet_of_vertex_set.count(vs)) continue;
        std::vector<int> act = V[vs[0]].active;
        for (int i : vs) act = intersect_sorted(act, V[i].active);
        facet_of_vertex_set.emplace(vs, static_cast<int>(raw.size()));
        raw.push_back({2, vs, act});
      }
    }
    {
      std::vector<int> act = V.empty() ? std::vector<int>{} : V[0].active;
      for (const auto& v : V) act = intersect_sorted(act, v.active);
      if (p.dim_ == 3) act.clear();
      if (p.dim_ > 0) raw.push_back({p.dim_, all, act});
    }

    // Irredundant subfamily.
    std::vector<int> kept;
    if (p.dim_ == 3) {
      std::set<int> chosen;
      for (const auto& [vs, idx] : facet_of_vertex_set) {
        int best = -1;
        for (int id : raw[idx].active)
          if (id >= ntrunc && (best < 0 || id < best)) best = id;
        if (best >= 0) chosen.insert(input_of(best));
      }
      kept.assign(chosen.begin(), chosen.end());
    } else {
      // Remove-and-recheck, in input order.
      std::vector<int> current(inputs.size());
      for (std::size_t i = 0; i < current.size(); ++i)
        current[i] = static_cast<int>(i);
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::vector<int> trial;
        std::vector<Plane> tp;
        for (int j : current)
          if (j != static_cast<int>(i)) {
            trial.push_back(j);
            tp.push_back(planes[j]);
          }
        int nt = 0;
        try {
          Clipper c2 = run(tp, start, rho, nt);
          if (same_vertex_sets(c, c2)) current = trial;
        } catch (const DegenerateInput&) {
        }
      }
      kept = current;
    }
    p.kept_ = kept;
    for (int k : kept) p.halfspaces_.push_back(inputs[k]);
    std::vector<int> kept_pos(inputs.size(), -1);
    for (std::size_t i = 0; i < kept.size(); ++i) kept_pos[kept[i]] = static_cast<int>(i);

    for (const auto& r : raw) {
      Face f;
      f.dim = r.dim;
      f.vertex_ids = r.verts;
      for (int i : r.verts) f.vertex_witnesses.push_back(p.vertices_[i]);
      for (int id : r.active) {
        if (id < ntrunc) {
          f.is_artificial = true;
          continue;
        }
        const int in = input_of(id);
        f.support.push_back(in);
        if (kept_pos[in] >= 0) f.defining_halfspace_indices.push_back(kept_pos[in]);
      }
      std::sort(f.defining_halfspace_indices.begin(),
                f.defining_halfspace_indices.end());
      p.faces_.push_back(std::move(f));
    }
    // A genuine face is clipped when one of its vertices is artificial.
    for (auto& f : p.faces_) {
      if (f.is_artificial) continue;
      for (int v : f.vertex_ids)
        for (int id : V[v].active)
          if (id < ntrunc) f.clipped = true;
    }
    if (start == Start::Box)
      for (const auto& f : p.faces_)
        if (f.is_artificial)
          throw InvariantViolation("polyhedron expected to be compact is not");
    return p;
  }
};

inline MinkowskiPoint minkowski_centroid(const std::vector<MinkowskiPoint>& pts) {
  Vec4 s{0, 0, 0, 0};
  for (const auto& q : pts) s = s + q.coords();
  return MinkowskiPoint::from_coords(MinkowskiPoint::renormalized(s));
}

}  // namespace detail

// Irredundant subfamily of `halfspaces` relative to the truncation ball
// B(center, truncation_radius), with its face lattice.
inline ConvexPolyhedron reduce_irredundant(const std::vector<HalfSpace>& halfspaces,
                                           double truncation_radius,
                                           const MinkowskiPoint& center = {}) {
  return detail::PolyhedronBuilder::build(halfspaces, center, truncation_radius,
                                          detail::Start::Sphere);
}

inline const std::vector<Face>& face_lattice(const ConvexPolyhedron& p) {
  return p.faces();
}

namespace detail {

// Builds a compact polyhedron from planes known to bound a region well
// inside the Klein ball of the frame at `center`.
inline ConvexPolyhedron compact_from(const std::vector<HalfSpace>& hs,
                                     const MinkowskiPoint& center) {
  ConvexPolyhedron p =
      PolyhedronBuilder::build(hs, center, 1.0, Start::Box);
  double r = 0.0;
  for (const auto& v : p.vertices()) r = std::max(r, dist(center, v));
  return PolyhedronBuilder::build(hs, center, std::max(r, tol::kGeom), Start::Box);
}

// Convex hull in Klein coordinates of the frame at the Minkowski centroid.
inline std::vector<HalfSpace> hull_planes(const std::vector<MinkowskiPoint>& points,
                                          const KleinFrame& frame) {
  std::vector<Vec3> k;
  for (const auto& p : points) k.push_back(frame.klein(p));
  Vec3 mean{0, 0, 0};
  for (const auto& q : k) mean = mean + q;
  mean = (1.0 / static_cast<double>(k.size())) * mean;

  Eigen::MatrixXd d(k.size(), 3);
  for (std::size_t i = 0; i < k.size(); ++i)
    for (int c = 0; c < 3; ++c) d(i, c) = k[i][c] - mean[c];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > tol::kSnap)
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > tol::kRank * s(0)) ++rank;
  const Eigen::Matrix3d V = svd.matrixV();

  std::vector<HalfSpace> out;
  auto add_pair = [&](const Vec3& n, const Vec3& through) {
    const double b = dot3(n, through);
    out.push_back(frame.halfspace(n, b));
    out.push_back(frame.halfspace(-1.0 * n, -b));
  };
  auto col = [&](int j) { return Vec3{V(0, j), V(1, j), V(2, j)}; };

  if (rank == 3) {
    // Polar duality: hull = {x : y.x <= 1 for polar vertices y}, with the
    // origin shifted to the centroid, which is interior.
    std::vector<Vec3> q;
    for (const auto& p : k) q.push_back(p - mean);
    double box = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt, box *= 10.0) {
      Clipper c = Clipper::box(box);
      for (const auto& p : q) c.add(normalized_plane(p, 1.0));
      bool on_box = false;
      for (const auto& v : c.vertices())
        for (int id : v.active)
          if (id < 6) on_box = true;
      if (on_box) continue;
      for (const auto& v : c.vertices()) {
        const double b = 1.0 + dot3(v.k, mean);
        out.push_back(frame.halfspace(v.k, b));
      }
      return out;
    }
    throw DegenerateInput("hull polar did not close; points nearly coplanar");
  }
  // Lower rank: equality pairs for the normal directions, then an in-plane
  // hull.
  for (int j = rank; j < 3; ++j) add_pair(col(j), mean);
  if (rank == 0) return out;
  if (rank == 1) {
    const Vec3 e = col(0);
    double lo = 1e300, hi = -1e300;
    for (const auto& p : k) {
      lo = std::min(lo, dot3(e, p));
      hi = std::max(hi, dot3(e, p));
    }
    out.push_back(frame.halfspace(e, hi));
    out.push_back(frame.halfspace(-1.0 * e, -lo));
    return out;
  }
  // rank 2: monotone chain in the plane spanned by the first two columns.
  const Vec3 e1 = col(0), e2 = col(1);
  std::vector<std::array<double, 2>> xy;
  for (const auto& p : k) xy.push_back({dot3(e1, p - mean), dot3(e2, p - mean)});
  std::vector<int> idx(xy.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return xy[a] < xy[b]; });
  auto cross = [&](int o, int a, int b) {
    return (xy[a][0] - xy[o][0]) * (xy[b][1] - xy[o][1]) -
           (xy[a][1] - xy[o][1]) * (xy[b][0] - xy[o][0]);
  };
  std::vector<int> hull(2 * idx.size());
  int m = 0;
  for (int i : idx) {
    while (m >= 2 && cross(hull[m - 2], hull[m - 1], i) <= 0) --m;
    hull[m++] = i;
  }
  for (int t = static_cast<int>(idx.size()) - 2, lower = m + 1; t >= 0; --t) {
    const int i = idx[t];
    while (m >= lower && cross(hull[m - 2], hull[m - 1], i) <= 0) --m;
    hull[m++] = i;
  }
  hull.resize(std::max(m - 1, 1));
  for (std::size_t a = 0; a < hull.size(); ++a) {
    const int i = hull[a], j = hull[(a + 1) % hull.size()];
    const double ex = xy[j][0] - xy[i][0], ey = xy[j][1] - xy[i][1];
    // Outward normal of a counterclockwise edge.
    const Vec3 n = ey * e1 - ex * e2;
    out.push_back(frame.halfspace(n, dot3(n, k[i])));
  }
  return out;
}

}  // namespace detail

// Compact hull; vertices are snapped to the input points they came from.
inline ConvexPolyhedron convex_hull_finite(const std::vector<MinkowskiPoint>& points) {
  if (points.empty()) throw PreconditionError("convex hull of no points");
  const MinkowskiPoint c = detail::minkowski_centroid(points);
  const KleinFrame frame(c);
  ConvexPolyhedron p = detail::compact_from(detail::hull_planes(points, frame), c);
  return p;
}

// Input point nearest to each hull vertex.
inline std::vector<int> hull_vertex_inputs(const ConvexPolyhedron& hull,
                                           const std::vector<MinkowskiPoint>& points) {
  std::vector<int> out;
  for (const auto& v : hull.vertices()) {
    int best = 0;
    double bd = 1e300;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      const double d = dist(v, points[i]);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    out.push_back(best);
  }
  return out;
}

inline ConvexPolyhedron intersect(const ConvexPolyhedron& p1,
                                  const ConvexPolyhedron& p2) {
  std::vector<HalfSpace> hs = p1.halfspaces();
  hs.insert(hs.end(), p2.halfspaces().begin(), p2.halfspaces().end());
  if (p1.compact() || p2.compact()) {
    const MinkowskiPoint& c = p1.compact() ? p1.center() : p2.center();
    return detail::compact_from(hs, c);
  }
  return reduce_irredundant(hs, std::min(p1.truncation_radius(), p2.truncation_radius()),
                            p1.center());
}

// tanh of the Klein radius at which 12 icosahedron points around a point
// contain its ball of the given radius: the icosahedron's inradius is
// 0.7946... of its circumradius.
inline double icosahedron_inradius_ratio() {
  const auto v = detail::icosahedron_vertices();
  const auto f = detail::icosahedron_faces()[0];
  const Vec3 n = cross3(v[f[1]] - v[f[0]], v[f[2]] - v[f[0]]);
  return std::abs(dot3(n, v[f[0]])) / norm3(n);
}

inline ConvexPolyhedron enclose_compact(const std::vector<MinkowskiPoint>& points,
                                        double margin) {
  if (points.empty()) throw PreconditionError("enclose_compact needs points");
  if (!(margin > 0.0)) throw DomainError("margin must be positive");
  const double r = std::atanh(std::tanh(margin) / icosahedron_inradius_ratio());
  std::vector<MinkowskiPoint> cloud;
  for (const auto& p : points)
    for (const auto& d : detail::icosahedron_vertices())
      cloud.push_back(exp_map(p, d, r));
  return convex_hull_finite(cloud);
}

// Compact polyhedron inside f containing `keep`: f cut by a compact
// neighbourhood of the kept points.
inline ConvexPolyhedron truncate_to_compact(const ConvexPolyhedron& f,
                                            const std::vector<MinkowskiPoint>& keep,
                                            double margin = 0.1) {
  for (const auto& k : keep)
    if (!f.contains(k))
      throw PreconditionError("truncate_to_compact: a kept point is outside f");
  if (f.compact()) return f;
  const ConvexPolyhedron g = enclose_compact(keep, margin);
  return intersect(g, f);
}

}  // namespace hypervor
