#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hypervor/polytope.hpp"
#include "support.hpp"

using namespace hypervor;

namespace {

std::vector<HalfSpace> simplex_halfspaces(const std::vector<MinkowskiPoint>& v) {
  return {hvtest::plane_through(v[1], v[2], v[3], v[0]),
          hvtest::plane_through(v[0], v[2], v[3], v[1]),
          hvtest::plane_through(v[0], v[1], v[3], v[2]),
          hvtest::plane_through(v[0], v[1], v[2], v[3])};
}

std::vector<HalfSpace> random_bisectors(Rng& rng, int n, const MinkowskiPoint& site) {
  std::vector<HalfSpace> out;
  while (static_cast<int>(out.size()) < n) {
    const auto q = hvtest::random_point(rng, 2.5);
    if (dist(site, q) < 0.2) continue;
    out.push_back(bisector_halfspace(site, q));
  }
  return out;
}

bool satisfies_all_but(const std::vector<HalfSpace>& hs, int skip,
                       const MinkowskiPoint& x) {
  for (int i = 0; i < static_cast<int>(hs.size()); ++i)
    if (i != skip && !hs[i].contains(x, 0.0)) return false;
  return true;
}

// Euclidean facet/edge/vertex counts for compact 3-polytopes.
void expect_euler(const ConvexPolyhedron& p) {
  const long v = p.count(0), e = p.count(1), f = p.count(2);
  EXPECT_EQ(v - e + f, 2);
}

}  // namespace

TEST(ReduceIrredundant, DuplicateDropped) {
  const HalfSpace h = HalfSpace::from_covector({0, 1, 0, 0});
  const auto p = reduce_irredundant({h, h}, 2.0);
  ASSERT_EQ(p.halfspaces().size(), 1u);
  EXPECT_EQ(p.kept_inputs(), std::vector<int>{0});
}

TEST(ReduceIrredundant, WeakerParallelDropped) {
  const HalfSpace strong = HalfSpace::from_covector({0, 1, 0, 0});
  // {x1 <= 0.3 x0}: contains {x1 <= 0}.
  const HalfSpace weak = HalfSpace::from_covector({0.3, 1, 0, 0});
  const auto p = reduce_irredundant({weak, strong}, 2.0);
  ASSERT_EQ(p.kept_inputs(), std::vector<int>{1});
}

TEST(ReduceIrredundant, EmptyIntersectionThrows) {
  // {x1 <= 0.3 x0} and {x1 >= -0.3 x0} overlap; the mirrored pair does not.
  const HalfSpace a = HalfSpace::from_covector({0.3, 1, 0, 0});
  const HalfSpace b = HalfSpace::from_covector({0.3, -1, 0, 0});
  const HalfSpace c = HalfSpace::from_covector({-0.3, 1, 0, 0});
  const HalfSpace d = HalfSpace::from_covector({-0.3, -1, 0, 0});
  EXPECT_NO_THROW(reduce_irredundant({a, b}, 2.0));
  EXPECT_THROW(reduce_irredundant({c, d}, 2.0), EmptyPolyhedron);
}

// Every kept half-space has a witness violating it while satisfying the
// rest; every dropped one is implied on random samples.
TEST(ReduceIrredundant, RandomBisectorsWitnesses) {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const MinkowskiPoint site;
    const auto hs = random_bisectors(rng, 20, site);
    const auto p = reduce_irredundant(hs, 3.0, site);
    ASSERT_EQ(p.dim(), 3);
    const std::set<int> kept(p.kept_inputs().begin(), p.kept_inputs().end());
    for (int id : kept) {
      // Centroid of the facet on this plane, nudged outward.
      const Face* facet = nullptr;
      for (const auto& f : p.faces())
        if (f.dim == 2 && !f.is_artificial &&
            std::count(f.support.begin(), f.support.end(), id))
          facet = &f;
      ASSERT_NE(facet, nullptr);
      const auto c = detail::minkowski_centroid(facet->vertex_witnesses);
      const Vec4 x = c.coords() + 1e-6 * hs[id].normal();
      const auto out = MinkowskiPoint::from_coords(MinkowskiPoint::renormalized(x));
      EXPECT_FALSE(hs[id].contains(out, 0.0));
      EXPECT_TRUE(satisfies_all_but(hs, id, out));
    }
    for (int s = 0; s < 2000; ++s) {
      const auto x = hvtest::random_point(rng, 0.9 * p.core_radius());
      bool in = true;
      for (int id : kept) in = in && hs[id].contains(x, 0.0);
      if (!in) continue;
      for (int i = 0; i < static_cast<int>(hs.size()); ++i)
        EXPECT_TRUE(hs[i].contains(x, 1e-9));
    }
  }
}

TEST(ReduceIrredundant, Idempotent) {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const MinkowskiPoint site;
    const auto p = reduce_irredundant(random_bisectors(rng, 15, site), 3.0, site);
    const auto q = reduce_irredundant(p.halfspaces(), 3.0, site);
    EXPECT_EQ(q.halfspaces().size(), p.halfspaces().size());
    EXPECT_EQ(q.count(0), p.count(0));
    EXPECT_EQ(q.count(1), p.count(1));
    EXPECT_EQ(q.count(2), p.count(2));
  }
}

TEST(FaceLattice, Simplex) {
  const auto v = hvtest::tetrahedron(0.8);
  const auto p = reduce_irredundant(simplex_halfspaces(v), 3.0);
  EXPECT_EQ(p.dim(), 3);
  EXPECT_EQ(p.count(2), 4u);
  EXPECT_EQ(p.count(1), 6u);
  EXPECT_EQ(p.count(0), 4u);
  EXPECT_TRUE(p.compact());
  for (const auto& w : p.vertices()) {
    double best = 1e9;
    for (const auto& t : v) best = std::min(best, dist(w, t));
    EXPECT_LT(best, 1e-8);
  }
}

TEST(FaceLattice, SingleHalfSpace) {
  const auto p = reduce_irredundant({HalfSpace::from_covector({0, 1, 0, 0})}, 2.0);
  int genuine_facets = 0, artificial = 0;
  for (const auto& f : p.faces()) {
    if (f.dim == 2 && !f.is_artificial) {
      ++genuine_facets;
      EXPECT_TRUE(f.clipped);
    }
    if (f.is_artificial) ++artificial;
  }
  EXPECT_EQ(genuine_facets, 1);
  EXPECT_GT(artificial, 0);
  EXPECT_FALSE(p.compact());
  // Genuine edges/vertices: none (the facet's boundary lies on the sphere).
  for (const auto& f : p.faces())
    if (f.dim < 2) {
      EXPECT_TRUE(f.is_artificial);
    }
}

// Facets of a Voronoi region found by sampling the bisector planes for
// points whose two nearest sites are the pair in question.
TEST(FaceLattice, VoronoiRegionMatchesSampling) {
  Rng rng(53);
  for (int trial = 0; trial < 6; ++trial) {
    auto sites = hvtest::random_points(rng, 5, 1.2);
    std::vector<HalfSpace> hs;
    for (int j = 1; j < 5; ++j) hs.push_back(bisector_halfspace(sites[0], sites[j]));
    const auto p = reduce_irredundant(hs, 3.0, sites[0]);
    std::set<int> computed;
    for (const auto& f : p.faces())
      if (f.dim == 2 && !f.is_artificial)
        for (int s : f.support) computed.insert(s);
    std::set<int> sampled;
    for (int j = 1; j < 5; ++j) {
      for (int s = 0; s < 20000 && !sampled.count(j - 1); ++s) {
        const auto y = hvtest::project_to_plane(
            hs[j - 1], apply(LorentzIsometry::boost_to(sites[0]),
                             hvtest::random_point(rng, 0.95 * p.core_radius())));
        if (dist(y, sites[0]) > 0.95 * p.core_radius()) continue;
        const double d0 = dist(y, sites[0]);
        bool nearest = true;
        for (int k = 1; k < 5; ++k)
          if (k != j && dist(y, sites[k]) < d0) nearest = false;
        if (nearest) sampled.insert(j - 1);
      }
    }
    EXPECT_EQ(computed, sampled) << "trial " << trial;
  }
}

TEST(FaceLattice, ContainmentAndIncidence) {
  Rng rng(61);
  for (int trial = 0; trial < 8; ++trial) {
    const auto pts = hvtest::random_points(rng, 12, 1.5);
    const auto p = convex_hull_finite(pts);
    ASSERT_EQ(p.dim(), 3);
    expect_euler(p);
    const auto& F = p.faces();
    for (const auto& f : F) {
      if (f.dim >= p.dim()) continue;
      bool inside = false;
      for (const auto& g : F)
        if (g.dim == f.dim + 1 &&
            std::includes(g.vertex_ids.begin(), g.vertex_ids.end(),
                          f.vertex_ids.begin(), f.vertex_ids.end()))
          inside = true;
      EXPECT_TRUE(inside);
      if (f.dim == 0) {
        EXPECT_GE(f.defining_halfspace_indices.size(), 3u);
      }
      if (f.dim == 1) {
        EXPECT_EQ(f.defining_halfspace_indices.size(), 2u);
      }
    }
  }
}

TEST(FaceLattice, InvariantUnderIsometry) {
  Rng rng(67);
  for (int trial = 0; trial < 5; ++trial) {
    const MinkowskiPoint site;
    const auto hs = random_bisectors(rng, 12, site);
    const auto g = hvtest::random_isometry(rng);
    std::vector<HalfSpace> moved;
    for (const auto& h : hs) moved.push_back(h.transformed(g));
    const auto p = reduce_irredundant(hs, 3.0, site);
    const auto q = reduce_irredundant(moved, 3.0, apply(g, site));
    EXPECT_EQ(p.kept_inputs(), q.kept_inputs());
    // The truncation polytope does not move rigidly with the frame, so
    // compare genuine vertices away from it.
    auto core_vertices = [](const ConvexPolyhedron& c) {
      std::set<std::vector<int>> out;
      for (const auto& f : c.faces())
        if (f.dim == 0 && !f.is_artificial &&
            dist(f.vertex_witnesses[0], c.center()) < 0.8 * c.core_radius())
          out.insert(f.support);
      return out;
    };
    EXPECT_EQ(core_vertices(p), core_vertices(q));
  }
}

TEST(ConvexHull, OnePoint) {
  const auto p = convex_hull_finite({hvtest::at(0.2, 0.1, -0.3)});
  EXPECT_EQ(p.dim(), 0);
  ASSERT_EQ(p.vertices().size(), 1u);
  EXPECT_LT(dist(p.vertices()[0], hvtest::at(0.2, 0.1, -0.3)), 1e-8);
}

TEST(ConvexHull, LowerRank) {
  const auto a = hvtest::at(0, 0, 0), b = hvtest::at(1, 0, 0), c = hvtest::at(0, 1, 0);
  EXPECT_EQ(convex_hull_finite({a, b}).dim(), 1);
  const auto tri = convex_hull_finite({a, b, c});
  EXPECT_EQ(tri.dim(), 2);
  EXPECT_EQ(tri.count(0), 3u);
  EXPECT_EQ(tri.count(1), 3u);
}

TEST(ConvexHull, Simplex) {
  const auto v = hvtest::tetrahedron(1.0);
  const auto p = convex_hull_finite(v);
  EXPECT_EQ(p.count(0), 4u);
  EXPECT_EQ(p.count(1), 6u);
  EXPECT_EQ(p.count(2), 4u);
  EXPECT_TRUE(p.compact());
}

TEST(ConvexHull, RandomContainsInputsAndIdempotent) {
  Rng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = hvtest::random_points(rng, 20, 2.0);
    const auto p = convex_hull_finite(pts);
    for (const auto& x : pts) EXPECT_TRUE(p.contains(x, 1e-8));
    const auto ids = hull_vertex_inputs(p, pts);
    std::vector<MinkowskiPoint> hv;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EXPECT_LT(dist(p.vertices()[i], pts[ids[i]]), 1e-7);
      hv.push_back(pts[ids[i]]);
    }
    const auto q = convex_hull_finite(hv);
    EXPECT_EQ(q.count(0), p.count(0));
    EXPECT_EQ(q.count(2), p.count(2));
  }
}

TEST(Intersect, SelfIntersection) {
  Rng rng(73);
  const auto p = convex_hull_finite(hvtest::random_points(rng, 10, 1.0));
  const auto q = intersect(p, p);
  for (int d = 0; d < 3; ++d) EXPECT_EQ(q.count(d), p.count(d));
}

TEST(Intersect, TransverseWedge) {
  const auto a = reduce_irredundant({HalfSpace::from_covector({0, 1, 0, 0})}, 2.0);
  const auto b = reduce_irredundant({HalfSpace::from_covector({0, 0, 1, 0})}, 2.0);
  const auto w = intersect(a, b);
  EXPECT_EQ(w.halfspaces().size(), 2u);
  EXPECT_EQ(w.count(1, true), 1u);
  EXPECT_EQ(w.count(2, true), 2u);
}

TEST(Intersect, FacesLieInFacesOfOperands) {
  Rng rng(79);
  for (int trial = 0; trial < 6; ++trial) {
    const auto p1 = convex_hull_finite(hvtest::random_points(rng, 10, 1.0));
    const auto p2 = convex_hull_finite(hvtest::random_points(rng, 10, 1.0));
    ConvexPolyhedron r;
    try {
      r = intersect(p1, p2);
    } catch (const EmptyPolyhedron&) {
      continue;
    }
    const std::size_t n1 = p1.halfspaces().size();
    for (const auto& f : r.faces()) {
      if (f.dim == r.dim()) continue;
      ASSERT_FALSE(f.defining_halfspace_indices.empty());
      for (const auto& w : f.vertex_witnesses) {
        // Some active plane belongs to an operand and passes through w.
        bool on_operand_face = false;
        for (int k : f.defining_halfspace_indices) {
          const int in = r.kept_inputs()[k];
          const auto& h = in < static_cast<int>(n1) ? p1.halfspaces()[in]
                                                    : p2.halfspaces()[in - n1];
          if (std::abs(h.value(w)) < 1e-7) on_operand_face = true;
        }
        EXPECT_TRUE(on_operand_face);
      }
    }
  }
}

TEST(EncloseCompact, SinglePointMarginBall) {
  const auto x = hvtest::at(0.3, -0.2, 0.5);
  const double m = 0.25;
  const auto p = enclose_compact({x}, m);
  EXPECT_TRUE(p.compact());
  EXPECT_EQ(p.dim(), 3);
  for (const auto& h : p.halfspaces()) EXPECT_LE(h.signed_distance(x), -m + 1e-9);
}

TEST(EncloseCompact, StaysNearTheInputs) {
  Rng rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    const double r = 1.0, m = 0.05;
    const auto pts = hvtest::random_points(rng, 8, r);
    const auto p = enclose_compact(pts, m);
    for (const auto& x : pts)
      for (const auto& h : p.halfspaces()) EXPECT_LE(h.signed_distance(x), -m + 1e-9);
    for (const auto& v : p.vertices()) EXPECT_LE(dist(v, MinkowskiPoint{}), r + 10 * m);
  }
}

TEST(TruncateToCompact, CompactUnchanged) {
  const auto p = convex_hull_finite(hvtest::tetrahedron(1.0));
  const auto q = truncate_to_compact(p, {MinkowskiPoint{}});
  EXPECT_EQ(q.count(0), p.count(0));
  EXPECT_EQ(q.halfspaces().size(), p.halfspaces().size());
}

TEST(TruncateToCompact, HalfSpaceAndPoint) {
  const auto f = reduce_irredundant({HalfSpace::from_covector({0, 1, 0, 0})}, 2.0);
  const auto x = hvtest::at(-0.4, 0.1, 0.0);
  const auto q = truncate_to_compact(f, {x});
  EXPECT_TRUE(q.compact());
  EXPECT_EQ(q.dim(), 3);
  EXPECT_TRUE(q.contains(x));
  EXPECT_THROW(truncate_to_compact(f, {hvtest::at(0.4, 0, 0)}), PreconditionError);
}

TEST(TruncateToCompact, FaceDisposition) {
  Rng rng(89);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sites = hvtest::random_points(rng, 6, 1.0);
    std::vector<HalfSpace> hs;
    for (int j = 1; j < 6; ++j) hs.push_back(bisector_halfspace(sites[0], sites[j]));
    const auto f = reduce_irredundant(hs, 3.0, sites[0]);
    std::vector<MinkowskiPoint> keep;
    while (keep.size() < 6) {
      const auto x = apply(LorentzIsometry::boost_to(sites[0]), hvtest::random_point(rng, 1.0));
      if (f.contains(x, 0.0)) keep.push_back(x);
    }
    keep.push_back(sites[0]);
    const auto q = truncate_to_compact(f, keep);
    EXPECT_TRUE(q.compact());
    EXPECT_EQ(q.dim(), 3);
    for (const auto& x : keep) EXPECT_TRUE(q.contains(x));
    const std::size_t nf = 0;  // enclosure planes come first in the union
    (void)nf;
    for (const auto& face : q.faces()) {
      if (face.dim == q.dim()) continue;
      bool in_f_face = false;
      for (int k : face.defining_halfspace_indices)
        for (const auto& h : f.halfspaces()) {
          const auto& g = q.halfspaces()[k];
          double diff = 0;
          for (int c = 0; c < 4; ++c) diff = std::max(diff, std::abs(g.normal()[c] - h.normal()[c]));
          if (diff < 1e-9) in_f_face = true;
        }
      if (in_f_face) continue;
      // Otherwise the face misses every kept point.
      for (const auto& x : keep)
        for (int k : face.defining_halfspace_indices)
          EXPECT_LT(q.halfspaces()[k].value(x), -1e-9);
    }
  }
}
