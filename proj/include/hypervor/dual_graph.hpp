#pragma once

// The graph dual to a dot system: one vertex per net point, one edge per dot,
// each edge crossing the dotted facet between two cells.

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hypervor/errors.hpp"
#include "hypervor/thick_net.hpp"
#include "hypervor/union_find.hpp"
#include "hypervor/voronoi.hpp"
#include "hypervor/words.hpp"

namespace hypervor {

// Oriented edges come in pairs 2e, 2e + 1; reverse(id) = id ^ 1.
struct OrientedEdge {
  int edge = 0;
  int init = 0, term = 0;
  int cell = 0;  // orbit index of the cell of the initial net point
  int face = 0;  // facet of that cell crossed by the edge
  MinkowskiPoint dot;  // where the edge crosses, in this lift
  // The far cell is the cell of word * P_term.
  Word word;
  LorentzIsometry matrix;
  int neighbor = 0;  // orbit index of word * P_term
};

struct DualGraph {
  int vertices = 0;
  std::vector<OrientedEdge> oriented;
  std::vector<int> edge_dot;  // dot index per edge
  std::map<std::pair<int, int>, int> oriented_at;  // (cell, facet) -> id

  int edge_count() const { return static_cast<int>(oriented.size() / 2); }
  static int reverse(int id) { return id ^ 1; }
  bool is_loop(int e) const { return oriented[2 * e].init == oriented[2 * e].term; }
  int loop_count() const {
    int n = 0;
    for (int e = 0; e < edge_count(); ++e) n += is_loop(e);
    return n;
  }
  std::vector<std::pair<int, int>> edge_list() const {
    std::vector<std::pair<int, int>> out;
    for (int e = 0; e < edge_count(); ++e)
      out.emplace_back(oriented[2 * e].init, oriented[2 * e].term);
    return out;
  }
};

inline DualGraph build_dual_graph(const VoronoiComplex& vc, const DotSystem& ds) {
  const SiteSystem& s = vc.sites;
  DualGraph g;
  g.vertices = static_cast<int>(s.basepoints.size());
  for (int d = 0; d < static_cast<int>(ds.dots.size()); ++d) {
    const FacetOrbit& o = ds.orbits[ds.dots[d].orbit];
    if (o.a.cell == o.b.cell && o.a.face == o.b.face)
      throw ComplexInconsistency("dotted facet is not shared by two cells");
    if (!s.orbit[o.a.neighbor].element.compose(s.orbit[o.b.neighbor].element)
             .is_identity(1e-8))
      throw ComplexInconsistency("facet pairing words are not inverse");
    const int e = g.edge_count();
    const LorentzIsometry& m = s.orbit[o.a.neighbor].element;
    OrientedEdge fwd{e, o.a.base, o.b.base, o.a.cell, o.a.face, ds.dots[d].point,
                     o.a.word, m, o.a.neighbor};
    OrientedEdge bwd{e, o.b.base, o.a.base, o.b.cell, o.b.face,
                     apply(m.inverse(), ds.dots[d].point), o.b.word,
                     s.orbit[o.b.neighbor].element, o.b.neighbor};
    g.oriented_at[{fwd.cell, fwd.face}] = 2 * e;
    g.oriented_at[{bwd.cell, bwd.face}] = 2 * e + 1;
    g.oriented.push_back(std::move(fwd));
    g.oriented.push_back(std::move(bwd));
    g.edge_dot.push_back(d);
  }
  return g;
}

// True iff the facets crossed by the two edges meet in a 1-dimensional face
// of the initial cell.
inline bool initially_adjacent(const DualGraph& g, const VoronoiComplex& vc, int a, int b) {
  const OrientedEdge& x = g.oriented.at(a);
  const OrientedEdge& y = g.oriented.at(b);
  if (x.init != y.init)
    throw PreconditionError("initial adjacency needs a common initial vertex");
  if (x.face == y.face) return false;
  const ConvexPolyhedron& p = vc.cells[x.cell].poly;
  const auto& F = p.faces()[x.face].vertex_ids;
  const auto& G = p.faces()[y.face].vertex_ids;
  for (int f : p.face_ids(1)) {
    const Face& e = p.faces()[f];
    if (e.is_artificial) continue;
    auto v = e.vertex_ids;
    std::sort(v.begin(), v.end());
    if (std::includes(F.begin(), F.end(), v.begin(), v.end()) &&
        std::includes(G.begin(), G.end(), v.begin(), v.end()))
      return true;
  }
  return false;
}

inline bool terminally_adjacent(const DualGraph& g, const VoronoiComplex& vc, int a, int b) {
  return initially_adjacent(g, vc, DualGraph::reverse(a), DualGraph::reverse(b));
}

struct Reroute {
  int first = 0, second = 0;  // oriented edges
  int cell = 0, one_face = 0;  // the 1-face the detour turns around
  bool words_equal = false;
  double matrix_error = 0.0;
};

// Replaces an oriented edge by two edges turning around a thick 1-face of the
// crossed facet: the first initially adjacent to it, the second terminally
// adjacent, with the same lift endpoints.
inline Reroute reroute_edge(const DualGraph& g, const VoronoiComplex& vc,
                            const GroupBall& ball, double epsilon, int eta,
                            const ThickRegion& region = {}) {
  const SiteSystem& s = vc.sites;
  const OrientedEdge& h = g.oriented.at(eta);
  const Cell& c = vc.cells[h.cell];
  const auto& facet = c.poly.faces()[h.face].vertex_ids;

  int best = -1;
  double best_v = -1.0;
  for (int f : c.poly.face_ids(1)) {
    const Face& L = c.poly.faces()[f];
    if (L.is_artificial || !in_core(c, L)) continue;
    auto v = L.vertex_ids;
    std::sort(v.begin(), v.end());
    if (!std::includes(facet.begin(), facet.end(), v.begin(), v.end())) continue;
    double m = -1.0;
    for (const auto& x : sample_face(c, L))
      if (region.contains(x)) m = std::max(m, shortone(x, ball).value);
    if (m >= epsilon && m > best_v) {
      best = f;
      best_v = m;
    }
  }
  if (best < 0)
    throw ResolutionError("no 1-face of the crossed facet meets the thick part");

  const auto key = vc.face_sites(h.cell, best);
  if (key.size() != 3 || valence(vc, h.cell, best) != 3)
    throw WeakSimplicityViolation("1-face of valence other than 3 at reroute");
  int third = -1;
  for (int k : key)
    if (k != h.cell && k != h.neighbor) third = k;
  if (third < 0) throw ComplexInconsistency("reroute 1-face misses the crossed facet");

  auto oriented_on = [&](int cell, int neighbor) {
    const int f = detail::facet_towards(vc, cell, neighbor);
    if (f < 0) throw ComplexInconsistency("missing facet in reroute");
    const auto it = g.oriented_at.find({cell, f});
    if (it == g.oriented_at.end())
      throw ResolutionError("reroute needs an undotted facet; increase sampling");
    return it->second;
  };
  Reroute r;
  r.cell = h.cell;
  r.one_face = best;
  r.first = oriented_on(h.cell, third);
  const int cj = s.base_site(h.term);
  const int m = s.find(apply(h.matrix.inverse(), s.orbit[third].site));
  if (m < 0)
    throw ComplexInconsistency("reroute site outside the enumerated orbit; "
                               "increase word_length_cap");
  r.second = DualGraph::reverse(oriented_on(cj, m));

  const OrientedEdge& e0 = g.oriented[r.first];
  const OrientedEdge& e1 = g.oriented[r.second];
  if (!initially_adjacent(g, vc, eta, r.first) || !terminally_adjacent(g, vc, eta, r.second) ||
      e0.init != h.init || e1.term != h.term || e0.term != e1.init)
    throw ComplexInconsistency("reroute adjacency conditions fail");
  r.words_equal = concat(e0.word, e1.word) == h.word;
  r.matrix_error = max_abs_diff(e0.matrix.compose(e1.matrix).matrix(), h.matrix.matrix());
  if (!(r.matrix_error <= 1e-8 * std::max(1.0, max_abs(h.matrix.matrix()))))
    throw ComplexInconsistency("reroute changes the lift endpoint");
  return r;
}

// Per edge: distance from the initial site to the dot plus from the dot to
// the terminal site's lift.
inline std::vector<double> edge_lengths(const DualGraph& g, const VoronoiComplex& vc) {
  std::vector<double> out;
  for (int e = 0; e < g.edge_count(); ++e) {
    const OrientedEdge& x = g.oriented[2 * e];
    out.push_back(dist(vc.sites.orbit[x.cell].site, x.dot) +
                  dist(x.dot, vc.sites.orbit[x.neighbor].site));
  }
  return out;
}

struct GraphStats {
  int edges = 0, loops = 0, vertices = 0, betti = 0, components = 0;
};

inline GraphStats graph_stats(int vertices, const std::vector<std::pair<int, int>>& edges) {
  GraphStats st;
  st.vertices = vertices;
  st.edges = static_cast<int>(edges.size());
  UnionFind uf(vertices);
  for (const auto& [u, v] : edges) {
    if (u == v) ++st.loops;
    uf.unite(u, v);
  }
  st.components = uf.components();
  st.betti = st.edges - st.vertices + st.components;
  return st;
}

inline GraphStats graph_stats(const DualGraph& g) {
  return graph_stats(g.vertices, g.edge_list());
}

}  // namespace hypervor
