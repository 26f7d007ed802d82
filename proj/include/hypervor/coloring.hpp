#pragma once

// Four-colorings of cell facets, the induced coloring of oriented edges,
// vertex color assignments and the pruned graphs they produce.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hypervor/dual_graph.hpp"
#include "hypervor/errors.hpp"
#include "hypervor/union_find.hpp"

namespace hypervor {

inline constexpr int kColors = 4;

// Proper coloring with colors 1..4 by saturation-ordered backtracking.
inline std::vector<int> four_color(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> color(n, 0);
  std::vector<int> order;

  auto pick = [&]() {
    int best = -1, best_sat = -1, best_deg = -1;
    for (int v = 0; v < n; ++v) {
      if (color[v]) continue;
      unsigned used = 0;
      int deg = 0;
      for (int w : adj[v]) {
        if (color[w]) used |= 1u << color[w];
        else ++deg;
      }
      const int sat = __builtin_popcount(used);
      if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
        best = v;
        best_sat = sat;
        best_deg = deg;
      }
    }
    return best;
  };

  long steps = 0;
  auto solve = [&](auto&& self, int placed) -> bool {
    if (placed == n) return true;
    if (++steps > 50000000) throw InvariantViolation("four-coloring search did not finish");
    const int v = pick();
    for (int c = 1; c <= kColors; ++c) {
      bool ok = true;
      for (int w : adj[v])
        if (color[w] == c) ok = false;
      if (!ok) continue;
      color[v] = c;
      if (self(self, placed + 1)) return true;
      color[v] = 0;
    }
    return false;
  };
  if (!solve(solve, 0))
    throw InvariantViolation("facet graph is not four-colorable; the face lattice is wrong");
  return color;
}

// Genuine facets of a cell and their adjacency through genuine 1-faces.
struct FacetGraph {
  std::vector<int> facets;  // face ids
  std::vector<std::vector<int>> adj;
};

inline FacetGraph facet_graph(const ConvexPolyhedron& p) {
  FacetGraph g;
  std::map<int, int> index;
  for (int f : p.face_ids(2))
    if (!p.faces()[f].is_artificial) {
      index[f] = static_cast<int>(g.facets.size());
      g.facets.push_back(f);
    }
  g.adj.resize(g.facets.size());
  std::set<std::pair<int, int>> seen;
  for (int e : p.face_ids(1)) {
    const Face& E = p.faces()[e];
    if (E.is_artificial) continue;
    auto v = E.vertex_ids;
    std::sort(v.begin(), v.end());
    std::vector<int> on;
    for (std::size_t i = 0; i < g.facets.size(); ++i) {
      const auto& F = p.faces()[g.facets[i]].vertex_ids;
      if (std::includes(F.begin(), F.end(), v.begin(), v.end()))
        on.push_back(static_cast<int>(i));
    }
    for (std::size_t a = 0; a < on.size(); ++a)
      for (std::size_t b = a + 1; b < on.size(); ++b)
        if (seen.insert({on[a], on[b]}).second) {
          g.adj[on[a]].push_back(on[b]);
          g.adj[on[b]].push_back(on[a]);
        }
  }
  return g;
}

// Face id -> color in 1..4; facets sharing a 1-face differ.
inline std::map<int, int> four_color_cell(const ConvexPolyhedron& p) {
  const FacetGraph g = facet_graph(p);
  const auto c = four_color(g.adj);
  std::map<int, int> out;
  for (std::size_t i = 0; i < g.facets.size(); ++i) out[g.facets[i]] = c[i];
  return out;
}

struct ColoringSystem {
  std::map<int, std::map<int, int>> cell_colors;  // cell -> face -> color
  std::vector<int> edge_color;                    // per oriented edge
};

inline ColoringSystem build_coloring_system(const VoronoiComplex& vc, const DualGraph& g) {
  ColoringSystem cs;
  for (int i = 0; i < g.vertices; ++i) {
    const int c = vc.sites.base_site(i);
    cs.cell_colors[c] = four_color_cell(vc.cells[c].poly);
  }
  for (const auto& e : g.oriented) cs.edge_color.push_back(cs.cell_colors.at(e.cell).at(e.face));
  return cs;
}

struct ColoringViolation {
  int first = 0, second = 0;
  bool terminal = false;
};

// Initially (and terminally) adjacent oriented edges with equal colors.
inline std::vector<ColoringViolation> coloring_violations(const VoronoiComplex& vc,
                                                          const DualGraph& g,
                                                          const ColoringSystem& cs) {
  std::vector<ColoringViolation> out;
  const int n = static_cast<int>(g.oriented.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (g.oriented[a].init == g.oriented[b].init &&
          cs.edge_color[a] == cs.edge_color[b] && initially_adjacent(g, vc, a, b))
        out.push_back({a, b, false});
      if (g.oriented[a].term == g.oriented[b].term &&
          cs.edge_color[DualGraph::reverse(a)] == cs.edge_color[DualGraph::reverse(b)] &&
          terminally_adjacent(g, vc, a, b))
        out.push_back({a, b, true});
    }
  return out;
}

// A graph whose edges carry the colors of their two orientations.
struct ColoredEdge {
  int u = 0, v = 0;
  int cu = 0, cv = 0;  // color of the orientation starting at u, at v
  bool loop() const { return u == v; }
};

struct ColoredGraph {
  int vertices = 0;
  std::vector<ColoredEdge> edges;
};

inline ColoredGraph colored_graph(const DualGraph& g, const ColoringSystem& cs) {
  ColoredGraph out;
  out.vertices = g.vertices;
  for (int e = 0; e < g.edge_count(); ++e)
    out.edges.push_back({g.oriented[2 * e].init, g.oriented[2 * e + 1].init,
                         cs.edge_color[2 * e], cs.edge_color[2 * e + 1]});
  return out;
}

inline bool doubly_distinguished(const ColoredEdge& e, const std::vector<int>& a) {
  return a[e.u] == e.cu && a[e.v] == e.cv;
}

// Edges (loops included) both of whose orientations are distinguished.
inline std::vector<int> doubly_distinguished(const ColoredGraph& g, const std::vector<int>& a) {
  if (static_cast<int>(a.size()) != g.vertices)
    throw PreconditionError("assignment must cover every vertex");
  std::vector<int> out;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    if (doubly_distinguished(g.edges[e], a)) out.push_back(e);
  return out;
}

// Doubly distinguished non-loop edges.
inline int dd_count(const ColoredGraph& g, const std::vector<int>& a) {
  int n = 0;
  for (const auto& e : g.edges) n += !e.loop() && doubly_distinguished(e, a);
  return n;
}

inline int nonloop_count(const ColoredGraph& g) {
  int n = 0;
  for (const auto& e : g.edges) n += !e.loop();
  return n;
}

enum class AssignmentMode { Exhaustive, Derandomized };

struct Assignment {
  std::vector<int> colors;  // per vertex, 1..4
  int dd = 0;               // doubly distinguished non-loop edges
  // Exhaustive mode: sum of dd over all 4^s assignments.
  std::uint64_t total_over_all = 0;
};

inline constexpr int kMaxExhaustiveVertices = 12;

inline Assignment exhaustive_assignment(const ColoredGraph& g) {
  if (g.vertices > kMaxExhaustiveVertices)
    throw SizeError("exhaustive assignment is limited to 12 vertices");
  Assignment best;
  best.dd = -1;
  std::uint64_t total = 0;
  std::vector<int> a(g.vertices, 1);
  const std::uint64_t count = std::uint64_t{1} << (2 * g.vertices);
  for (std::uint64_t code = 0; code < count; ++code) {
    for (int v = 0; v < g.vertices; ++v) a[v] = 1 + static_cast<int>((code >> (2 * v)) & 3u);
    const int d = dd_count(g, a);
    total += static_cast<std::uint64_t>(d);
    if (d > best.dd) {
      best.dd = d;
      best.colors = a;
    }
  }
  best.total_over_all = total;
  return best;
}

// Method of conditional expectations, vertices in id order. Expectations
// are kept as integers scaled by 16.
inline Assignment derandomized_assignment(const ColoredGraph& g) {
  std::vector<int> a(g.vertices, 0);
  auto expectation16 = [&]() {
    long sum = 0;
    for (const auto& e : g.edges) {
      if (e.loop()) continue;
      const int fu = a[e.u], fv = a[e.v];
      if (fu && fv) sum += (fu == e.cu && fv == e.cv) ? 16 : 0;
      else if (fu) sum += fu == e.cu ? 4 : 0;
      else if (fv) sum += fv == e.cv ? 4 : 0;
      else sum += 1;
    }
    return sum;
  };
  for (int v = 0; v < g.vertices; ++v) {
    long best = -1;
    int best_c = 1;
    for (int c = 1; c <= kColors; ++c) {
      a[v] = c;
      const long x = expectation16();
      if (x > best) {
        best = x;
        best_c = c;
      }
    }
    a[v] = best_c;
  }
  Assignment out;
  out.colors = a;
  out.dd = dd_count(g, a);
  return out;
}

inline Assignment find_color_assignment(const ColoredGraph& g, AssignmentMode mode) {
  return mode == AssignmentMode::Exhaustive ? exhaustive_assignment(g)
                                            : derandomized_assignment(g);
}

struct PrunedGraphs {
  std::vector<int> ndd;     // edges not doubly distinguished
  std::vector<int> dagger;  // of those, the non-loops
  GraphStats ndd_stats, dagger_stats;
  bool dagger_connected = false;
};

inline PrunedGraphs build_pruned_graphs(const ColoredGraph& g, const std::vector<int>& dd) {
  PrunedGraphs p;
  const std::set<int> bad(dd.begin(), dd.end());
  std::vector<std::pair<int, int>> ndd_edges, dagger_edges;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    if (bad.count(e)) continue;
    p.ndd.push_back(e);
    ndd_edges.emplace_back(g.edges[e].u, g.edges[e].v);
    if (g.edges[e].loop()) continue;
    p.dagger.push_back(e);
    dagger_edges.emplace_back(g.edges[e].u, g.edges[e].v);
  }
  p.ndd_stats = graph_stats(g.vertices, ndd_edges);
  p.dagger_stats = graph_stats(g.vertices, dagger_edges);
  p.dagger_connected = p.dagger_stats.components <= 1;
  return p;
}

// A walk in the dual graph given by oriented edge ids.
struct EdgePath {
  std::vector<int> edges;
};

inline void check_path(const DualGraph& g, const EdgePath& p) {
  for (std::size_t i = 0; i + 1 < p.edges.size(); ++i)
    if (g.oriented.at(p.edges[i]).term != g.oriented.at(p.edges[i + 1]).init)
      throw PreconditionError("path edges do not chain");
}

// Deck transformation carrying the lift of the start to the lift of the end.
inline LorentzIsometry path_lift(const DualGraph& g, const EdgePath& p) {
  LorentzIsometry m;
  for (int id : p.edges) m = m.compose(g.oriented.at(id).matrix);
  return m;
}

inline Word path_word(const DualGraph& g, const EdgePath& p) {
  Word w;
  for (int id : p.edges) w = concat(w, g.oriented.at(id).word);
  return w;
}

// Replaces each traversal of a doubly distinguished edge by its reroute. The
// replacements are never doubly distinguished: each is adjacent to an edge
// whose color equals its vertex's color.
inline EdgePath reroute_to_ndd(const DualGraph& g, const VoronoiComplex& vc,
                               const GroupBall& ball, double epsilon,
                               const ColoredGraph& cg, const std::vector<int>& colors,
                               const EdgePath& path, const ThickRegion& region = {}) {
  check_path(g, path);
  EdgePath out;
  for (int id : path.edges) {
    const int e = id / 2;
    if (!doubly_distinguished(cg.edges[e], colors)) {
      out.edges.push_back(id);
      continue;
    }
    const Reroute r = reroute_edge(g, vc, ball, epsilon, id, region);
    for (int x : {r.first, r.second}) {
      if (doubly_distinguished(cg.edges[x / 2], colors))
        throw InvariantViolation("reroute produced a doubly distinguished edge");
      out.edges.push_back(x);
    }
  }
  const double err =
      max_abs_diff(path_lift(g, out).matrix(), path_lift(g, path).matrix());
  if (!(err <= 1e-8 * std::max(1.0, max_abs(path_lift(g, path).matrix()))))
    throw InvariantViolation("rerouted path changes the lift endpoint");
  return out;
}

}  // namespace hypervor
