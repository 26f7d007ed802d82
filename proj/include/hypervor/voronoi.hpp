#pragma once

// Voronoi complexes of truncated group orbits.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hypervor/errors.hpp"
#include "hypervor/kernel.hpp"
#include "hypervor/polytope.hpp"
#include "hypervor/rng.hpp"
#include "hypervor/words.hpp"

namespace hypervor {

struct OrbitPoint {
  MinkowskiPoint site;
  Word word;
  int base_index = 0;
  LorentzIsometry element;
};

struct SiteSystem {
  std::vector<LorentzIsometry> generators;
  std::vector<MinkowskiPoint> basepoints;
  int word_length_cap = 0;
  std::vector<OrbitPoint> orbit;
  std::vector<std::string> warnings;

  bool trivial_group() const {
    for (const auto& g : generators)
      if (!is_trivial_generator(g)) return false;
    return true;
  }

  // Orbit index of the point at `x`, or -1.
  int find(const MinkowskiPoint& x, double tolerance = 1e-6) const {
    for (int i = 0; i < static_cast<int>(orbit.size()); ++i)
      if (dist(orbit[i].site, x) <= tolerance) return i;
    return -1;
  }

  // Orbit index of basepoint i itself.
  int base_site(int i) const {
    for (int k = 0; k < static_cast<int>(orbit.size()); ++k)
      if (orbit[k].base_index == i && orbit[k].word.empty()) return k;
    return -1;
  }
};

inline SiteSystem enumerate_orbit(const std::vector<LorentzIsometry>& gens,
                                  const std::vector<MinkowskiPoint>& basepoints,
                                  int cap) {
  if (cap < 0) throw InputError("word length cap must be nonnegative");
  SiteSystem s;
  s.generators = gens;
  s.basepoints = basepoints;
  s.word_length_cap = cap;
  const auto words = enumerate_words(gens, cap);
  for (int b = 0; b < static_cast<int>(basepoints.size()); ++b)
    for (const auto& e : words) {
      const MinkowskiPoint x = apply(e.matrix, basepoints[b]);
      bool duplicate = false;
      for (const auto& o : s.orbit) {
        if (dist(o.site, x) > tol::kGeom) continue;
        duplicate = true;
        if (e.word.size() <= 2 || o.word.size() <= 2) {
          std::ostringstream os;
          os << "orbit collision: " << word_string(e.word) << "*P" << b
             << " coincides with " << word_string(o.word) << "*P" << o.base_index
             << " (torsion or non-discreteness suspected)";
          s.warnings.push_back(os.str());
        }
        break;
      }
      if (!duplicate) s.orbit.push_back({x, e.word, b, e.matrix});
    }
  return s;
}

struct Cell {
  int site = 0;                // orbit index
  std::vector<int> neighbors;  // orbit index of each input half-space
  ConvexPolyhedron poly;
  bool interior = false;
};

struct OneFace {
  std::vector<int> sites;  // sorted orbit indices equidistant on the face
  std::vector<std::pair<int, int>> incidences;  // (cell, face id)
  int valence = 0;
};

struct VoronoiComplex {
  SiteSystem sites;
  double truncation_radius = 0.0;
  std::vector<Cell> cells;  // cells[i].site == i
  // Faces keyed by the sorted orbit indices of their equidistant sites.
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> shared_faces;
  // Genuine 1-faces of interior cells that reach the core ball.
  std::vector<OneFace> one_faces;

  std::vector<int> face_sites(int cell, int face) const {
    const Cell& c = cells[cell];
    std::vector<int> key{c.site};
    for (int s : c.poly.faces()[face].support) key.push_back(c.neighbors[s]);
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    return key;
  }
};

namespace detail {

// Hyperbolic distance from the frame centre to the closest point of the
// face (Klein distance is monotone in hyperbolic distance).
inline double face_depth(const ConvexPolyhedron& p, const Face& f) {
  const auto& K = p.klein_vertices();
  double best = std::numeric_limits<double>::infinity();
  auto point_norm = [](const Vec3& k) { return norm3(k); };
  for (int v : f.vertex_ids) best = std::min(best, point_norm(K[v]));
  if (f.dim == 1) {
    const Vec3 a = K[f.vertex_ids[0]], b = K[f.vertex_ids[1]];
    const Vec3 d = b - a;
    const double dd = dot3(d, d);
    if (dd > 0) {
      const double t = std::clamp(-dot3(a, d) / dd, 0.0, 1.0);
      best = std::min(best, norm3(a + t * d));
    }
  } else if (f.dim >= 2) {
    // Closest point of a polygon/polytope: the projection of the origin
    // onto the face's plane when inside, else the boundary (covered by the
    // edges, which are faces of their own).
    Vec3 c{0, 0, 0};
    for (int v : f.vertex_ids) c = c + K[v];
    c = (1.0 / static_cast<double>(f.vertex_ids.size())) * c;
    best = std::min(best, norm3(c));
  }
  return std::atanh(std::min(best, 1.0 - 1e-16));
}

}  // namespace detail

// Whether a face of a cell reaches into the ball where every cell's
// truncation is exact.
inline bool in_core(const Cell& c, const Face& f) {
  return detail::face_depth(c.poly, f) < c.poly.core_radius() * (1.0 - 1e-9);
}

inline bool cell_is_interior(const SiteSystem& s, int orbit_index) {
  if (s.trivial_group()) return true;
  return static_cast<int>(s.orbit[orbit_index].word.size()) <= s.word_length_cap - 1;
}

inline Cell build_cell(const SiteSystem& s, int i, double R) {
  Cell c;
  c.site = i;
  const MinkowskiPoint& p = s.orbit[i].site;
  std::vector<std::pair<double, int>> near;
  for (int j = 0; j < static_cast<int>(s.orbit.size()); ++j) {
    if (j == i) continue;
    const double d = dist(p, s.orbit[j].site);
    if (d <= 2.0 * R + tol::kGeom) near.emplace_back(d, j);
  }
  std::sort(near.begin(), near.end());
  std::vector<HalfSpace> hs;
  for (const auto& [d, j] : near) {
    c.neighbors.push_back(j);
    hs.push_back(bisector_halfspace(p, s.orbit[j].site));
  }
  c.poly = reduce_irredundant(hs, R, p);
  c.interior = cell_is_interior(s, i);
  return c;
}

inline VoronoiComplex build_complex(const SiteSystem& sites, double truncation_radius) {
  if (sites.orbit.size() < 2)
    throw PreconditionError("a Voronoi complex needs at least two sites");
  VoronoiComplex vc;
  vc.sites = sites;
  vc.truncation_radius = truncation_radius;
  for (int i = 0; i < static_cast<int>(sites.orbit.size()); ++i) {
    try {
      vc.cells.push_back(build_cell(sites, i, truncation_radius));
    } catch (const DegenerateInput& e) {
      throw DegenerateInput(std::string(e.what()) +
                            " (cell " + std::to_string(i) + "); try perturb_sites");
    }
  }
  std::map<std::vector<int>, std::set<int>> edge_cells;
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> edge_inc;
  std::set<std::vector<int>> listed;
  for (int ci = 0; ci < static_cast<int>(vc.cells.size()); ++ci) {
    const Cell& c = vc.cells[ci];
    const auto& F = c.poly.faces();
    for (int f = 0; f < static_cast<int>(F.size()); ++f) {
      if (F[f].is_artificial || F[f].dim == c.poly.dim()) continue;
      const auto key = vc.face_sites(ci, f);
      vc.shared_faces[key].emplace_back(ci, f);
      if (F[f].dim == 1) {
        edge_cells[key].insert(ci);
        edge_inc[key].emplace_back(ci, f);
        if (c.interior && in_core(c, F[f])) listed.insert(key);
      }
    }
  }
  for (const auto& key : listed) {
    OneFace of;
    of.sites = key;
    of.incidences = edge_inc[key];
    of.valence = static_cast<int>(edge_cells[key].size());
    vc.one_faces.push_back(std::move(of));
  }
  return vc;
}

// Valence of a listed 1-face.
inline int valence(const VoronoiComplex& vc, int one_face) {
  return vc.one_faces.at(one_face).valence;
}

// Valence of a 1-face given as a face of a cell.
inline int valence(const VoronoiComplex& vc, int cell, int face) {
  const Face& f = vc.cells.at(cell).poly.faces().at(face);
  if (f.dim != 1) throw PreconditionError("valence is defined for 1-faces");
  if (f.is_artificial)
    throw PreconditionError("valence of an artificial face is undefined");
  const auto key = vc.face_sites(cell, face);
  std::set<int> cs;
  for (const auto& [c, g] : vc.shared_faces.at(key))
    if (vc.cells[c].poly.faces()[g].dim == 1) cs.insert(c);
  return static_cast<int>(cs.size());
}

struct WeakSimplicityReport {
  bool weakly_simple = true;
  std::vector<int> violators;       // one_faces with valence != 3
  std::vector<int> low_valence;     // valence < 3 (never expected)
  std::vector<int> key_mismatch;    // cell count differs from site count
  std::vector<int> pair_failures;   // valence-3 faces failing the 2-face check
  int checked = 0;
};

// Every listed 1-face has valence exactly 3; for those that do, the incident
// cells meet exactly along it and pairwise in a common 2-face.
inline WeakSimplicityReport is_weakly_simple(const VoronoiComplex& vc) {
  WeakSimplicityReport r;
  for (int i = 0; i < static_cast<int>(vc.one_faces.size()); ++i) {
    const OneFace& of = vc.one_faces[i];
    ++r.checked;
    if (of.valence < 3) r.low_valence.push_back(i);
    if (of.valence != static_cast<int>(of.sites.size())) r.key_mismatch.push_back(i);
    if (of.valence != 3 || of.sites.size() != 3) {
      r.violators.push_back(i);
      continue;
    }
    const auto& [c0, f0] = of.incidences.front();
    const Face& edge = vc.cells[c0].poly.faces()[f0];
    bool ok = true;
    std::set<int> incident;
    for (const auto& [c, f] : of.incidences) incident.insert(c);
    for (int c : incident)
      for (const auto& w : edge.vertex_witnesses)
        if (!vc.cells[c].poly.contains(w, 1e-7)) ok = false;
    for (int a : incident)
      for (int b : incident) {
        if (a == b) continue;
        std::vector<int> key{vc.cells[a].site, vc.cells[b].site};
        std::sort(key.begin(), key.end());
        bool found = false;
        const Cell& ca = vc.cells[a];
        for (int f = 0; f < static_cast<int>(ca.poly.faces().size()); ++f) {
          const Face& g = ca.poly.faces()[f];
          if (g.dim != 2 || g.is_artificial) continue;
          if (vc.face_sites(a, f) != key) continue;
          for (const auto& [cc, ff] : of.incidences) {
            if (cc != a) continue;
            auto ev = ca.poly.faces()[ff].vertex_ids;
            std::sort(ev.begin(), ev.end());
            if (std::includes(g.vertex_ids.begin(), g.vertex_ids.end(),
                              ev.begin(), ev.end()))
              found = true;
          }
        }
        if (!found) ok = false;
      }
    if (!ok) r.pair_failures.push_back(i);
  }
  r.weakly_simple = r.violators.empty() && r.low_valence.empty() &&
                    r.pair_failures.empty();
  return r;
}

// Each basepoint moved by an independent random displacement of length at
// most `magnitude`; the orbit is re-enumerated.
inline SiteSystem perturb_sites(const SiteSystem& s, double magnitude,
                                std::uint64_t seed) {
  if (!(magnitude > 0.0)) throw DomainError("perturbation magnitude must be positive");
  std::vector<MinkowskiPoint> moved;
  for (std::size_t i = 0; i < s.basepoints.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    const Vec3 d = rng.direction();
    const double t = magnitude * rng.uniform();
    moved.push_back(exp_map(s.basepoints[i], d, t));
  }
  return enumerate_orbit(s.generators, moved, s.word_length_cap);
}

inline constexpr std::size_t kMaxScanSites = 64;

// 4-subsets of orbit points, pairwise within 2 * window, lying on a common
// circle, horocycle, equidistant curve or geodesic.
inline std::vector<std::array<int, 4>> degeneracy_scan(
    const SiteSystem& s,
    double window = std::numeric_limits<double>::infinity()) {
  const int n = static_cast<int>(s.orbit.size());
  if (s.orbit.size() > kMaxScanSites)
    throw SizeError("degeneracy scan is limited to 64 orbit points");
  std::vector<std::vector<char>> close(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      close[i][j] = dist(s.orbit[i].site, s.orbit[j].site) <= 2.0 * window;
  std::vector<std::array<int, 4>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (!close[a][b]) continue;
      for (int c = b + 1; c < n; ++c) {
        if (!close[a][c] || !close[b][c]) continue;
        for (int d = c + 1; d < n; ++d) {
          if (!close[a][d] || !close[b][d] || !close[c][d]) continue;
          if (is_degenerate_quadruple(s.orbit[a].site, s.orbit[b].site,
                                      s.orbit[c].site, s.orbit[d].site))
            out.push_back({a, b, c, d});
        }
      }
    }
  return out;
}

// Default truncation radius: twice the diameter of the basepoint cloud plus
// 4 epsilon, capped at 6.
inline double auto_truncation_radius(const std::vector<MinkowskiPoint>& pts,
                                     double epsilon) {
  double diam = 0.0;
  for (const auto& a : pts)
    for (const auto& b : pts) diam = std::max(diam, dist(a, b));
  return std::min(6.0, 2.0 * diam + 4.0 * epsilon);
}

}  // namespace hypervor
