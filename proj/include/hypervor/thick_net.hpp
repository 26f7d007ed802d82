#pragma once

// Displacement (shortone) estimates over a ball of group elements, maximal
// thick nets, facet orbits of the Voronoi complex, and dot systems.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypervor/errors.hpp"
#include "hypervor/kernel.hpp"
#include "hypervor/rng.hpp"
#include "hypervor/voronoi.hpp"
#include "hypervor/words.hpp"

namespace hypervor {

struct QuotientScene {
  std::vector<LorentzIsometry> generators;
  std::vector<Word> relators;
  double epsilon = std::log(3.0);
  int sample_budget = 200;
  double b_half_epsilon = 0.93;
  int word_length_cap = 3;
  MinkowskiPoint region_center;
  double region_radius = 1.0;
  std::uint64_t seed = 0;
};

inline void validate(const QuotientScene& s) {
  if (!(s.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (!(s.b_half_epsilon > 0.0)) throw InputError("b_half_epsilon must be positive");
  if (s.sample_budget < 1) throw InputError("sample_budget must be positive");
  if (s.word_length_cap < 1) throw InputError("word_length_cap must be positive");
  if (!(s.region_radius > 0.0)) throw InputError("region radius must be positive");
}

// Nontrivial group elements of word length 1..cap, plus the next layer, which
// is only used to certify displacement minima.
struct GroupBall {
  std::vector<GroupElement> elements;
  std::vector<GroupElement> outer;
  int cap = 0;
  bool trivial = true;
};

inline GroupBall make_group_ball(const std::vector<LorentzIsometry>& gens, int cap) {
  GroupBall b;
  b.cap = cap;
  std::vector<GroupElement> layer{{Word{}, LorentzIsometry{}}};
  for (int len = 1; len <= cap + 1; ++len) {
    layer = extend_layer(gens, layer);
    for (const auto& e : layer) {
      // Relations of the group show up as identity matrices.
      if (e.matrix.is_identity(1e-9)) continue;
      (len <= cap ? b.elements : b.outer).push_back(e);
    }
  }
  b.trivial = b.elements.empty();
  return b;
}

inline GroupBall make_group_ball(const QuotientScene& s) {
  return make_group_ball(s.generators, s.word_length_cap);
}

struct Shortone {
  double value = std::numeric_limits<double>::infinity();
  bool certified = true;
  Word word;
};

// Minimum displacement of p over the ball. Certified when every element of
// the next word length moves p by more than twice the minimum.
inline Shortone shortone(const MinkowskiPoint& p, const GroupBall& ball) {
  Shortone s;
  if (ball.trivial) return s;
  for (const auto& e : ball.elements) {
    const double d = dist(p, apply(e.matrix, p));
    if (d < s.value) {
      s.value = d;
      s.word = e.word;
    }
  }
  double outer = std::numeric_limits<double>::infinity();
  for (const auto& e : ball.outer) outer = std::min(outer, dist(p, apply(e.matrix, p)));
  s.certified = outer > 2.0 * s.value;
  return s;
}

inline bool is_thick(const MinkowskiPoint& p, const GroupBall& ball, double epsilon) {
  return shortone(p, ball).value >= epsilon;
}

inline bool commute(const LorentzIsometry& a, const LorentzIsometry& b) {
  const Mat4 ab = mat_mul(a.matrix(), b.matrix());
  const Mat4 ba = mat_mul(b.matrix(), a.matrix());
  return max_abs_diff(ab, ba) <= tol::kNorm * std::max(1.0, max_abs(ab));
}

struct MargulisWitness {
  MinkowskiPoint point;
  Word first, second;
  double first_displacement = 0.0, second_displacement = 0.0;
};

// A point and two non-commuting elements that both move it less than
// epsilon, which shows epsilon is not a Margulis number.
inline std::optional<MargulisWitness> margulis_check(
    const GroupBall& ball, const std::vector<MinkowskiPoint>& samples, double epsilon) {
  for (const auto& p : samples) {
    std::vector<std::pair<const GroupElement*, double>> short_elems;
    for (const auto& e : ball.elements) {
      const double d = dist(p, apply(e.matrix, p));
      if (d < epsilon) short_elems.emplace_back(&e, d);
    }
    for (std::size_t i = 0; i < short_elems.size(); ++i)
      for (std::size_t j = i + 1; j < short_elems.size(); ++j)
        if (!commute(short_elems[i].first->matrix, short_elems[j].first->matrix))
          return MargulisWitness{p, short_elems[i].first->word,
                                 short_elems[j].first->word, short_elems[i].second,
                                 short_elems[j].second};
  }
  return std::nullopt;
}

// min over enumerated g (and the identity) of dist(p, g q).
inline double orbit_distance(const MinkowskiPoint& p, const MinkowskiPoint& q,
                             const GroupBall& ball, Word* word = nullptr) {
  double best = dist(p, q);
  if (word) word->clear();
  for (const auto& e : ball.elements) {
    const double d = dist(p, apply(e.matrix, q));
    if (d < best) {
      best = d;
      if (word) *word = e.word;
    }
  }
  return best;
}

enum class RejectReason { Thin, Near };

struct Rejection {
  MinkowskiPoint point;
  RejectReason reason = RejectReason::Thin;
  int blocker = -1;  // net point index for Near
  Word word;         // displacing or separating element
  double value = 0.0;
};

struct ThickNet {
  std::vector<MinkowskiPoint> points;
  double epsilon = 0.0;
  // The final run of consecutive rejections, each with its reason.
  std::vector<Rejection> certificate;
  long candidates = 0;
  bool budget_exhausted = false;  // stopped by the hard cap, not the budget
};

namespace detail {

inline bool try_insert(ThickNet& net, const MinkowskiPoint& p, const GroupBall& ball,
                       double epsilon, Rejection& why) {
  const Shortone s = shortone(p, ball);
  if (s.value < epsilon) {
    why = {p, RejectReason::Thin, -1, s.word, s.value};
    return false;
  }
  for (int i = 0; i < static_cast<int>(net.points.size()); ++i) {
    Word w;
    const double d = orbit_distance(p, net.points[i], ball, &w);
    if (d < epsilon) {
      why = {p, RejectReason::Near, i, w, d};
      return false;
    }
  }
  net.points.push_back(p);
  return true;
}

inline double radical_inverse(std::uint64_t n, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (n > 0) {
    r += f * static_cast<double>(n % base);
    n /= base;
    f *= inv;
  }
  return r;
}

// Radius with density proportional to the volume element, by bisection on
// sinh(2r) - 2r.
inline double ball_radius_quantile(double u, double R) {
  auto vol = [](double r) { return std::sinh(2.0 * r) - 2.0 * r; };
  const double target = u * vol(R);
  double lo = 0.0, hi = R;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (vol(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Shifted Halton sequence, uniform with respect to hyperbolic volume in a
// ball.
class BallSampler {
 public:
  BallSampler(const MinkowskiPoint& center, double radius, std::uint64_t seed)
      : center_(center), radius_(radius) {
    Rng rng(derive_seed(seed, 0x6e6574));
    for (double& s : shift_) s = rng.uniform();
  }

  MinkowskiPoint operator()(std::uint64_t n) const {
    double u[3];
    const std::uint64_t bases[3] = {2, 3, 5};
    for (int d = 0; d < 3; ++d) {
      u[d] = detail::radical_inverse(n + 1, bases[d]) + shift_[d];
      u[d] -= std::floor(u[d]);
    }
    const double r = detail::ball_radius_quantile(u[0], radius_);
    const double z = 2.0 * u[1] - 1.0;
    const double phi = 2.0 * M_PI * u[2];
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return exp_map(center_, {rho * std::cos(phi), rho * std::sin(phi), z}, r);
  }

 private:
  MinkowskiPoint center_;
  double radius_;
  double shift_[3] = {0, 0, 0};
};

// Greedy net over an explicit candidate sequence.
inline ThickNet greedy_net(const std::vector<MinkowskiPoint>& candidates,
                           const GroupBall& ball, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  ThickNet net;
  net.epsilon = epsilon;
  for (const auto& p : candidates) {
    ++net.candidates;
    Rejection why;
    if (!detail::try_insert(net, p, ball, epsilon, why)) net.certificate.push_back(why);
  }
  if (net.points.empty()) throw EmptyNet("no candidate is epsilon-thick");
  return net;
}

inline constexpr long kMaxNetCandidates = 200000;

inline ThickNet build_maximal_net(const QuotientScene& scene, const GroupBall& ball) {
  validate(scene);
  ThickNet net;
  net.epsilon = scene.epsilon;
  const BallSampler sample(scene.region_center, scene.region_radius, scene.seed);
  std::vector<Rejection> run;
  const long hard_cap = std::max<long>(kMaxNetCandidates, 20L * scene.sample_budget);
  for (long n = 0; n < hard_cap; ++n) {
    ++net.candidates;
    Rejection why;
    if (detail::try_insert(net, sample(static_cast<std::uint64_t>(n)), ball,
                           scene.epsilon, why)) {
      run.clear();
      continue;
    }
    run.push_back(why);
    if (static_cast<int>(run.size()) >= scene.sample_budget) break;
  }
  net.budget_exhausted = static_cast<int>(run.size()) < scene.sample_budget;
  net.certificate = std::move(run);
  if (net.points.empty()) throw EmptyNet("the working region is entirely thin");
  return net;
}

inline ThickNet build_maximal_net(const QuotientScene& scene) {
  return build_maximal_net(scene, make_group_ball(scene));
}

// Checks the separation and thickness invariants; returns a description of
// the first failure, or an empty string.
inline std::string check_net(const ThickNet& net, const GroupBall& ball) {
  const double e = net.epsilon - tol::kGeom;
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    if (shortone(net.points[i], ball).value < e)
      return "net point " + std::to_string(i) + " is thin";
    for (std::size_t j = i + 1; j < net.points.size(); ++j)
      if (orbit_distance(net.points[i], net.points[j], ball) < e)
        return "net points " + std::to_string(i) + " and " + std::to_string(j) +
               " are closer than epsilon";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Sampling faces of Voronoi cells.

namespace detail {

inline bool in_core_point(const Cell& c, const MinkowskiPoint& x) {
  return dist(c.poly.center(), x) < c.poly.core_radius() * (1.0 - 1e-9);
}

// Facet vertices of a cell in cyclic order, in Klein coordinates.
inline std::vector<Vec3> ordered_polygon(const ConvexPolyhedron& p, const Face& f) {
  const auto& K = p.klein_vertices();
  std::vector<Vec3> pts;
  for (int v : f.vertex_ids) pts.push_back(K[v]);
  Vec3 c{0, 0, 0};
  for (const auto& q : pts) c = c + q;
  c = (1.0 / static_cast<double>(pts.size())) * c;
  // Plane normal from the widest cross product.
  Vec3 n{0, 0, 0};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec3 x = cross3(pts[i] - c, pts[j] - c);
      if (norm3(x) > norm3(n)) n = x;
    }
  const Vec3 e1 = pts[0] - c;
  const Vec3 e2 = cross3(n, e1);
  std::vector<std::pair<double, Vec3>> ang;
  for (const auto& q : pts)
    ang.emplace_back(std::atan2(dot3(q - c, e2), dot3(q - c, e1)), q);
  std::sort(ang.begin(), ang.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Vec3> out;
  for (const auto& [a, q] : ang) out.push_back(q);
  return out;
}

inline void push_unique(std::vector<Vec3>& v, const Vec3& k) {
  for (const auto& q : v)
    if (norm3(q - k) < 1e-12) return;
  v.push_back(k);
}

}  // namespace detail

inline constexpr int kFaceGrid = 4;

// Points of the relative interior of a face of a cell, restricted to the
// cell's core ball. Facets also get the foot of the perpendicular from the
// site when it falls inside the facet.
inline std::vector<MinkowskiPoint> sample_face(const Cell& c, const Face& f,
                                               int m = kFaceGrid) {
  const auto& K = c.poly.klein_vertices();
  std::vector<Vec3> ks;
  if (f.dim == 0) {
    ks.push_back(K[f.vertex_ids[0]]);
  } else if (f.dim == 1) {
    const Vec3 a = K[f.vertex_ids[0]], b = K[f.vertex_ids[1]];
    for (int i = 1; i <= m; ++i) {
      const double t = static_cast<double>(i) / (m + 1);
      ks.push_back((1.0 - t) * a + t * b);
    }
  } else if (f.dim == 2) {
    const auto poly = detail::ordered_polygon(c.poly, f);
    Vec3 ctr{0, 0, 0};
    for (const auto& q : poly) ctr = ctr + q;
    ctr = (1.0 / static_cast<double>(poly.size())) * ctr;
    detail::push_unique(ks, ctr);
    for (std::size_t t = 0; t < poly.size(); ++t) {
      const Vec3 a = poly[t], b = poly[(t + 1) % poly.size()];
      for (int j = 0; j < m; ++j)
        for (int k = 0; j + k < m; ++k) {
          const double wa = static_cast<double>(j) / m, wb = static_cast<double>(k) / m;
          detail::push_unique(ks, (1.0 - wa - wb) * ctr + wa * a + wb * b);
        }
    }
  }
  std::vector<MinkowskiPoint> out;
  for (const auto& k : ks) {
    const MinkowskiPoint x = c.poly.frame().lift(k);
    if (detail::in_core_point(c, x)) out.push_back(x);
  }
  return out;
}

// Facet samples plus the foot of the perpendicular from the site.
inline std::vector<MinkowskiPoint> sample_facet(const Cell& c, const Face& f,
                                                const MinkowskiPoint& foot) {
  auto out = sample_face(c, f);
  bool inside = detail::in_core_point(c, foot);
  // Strictly inside every other bounding half-space.
  if (inside)
    for (std::size_t i = 0; i < c.poly.halfspaces().size(); ++i) {
      if (std::binary_search(f.defining_halfspace_indices.begin(),
                             f.defining_halfspace_indices.end(), static_cast<int>(i)))
        continue;
      if (c.poly.halfspaces()[i].value(foot) > -1e-9) inside = false;
    }
  if (inside) out.insert(out.begin(), foot);
  return out;
}

// Interior samples of a cell: the site and points halfway to its facets.
inline std::vector<MinkowskiPoint> sample_cell(const Cell& c) {
  std::vector<MinkowskiPoint> out{c.poly.center()};
  const Vec3 zero{0, 0, 0};
  for (int f : c.poly.face_ids(2)) {
    const Face& F = c.poly.faces()[f];
    if (F.is_artificial) continue;
    for (const auto& x : sample_face(c, F, 2)) {
      const Vec3 k = c.poly.frame().klein(x);
      out.push_back(c.poly.frame().lift(0.5 * (k + zero)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Facet orbits of the base cells.

// A facet of the cell of base point `base`, lying on the bisector with the
// orbit point word * P_other.
struct FacetSide {
  int base = 0;
  int cell = 0;  // orbit index of the base point's cell
  int face = 0;
  int neighbor = 0;  // orbit index of word * P_other
  int other = 0;
  Word word;
};

struct FacetOrbit {
  FacetSide a, b;  // a is the canonical representative
  bool loop() const { return a.base == b.base; }
};

namespace detail {

inline bool side_before(const FacetSide& x, const FacetSide& y) {
  if (x.base != y.base) return x.base < y.base;
  if (x.word.size() != y.word.size()) return x.word.size() < y.word.size();
  return x.word < y.word;
}

// Facet of `cell` on the bisector with orbit point `neighbor`, or -1.
inline int facet_towards(const VoronoiComplex& vc, int cell, int neighbor) {
  std::vector<int> key{cell, neighbor};
  std::sort(key.begin(), key.end());
  const auto it = vc.shared_faces.find(key);
  if (it == vc.shared_faces.end()) return -1;
  for (const auto& [c, f] : it->second)
    if (c == cell && vc.cells[c].poly.faces()[f].dim == 2) return f;
  return -1;
}

}  // namespace detail

// Genuine facets of base cells reaching the core, paired into orbits: the
// facet of P_i towards g P_j is identified with the facet of P_j towards
// g^-1 P_i.
inline std::vector<FacetOrbit> facet_orbits(const VoronoiComplex& vc) {
  const SiteSystem& s = vc.sites;
  std::vector<FacetOrbit> out;
  std::map<std::pair<int, int>, int> seen;  // (cell, face) -> orbit
  for (int i = 0; i < static_cast<int>(s.basepoints.size()); ++i) {
    const int ci = s.base_site(i);
    if (ci < 0) throw ComplexInconsistency("basepoint missing from orbit");
    const Cell& cell = vc.cells[ci];
    for (int f : cell.poly.face_ids(2)) {
      const Face& F = cell.poly.faces()[f];
      if (F.is_artificial || !in_core(cell, F)) continue;
      if (seen.count({ci, f})) continue;
      const auto key = vc.face_sites(ci, f);
      if (key.size() != 2)
        throw ComplexInconsistency("facet equidistant from more than two sites");
      const int n = key[0] == ci ? key[1] : key[0];
      FacetSide a{i, ci, f, n, s.orbit[n].base_index, s.orbit[n].word};
      const int j = a.other;
      const int cj = s.base_site(j);
      const MinkowskiPoint back = apply(s.orbit[n].element.inverse(), s.orbit[ci].site);
      const int m = s.find(back);
      if (m < 0)
        throw ComplexInconsistency("facet partner outside the enumerated orbit; "
                                   "increase word_length_cap");
      const int g = detail::facet_towards(vc, cj, m);
      if (g < 0)
        throw ComplexInconsistency("facet of base cell " + std::to_string(i) +
                                   " has no partner in base cell " + std::to_string(j));
      if (cj == ci && g == f)
        throw ComplexInconsistency("facet paired with itself (torsion suspected)");
      FacetSide b{j, cj, g, m, i, s.orbit[m].word};
      if (detail::side_before(b, a)) std::swap(a, b);
      const int id = static_cast<int>(out.size());
      seen[{a.cell, a.face}] = id;
      seen[{b.cell, b.face}] = id;
      out.push_back({a, b});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Good sets and dot systems.

// Restricts "thick" to a region, used when a net is maximal only there.
struct ThickRegion {
  bool restricted = false;
  MinkowskiPoint center;
  double radius = 0.0;
  bool contains(const MinkowskiPoint& x) const {
    return !restricted || dist(center, x) <= radius;
  }
};

struct GoodSetFailure {
  int cell = 0, face = 0;
  double best = 0.0;
};

struct GoodSetReport {
  bool good = false;
  bool weakly_simple = false;
  bool thick_interior = false;
  WeakSimplicityReport weak;
  std::vector<GoodSetFailure> failures;
};

// Condition (1): weak simplicity. Condition (2): each face of a base cell
// with a sample in the thick part has a sample strictly inside it.
inline GoodSetReport good_set_check(const VoronoiComplex& vc, const GroupBall& ball,
                                    double epsilon) {
  GoodSetReport r;
  r.weak = is_weakly_simple(vc);
  r.weakly_simple = r.weak.weakly_simple;
  const SiteSystem& s = vc.sites;
  for (int i = 0; i < static_cast<int>(s.basepoints.size()); ++i) {
    const int ci = s.base_site(i);
    const Cell& c = vc.cells[ci];
    const auto& F = c.poly.faces();
    for (int f = 0; f < static_cast<int>(F.size()); ++f) {
      if (F[f].is_artificial) continue;
      const auto pts = F[f].dim == 3 ? sample_cell(c) : sample_face(c, F[f]);
      double best = -1.0;
      bool meets = false;
      for (const auto& x : pts) {
        const double v = shortone(x, ball).value;
        best = std::max(best, v);
        meets = meets || v >= epsilon;
      }
      if (meets && !(best > epsilon + tol::kMargin)) r.failures.push_back({ci, f, best});
    }
  }
  r.thick_interior = r.failures.empty();
  r.good = r.weakly_simple && r.thick_interior;
  return r;
}

struct Dot {
  int orbit = 0;  // index into DotSystem::orbits
  MinkowskiPoint point;  // on the canonical side's facet
  double shortone = 0.0;
};

struct DotSystem {
  std::vector<FacetOrbit> orbits;
  std::vector<Dot> dots;
  // dot index per orbit, -1 when the orbit misses the thick part
  std::vector<int> dot_of_orbit;
};

inline DotSystem build_dot_system(const VoronoiComplex& vc, const GroupBall& ball,
                                  double epsilon, const ThickRegion& region = {}) {
  DotSystem ds;
  ds.orbits = facet_orbits(vc);
  ds.dot_of_orbit.assign(ds.orbits.size(), -1);
  const SiteSystem& s = vc.sites;
  for (int o = 0; o < static_cast<int>(ds.orbits.size()); ++o) {
    const FacetSide& a = ds.orbits[o].a;
    const Cell& c = vc.cells[a.cell];
    const MinkowskiPoint& p = s.orbit[a.cell].site;
    const MinkowskiPoint& q = s.orbit[a.neighbor].site;
    const MinkowskiPoint foot =
        MinkowskiPoint::from_coords(MinkowskiPoint::renormalized(p.coords() + q.coords()));
    const auto pts = sample_facet(c, c.poly.faces()[a.face], foot);
    int best = -1;
    double best_v = -1.0, best_d = 0.0;
    bool meets = false;
    for (int k = 0; k < static_cast<int>(pts.size()); ++k) {
      if (!region.contains(pts[k])) continue;
      const double v = shortone(pts[k], ball).value;
      meets = meets || v >= epsilon;
      if (!(v > epsilon)) continue;
      const double d = dist(p, pts[k]);
      if (best < 0 || v > best_v || (v == best_v && d < best_d - 1e-12)) {
        best = k;
        best_v = v;
        best_d = d;
      }
    }
    if (best < 0) {
      if (meets)
        throw ResolutionError("facet orbit " + std::to_string(o) +
                              " meets the thick part but no sample exceeds epsilon");
      continue;
    }
    // The partner facet must carry the translated dot.
    const MinkowskiPoint back = apply(s.orbit[a.neighbor].element.inverse(), pts[best]);
    if (!vc.cells[ds.orbits[o].b.cell].poly.contains(back, 1e-7))
      throw ComplexInconsistency("dot of facet orbit " + std::to_string(o) +
                                 " does not map into the partner cell");
    ds.dot_of_orbit[o] = static_cast<int>(ds.dots.size());
    ds.dots.push_back({o, pts[best], best_v});
  }
  return ds;
}

}  // namespace hypervor
