// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hypervor/hypervor.hpp"
#include "support.hpp"

using namespace hypervor;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

SceneFile scene(const std::string& name) {
  return parse_scene_file(std::string(HYPERVOR_SCENES) + "/" + name + ".json");
}

const std::vector<std::string> kScenes{"trivial_4site", "schottky", "cyclic", "concyclic",
                                       "schottky_net"};

// Square of side 2 tanh(1) in the x-y plane plus two poles, moved by `g`.
std::vector<MinkowskiPoint> concyclic_config(const LorentzIsometry& g, double r, double pole) {
  std::vector<MinkowskiPoint> pts;
  for (Vec3 d : {Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, -1, 0}})
    pts.push_back(apply(g, hvtest::polar(d, r)));
  pts.push_back(apply(g, hvtest::polar({0, 0, 1}, pole)));
  pts.push_back(apply(g, hvtest::polar({0, 0, -1}, pole)));
  return pts;
}

// Retry loop of the pipeline on a bare site set.
PipelineRun retry_complex(const std::vector<MinkowskiPoint>& pts, double R, std::uint64_t seed) {
  SceneFile f;
  f.basepoints = pts;
  f.truncation_radius = R;
  f.scene.epsilon = 0.5;
  PipelineRun r;
  r.seed = seed;
  r.ball = make_group_ball({}, 1);
  r.points = pts;
  r.truncation_radius = R;
  detail::stage_complex(r, f, PipelineOptions{});
  return r;
}

ColoredGraph random_connected(Rng& rng, int s, int m) {
  ColoredGraph g;
  g.vertices = s;
  for (int v = 1; v < s; ++v)  // spanning tree first
    g.edges.push_back({static_cast<int>(rng.below(v)), v, 1 + static_cast<int>(rng.below(4)),
                       1 + static_cast<int>(rng.below(4))});
  while (static_cast<int>(g.edges.size()) < m) {
    const int u = static_cast<int>(rng.below(s)), v = static_cast<int>(rng.below(s));
    if (u == v) continue;
    g.edges.push_back({u, v, 1 + static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(4))});
  }
  return g;
}

bool connected(const ColoredGraph& g) {
  UnionFind uf(g.vertices);
  for (const auto& e : g.edges) uf.unite(e.u, e.v);
  return uf.components() == 1;
}

void check_assignment_identity(Outcome& o, const ColoredGraph& g, int& graphs) {
  const int e0 = nonloop_count(g);
  const auto ex = exhaustive_assignment(g);
  const auto de = derandomized_assignment(g);
  std::uint64_t pow = 1;
  for (int i = 0; i < g.vertices - 2; ++i) pow *= 4;
  o.require(ex.total_over_all == pow * static_cast<std::uint64_t>(e0), "averaging identity");
  o.require(16 * ex.dd >= e0, "exhaustive max below E0/16");
  o.require(16 * de.dd >= e0, "derandomized below E0/16");
  ++graphs;
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  const Rational c = Rational(15, 32) * 314 - 1;
  o.require(c == Rational::parse("146.1875"), "(15/32)314 - 1");
  const Rational b = Rational::parse("0.93");
  const Rational four = c + Rational(4, 16), eight = c + Rational(8, 16);
  o.require(four == Rational::parse("146.4375"), "146.4375");
  o.require(four / b < Rational::parse("157.497"), "146.4375/0.93 < 157.497");
  o.require(eight == Rational::parse("146.6875"), "146.6875");
  o.require(eight / b < Rational::parse("157.766"), "146.6875/0.93 < 157.766");
  const Rational closed = 1 / Rational::parse("3.77") + Rational::parse("157.497");
  o.require(closed > Rational::parse("157.7622") && closed < Rational::parse("157.7623"),
            "1/3.77 + 157.497 = 157.7622...");
  o.require(closed < Rational::parse("157.763"), "157.7622... < 157.763");
  const Rational cusped = 1 / Rational::parse("2.848") + Rational::parse("157.766");
  o.require(cusped > Rational::parse("158.117") && cusped < Rational::parse("158.118"),
            "1/2.848 + 157.766 = 158.117...");
  o.require(cusped < Rational::parse("158.12"), "158.117... < 158.12");
  for (auto h : {HeadlineCase::FiveFree, HeadlineCase::NineSemifree,
                 HeadlineCase::ClosedHomology, HeadlineCase::CuspedHomology})
    o.require(headline_bounds(4.0, h).all_pass(), "headline checks " + case_name(h));
  o.note << "146.1875, 146.4375/0.93 = " << four.to_double() / 0.93 << ", 146.6875/0.93 = "
         << eight.to_double() / 0.93 << ", " << closed.to_double() << ", " << cusped.to_double();
}

void criterion2(Outcome& o) {
  const double small = ball_volume(std::log(3.0) / 2);
  o.require(std::abs(small - M_PI * (4.0 / 3.0 - std::log(3.0))) <= 1e-12, "closed form");
  // Reference digits 0.7373982 disagree with the closed form in the seventh place.
  o.require(std::abs(small - 0.737398) < 5e-7, "0.737398 to six places");
  const double big = ball_volume(log3::R());
  o.require(big > 156.98 && big < 156.99, "B(2 log 3 + 0.15) in (156.98, 156.99)");
  const double lo = log3::b_lower_exclusive().to_double(), hi = log3::b_upper_inclusive();
  double rmin = 1e300, rmax = -1e300;
  for (int i = 1; i <= 1000; ++i) {
    const double b = lo + (hi - lo) * i / 1000.0;
    if (!log3::b_accepted(b)) continue;
    const double ratio = (big - b) / log3::c.to_double();
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
    o.require(ratio >= 314.62 && ratio < 314.63, "ratio in [314.62, 314.63)");
    o.require(146.4375 / b < 157.497, "b keeps the five-free constant");
  }
  o.require(log3::b_accepted(0.93), "default b accepted");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "B(log3/2) = %.10f, B(R) = %.6f, b in (%.9f, %.9f], ratio in [%.5f, %.5f]", small,
                big, lo, hi, rmin, rmax);
  o.note << buf;
}

void criterion3(Outcome& o) {
  Rng rng(2024);
  int graphs = 0;
  // Every loopless multigraph on 2 and 3 vertices with at most 8 edges, each
  // under several random end colorings.
  for (int m = 1; m <= 8; ++m)
    for (int rep = 0; rep < 4; ++rep) {
      ColoredGraph g;
      g.vertices = 2;
      for (int i = 0; i < m; ++i)
        g.edges.push_back({0, 1, 1 + static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(4))});
      check_assignment_identity(o, g, graphs);
    }
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b)
      for (int c = 0; a + b + c <= 8; ++c)
        for (int rep = 0; rep < 4; ++rep) {
          ColoredGraph g;
          g.vertices = 3;
          auto add = [&](int u, int v, int n) {
            for (int i = 0; i < n; ++i)
              g.edges.push_back({u, v, 1 + static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(4))});
          };
          add(0, 1, a);
          add(0, 2, b);
          add(1, 2, c);
          if (!connected(g)) continue;
          check_assignment_identity(o, g, graphs);
        }
  const int exhaustive = graphs;
  for (int t = 0; t < 100; ++t) {
    const int s = 2 + static_cast<int>(rng.below(4));
    const int m = s - 1 + static_cast<int>(rng.below(8 - (s - 1) + 1));
    check_assignment_identity(o, random_connected(rng, s, m), graphs);
  }
  o.note << exhaustive << " enumerated colorings on s <= 3, " << graphs - exhaustive
         << " random graphs on s <= 5";
}

void criterion4(Outcome& o) {
  Rng rng(4);
  long samples = 0, cored = 0;
  int low_valence = 0, faces = 0;
  for (int scene_i = 0; scene_i < 20; ++scene_i) {
    const int n = 4 + static_cast<int>(rng.below(7));
    const auto s = enumerate_orbit({}, hvtest::random_points(rng, n, 1.2), 1);
    const auto vc = build_complex(s, 3.0);
    for (int k = 0; k < 100000; ++k) {
      const auto x = hvtest::random_point(rng, 2.0);
      std::vector<double> d;
      for (const auto& p : s.orbit) d.push_back(dist(x, p.site));
      const int best = static_cast<int>(std::min_element(d.begin(), d.end()) - d.begin());
      // Cells are only exact inside their core ball; beyond it the
      // truncation may have made a bisector redundant.
      auto in_core = [&](int j) {
        const auto& P = vc.cells[j].poly;
        return dist(P.center(), x) < P.core_radius();
      };
      bool ok = true;
      if (in_core(best)) {
        ok = vc.cells[best].poly.contains(x);
        ++cored;
      }
      for (int j = 0; j < n; ++j)
        if (d[j] > d[best] + 1e-6 && in_core(j)) ok = ok && !vc.cells[j].poly.contains(x);
      o.require(ok, "membership disagrees with nearest site");
      ++samples;
    }
    for (const auto& of : vc.one_faces) {
      ++faces;
      low_valence += of.valence < 3;
    }
  }
  o.require(low_valence == 0, "non-artificial 1-face of valence < 3");

  int simple = 0, perturbed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(1000 + seed);
    // A degenerate core plus random sites.
    auto pts = concyclic_config(hvtest::random_isometry(r, 0.3), 0.8, 1.2);
    for (const auto& p : hvtest::random_points(r, 3, 1.0)) pts.push_back(p);
    try {
      const auto run = retry_complex(pts, 3.0, seed);
      simple += is_weakly_simple(run.vc).weakly_simple;
      perturbed += run.attempts > 1;
    } catch (const Error&) {
    }
  }
  o.require(simple >= 95, "weak simplicity on fewer than 95 of 100 seeds");
  o.note << samples << " samples in 20 scenes (" << cored << " inside a core), " << faces << " 1-faces all of valence >= 3, "
         << simple << "/100 seeds weakly simple (" << perturbed << " needed perturbation)";
}

void criterion5(Outcome& o) {
  Rng rng(5);
  int configs = 0;
  for (int t = 0; t < 10; ++t) {
    const double r = rng.uniform(0.6, 1.2), pole = r + rng.uniform(0.3, 0.8);
    const auto pts = concyclic_config(hvtest::random_isometry(rng, 0.5), r, pole);
    const auto s = enumerate_orbit({}, pts, 1);
    const auto quads = degeneracy_scan(s);
    o.require(!quads.empty(), "concyclic quadruple not flagged");
    const auto before = build_complex(s, 3.0);
    int v4 = 0;
    for (const auto& of : before.one_faces) v4 += of.valence == 4;
    o.require(v4 > 0, "no valence-4 edge before perturbation");
    const auto run = retry_complex(pts, 3.0, 77 + t);
    o.require(run.attempts > 1, "retry loop did not perturb");
    bool all3 = !run.vc.one_faces.empty();
    for (const auto& of : run.vc.one_faces) all3 = all3 && of.valence == 3;
    o.require(all3, "valence other than 3 after perturbation");
    o.require(degeneracy_scan(run.vc.sites).empty(), "still flagged after perturbation");
    ++configs;
  }
  o.note << configs << " engineered configurations: flagged, valence 4 before, 3 after";
}

struct Entry {
  std::string name;
  double epsilon = 0.0;
  bool maximal_net = false;
  PipelineRun run;
};

struct Corpus {
  std::vector<Entry> runs;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus k;
    auto add = [&](const std::string& name, const SceneFile& f) {
      k.runs.push_back({name, f.scene.epsilon, f.mode == SiteMode::MaximalNet, run_pipeline(f)});
    };
    for (const auto& name : kScenes) add(name, scene(name));
    Rng rng(6);
    for (int i = 0; i < 10; ++i) {
      SceneFile f;
      f.basepoints = hvtest::random_points(rng, 4 + static_cast<int>(rng.below(6)), 1.0);
      f.truncation_radius = 3.0;
      f.scene.epsilon = 0.5;
      f.has_seed = true;
      f.scene.seed = 100 + i;
      add("random_" + std::to_string(i), f);
    }
    // A second maximal net: same group, another seed and region.
    auto f = scene("schottky_net");
    f.scene.seed = 7;
    f.scene.region_radius = 1.0;
    add("schottky_net_seed7", f);
    return k;
  }();
  return c;
}

void criterion6(Outcome& o) {
  int cells = 0, pairs = 0;
  for (const auto& [name, eps, net, r] : corpus().runs) {
    o.require(r.completed, name + " did not complete: " + r.error_message);
    if (!r.completed) continue;
    for (const auto& cell : r.vc.cells) {
      const auto g = facet_graph(cell.poly);
      const auto col = four_color_cell(cell.poly);
      for (std::size_t i = 0; i < g.facets.size(); ++i)
        for (int j : g.adj[i])
          o.require(col.at(g.facets[i]) != col.at(g.facets[j]), name + ": adjacent facets share a color");
      ++cells;
    }
    const int n = static_cast<int>(r.graph.oriented.size());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b || r.graph.oriented[a].init != r.graph.oriented[b].init) continue;
        if (!initially_adjacent(r.graph, r.vc, a, b)) continue;
        ++pairs;
        o.require(r.coloring.edge_color[a] != r.coloring.edge_color[b],
                  name + ": initially adjacent edges share a color");
      }
    o.require(r.coloring_violations.empty(), name + ": coloring violations");
  }
  o.note << cells << " cells properly 4-colored, " << pairs
         << " initially adjacent pairs with distinct colors";
}

void criterion7(Outcome& o) {
  int nets = 0, edges = 0, resolved = 0, unresolved = 0;
  double worst = 0.0;
  for (const auto& [name, e, net, r] : corpus().runs) {
    if (!r.completed) continue;
    if (net) {
      const double eps = e;
      ++nets;
      for (double len : r.lengths) {
        o.require(len < 2 * eps, name + ": edge length >= 2 epsilon");
        worst = std::max(worst, len / (2 * eps));
        ++edges;
      }
    }
    for (int id = 0; id < static_cast<int>(r.graph.oriented.size()); ++id) {
      try {
        const auto rr = reroute_edge(r.graph, r.vc, r.ball, e, id, r.region);
        const auto& h = r.graph.oriented[id];
        const auto& e0 = r.graph.oriented[rr.first];
        const auto& e1 = r.graph.oriented[rr.second];
        o.require(e0.init == h.init && e1.term == h.term && e0.term == e1.init,
                  name + ": reroute endpoints");
        o.require(initially_adjacent(r.graph, r.vc, id, rr.first), name + ": condition (2)");
        o.require(terminally_adjacent(r.graph, r.vc, id, rr.second), name + ": condition (3)");
        o.require(rr.words_equal, name + ": reroute words differ");
        const double err = max_abs_diff(e0.matrix.compose(e1.matrix).matrix(), h.matrix.matrix());
        o.require(err <= 1e-8 * std::max(1.0, max_abs(h.matrix.matrix())),
                  name + ": lift endpoint moved");
        ++resolved;
      } catch (const ResolutionError&) {
        ++unresolved;
      } catch (const Error& x) {
        o.require(false, name + ": " + x.what());
      }
    }
  }
  o.require(nets == 2 && edges > 0, "maximal-net scenes missing");
  o.require(resolved > 0, "no reroute resolved");
  o.note << edges << " edges on " << nets << " maximal-net scenes, max length/2eps = " << worst
         << "; " << resolved << " reroutes verified, " << unresolved
         << " with no thick 1-face in range";
}

void criterion8(Outcome& o) {
  int graphs = 0, applicable = 0;
  auto check_graph = [&](const ColoredGraph& g, const std::string& what) {
    const auto a = derandomized_assignment(g);
    const auto p = build_pruned_graphs(g, doubly_distinguished(g, a.colors));
    std::int64_t loops = 0;
    std::vector<std::int64_t> ranks(g.vertices, 0);
    for (const auto& e : g.edges)
      if (e.loop()) {
        ++loops;
        ++ranks[e.u];
      }
    const auto E = static_cast<std::int64_t>(g.edges.size());
    const GraphBoundInputs in{E, loops, g.vertices, ranks};
    const Rational bound = betti_bound(in);
    if (p.dagger_connected && bound >= Rational(0)) {
      ++applicable;
      o.require(Rational(p.dagger_stats.betti) <= bound, what + ": betti above bound");
    }
    std::int64_t sum = 0;
    for (auto x : ranks) sum += x;
    o.require(rank_bound_graph(in) == Rational(15 * E - 16 * g.vertices + 16 + sum, 16),
              what + ": rank bound expansion");
    o.require(bound == Rational(15 * (E - loops) - 16 * g.vertices + 16, 16),
              what + ": betti bound expansion");
    ++graphs;
  };
  for (const auto& [name, eps, net, r] : corpus().runs)
    if (r.completed) check_graph(r.colored, name);
  Rng rng(8);
  while (graphs < 50) {
    const int s = 1 + static_cast<int>(rng.below(8));
    ColoredGraph g = s > 1 ? random_connected(rng, s, s - 1 + static_cast<int>(rng.below(3 * s)))
                           : ColoredGraph{1, {}};
    for (int l = static_cast<int>(rng.below(3)); l > 0; --l) {
      const int v = static_cast<int>(rng.below(s));
      g.edges.push_back({v, v, 1 + static_cast<int>(rng.below(4)), 1 + static_cast<int>(rng.below(4))});
    }
    check_graph(g, "synthetic");
  }
  o.note << graphs << " graphs (" << corpus().runs.size() << " from pipeline runs), "
         << applicable << " with connected pruned graph and nonnegative bound";
}

void criterion9(Outcome& o) {
  for (int k = 1; k <= 10; ++k) {
    // exp(log(2k-1)) = 2k-1 exactly in rationals: sum of k copies of 1/(2k).
    Rational exact;
    for (int i = 0; i < k; ++i) exact += Rational(1, 2 * k);
    o.require(exact == Rational(1, 2), "rational equality case");
    const auto r = log2k1_check(std::vector<double>(k, std::log(2.0 * k - 1.0)));
    o.require(std::abs(r.sum - 0.5) <= 4e-16 * k, "floating equality case");
    o.require(!r.violates, "equality case must be consistent");
  }
  // Schottky data: displacements of the generators and their products at the sites.
  const auto f = scene("schottky");
  std::vector<double> d;
  for (const auto& g : f.scene.generators) d.push_back(dist(f.basepoints[0], apply(g, f.basepoints[0])));
  const auto sch = log2k1_check(d);
  o.require(!sch.violates, "Schottky displacements should be consistent");
  const auto short5 = log2k1_check(std::vector<double>(5, 1.0));
  o.require(short5.violates, "short displacements should violate");
  const auto rho = rho_from_mode({FreenessKind::KFree, 5}, std::vector<double>(5, 1.0));
  o.require(rho.checked && rho.check.violates, "mode check reports the violation");
  o.note << "Schottky sum " << sch.sum << " (consistent), five displacements of 1.0 sum "
         << short5.sum << " (violates)";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget;  // seconds
    bool uses_corpus;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> all{
      {1, "constant reproduction", 1, false, criterion1},
      {2, "ball volume checks", 1, false, criterion2},
      {3, "color assignment averaging", 30, false, criterion3},
      {4, "Voronoi correctness", 300, false, criterion4},
      {5, "degeneracy detection", 60, false, criterion5},
      {6, "four-coloring validity", 60, true, criterion6},
      {7, "edge lengths and reroutes", 120, true, criterion7},
      {8, "graph bound formulas", 60, true, criterion8},
      {9, "displacement test", 1, false, criterion9},
  };
  // The shared pipeline corpus is built once; its cost is added to every
  // criterion that uses it.
  const auto t0 = std::chrono::steady_clock::now();
  corpus();
  const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("corpus: %zu pipeline runs built in %.2fs\n", corpus().runs.size(), setup);

  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    const auto s = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count() +
        (c.uses_corpus ? setup : 0.0);
    o.require(secs < c.budget, "runtime budget exceeded");
    failed += !o.pass;
    std::printf("[%s] criterion %d %s (%.2fs, budget %.0fs): %s\n", o.pass ? "PASS" : "FAIL", c.id,
                c.title, secs, c.budget, o.note.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
