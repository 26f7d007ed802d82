#pragma once

// End-to-end run: net, complex (with perturbation retries), dots, dual graph,
// coloring, assignment, pruning, and the bound evaluations.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "hypervor/bounds.hpp"
#include "hypervor/coloring.hpp"
#include "hypervor/dual_graph.hpp"
#include "hypervor/io.hpp"
#include "hypervor/thick_net.hpp"
#include "hypervor/voronoi.hpp"

namespace hypervor {

struct PipelineOptions {
  std::optional<std::uint64_t> seed;  // overrides the scene
  int max_retries = 16;
  int max_net_repairs = 8;
  double base_perturbation = 1e-4;
};

// --seed, then the scene, then HYPERVOR_SEED, then 0.
inline std::uint64_t resolve_seed(const SceneFile& f, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (f.has_seed) return f.scene.seed;
  if (const char* env = std::getenv("HYPERVOR_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("HYPERVOR_SEED is not an unsigned integer");
  }
  return 0;
}

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct PipelineRun {
  std::uint64_t seed = 0;
  bool completed = false;
  std::string failed_stage;  // empty when completed
  std::string error_kind, error_message;

  GroupBall ball;
  ThickRegion region;
  ThickNet net;  // maximal_net mode only
  std::vector<MinkowskiPoint> points;
  double truncation_radius = 0.0;
  int attempts = 0;
  double perturbation = 0.0;
  std::vector<std::array<int, 4>> degeneracies;  // of the final sites, when small
  VoronoiComplex vc;
  GoodSetReport good;
  DotSystem dots;
  DualGraph graph;
  std::vector<double> lengths;
  ColoringSystem coloring;
  std::vector<ColoringViolation> coloring_violations;
  ColoredGraph colored;
  Assignment assignment;
  std::vector<int> dd;
  PrunedGraphs pruned;
  GraphStats stats;
  int reroutes_checked = 0, reroutes_unresolved = 0;
  int net_repairs = 0;  // points added from dots

  GraphBoundInputs graph_inputs;
  Rational betti_bound, rank_bound;
  std::vector<double> loop_displacements;
  std::optional<RhoResult> rho;
  std::optional<Rational> corollary;
  std::optional<RankVolumeBound> volume_bound;
  std::optional<HeadlineReport> headline;

  std::vector<Check> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  int exit_code() const { return completed && all_pass() ? 0 : 1; }
};

namespace detail {

inline void check(PipelineRun& r, std::string name, bool pass, std::string detail = {}) {
  r.checks.push_back({std::move(name), pass, std::move(detail)});
}

inline void stage_sites(PipelineRun& r, const SceneFile& f) {
  if (f.mode == SiteMode::MaximalNet) {
    QuotientScene q = f.scene;
    q.seed = r.seed;
    r.net = build_maximal_net(q, r.ball);
    r.points = r.net.points;
    r.region = {true, q.region_center, q.region_radius};
    const auto why = check_net(r.net, r.ball);
    check(r, "net_separated_and_thick", why.empty(), why);
    check(r, "net_budget_reached", !r.net.budget_exhausted,
          r.net.budget_exhausted ? "candidate cap hit before the rejection budget" : "");
  } else {
    r.points = f.basepoints;
  }
  r.truncation_radius = f.truncation_radius
                            ? *f.truncation_radius
                            : auto_truncation_radius(r.points, f.scene.epsilon);
}

// Attempt 0 is unperturbed; attempt a moves the sites by at most
// base * 2^-(a-1), seeded with seed + a.
inline void stage_complex(PipelineRun& r, const SceneFile& f, const PipelineOptions& opt) {
  const SiteSystem base = enumerate_orbit(f.scene.generators, r.points, f.scene.word_length_cap);
  std::string last;
  for (int a = 0; a <= opt.max_retries; ++a) {
    r.attempts = a + 1;
    r.perturbation = a == 0 ? 0.0 : opt.base_perturbation * std::ldexp(1.0, -(a - 1));
    const SiteSystem s = a == 0 ? base : perturb_sites(base, r.perturbation, r.seed + a);
    try {
      r.vc = build_complex(s, r.truncation_radius);
    } catch (const DegenerateInput& e) {
      last = e.what();
      continue;
    }
    r.good = good_set_check(r.vc, r.ball, f.scene.epsilon);
    if (r.good.good) {
      if (s.orbit.size() <= kMaxScanSites) r.degeneracies = degeneracy_scan(s);
      return;
    }
    last = r.good.weakly_simple ? "thick faces without interior thick samples"
                                : "complex is not weakly simple";
  }
  throw WeakSimplicityViolation("no good site set after " + std::to_string(opt.max_retries) +
                                " perturbation retries: " + last);
}

inline void stage_graph(PipelineRun& r, const SceneFile& f) {
  r.dots = build_dot_system(r.vc, r.ball, f.scene.epsilon, r.region);
  r.graph = build_dual_graph(r.vc, r.dots);
  r.lengths = edge_lengths(r.graph, r.vc);
  r.stats = graph_stats(r.graph);
}

// A dot is a thick point of the region; if it is epsilon-far from the net the
// sampled net was not maximal, so the dot joins it.
inline int repair_net(PipelineRun& r, const SceneFile& f) {
  int added = 0;
  for (const auto& d : r.dots.dots) {
    if (!r.region.contains(d.point)) continue;
    Rejection why;
    added += try_insert(r.net, d.point, r.ball, f.scene.epsilon, why);
  }
  if (added) r.points = r.net.points;
  return added;
}

inline void check_lengths(PipelineRun& r, const SceneFile& f) {
  if (f.mode != SiteMode::MaximalNet) return;
  double worst = 0.0;
  for (double x : r.lengths) worst = std::max(worst, x);
  check(r, "edge_lengths_below_2_epsilon", worst < 2.0 * f.scene.epsilon,
        "max length " + std::to_string(worst));
}

inline void stage_coloring(PipelineRun& r) {
  r.coloring = build_coloring_system(r.vc, r.graph);
  r.coloring_violations = hypervor::coloring_violations(r.vc, r.graph, r.coloring);
  check(r, "coloring_system_proper", r.coloring_violations.empty());
  r.colored = colored_graph(r.graph, r.coloring);
  r.assignment = derandomized_assignment(r.colored);
  r.dd = doubly_distinguished(r.colored, r.assignment.colors);
  const int e0 = nonloop_count(r.colored);
  check(r, "assignment_distinguishes_sixteenth", 16 * r.assignment.dd >= e0,
        std::to_string(r.assignment.dd) + " of " + std::to_string(e0));
  r.pruned = build_pruned_graphs(r.colored, r.dd);
}

// Every doubly distinguished edge is rerouted through non-distinguished ones.
inline void stage_reroute(PipelineRun& r, const SceneFile& f) {
  bool ok = true;
  std::string why;
  for (int e : r.dd) {
    ++r.reroutes_checked;
    try {
      const EdgePath path{{2 * e}};
      const auto out = reroute_to_ndd(r.graph, r.vc, r.ball, f.scene.epsilon, r.colored,
                                      r.assignment.colors, path, r.region);
      if (path_word(r.graph, out) != path_word(r.graph, path)) {
        ok = false;
        why = "edge " + std::to_string(e) + ": word changed";
      }
    } catch (const ResolutionError&) {
      ++r.reroutes_unresolved;
    } catch (const Error& x) {
      ok = false;
      why = "edge " + std::to_string(e) + ": " + x.what();
    }
  }
  check(r, "reroutes_preserve_lifts", ok, why);
}

inline void stage_bounds(PipelineRun& r, const SceneFile& f) {
  const int s = r.graph.vertices;
  std::vector<std::int64_t> loops_at(s, 0);
  for (int e = 0; e < r.graph.edge_count(); ++e) {
    if (!r.graph.is_loop(e)) continue;
    const auto& x = r.graph.oriented[2 * e];
    ++loops_at[x.init];
    const auto& p = r.vc.sites.basepoints[x.init];
    r.loop_displacements.push_back(dist(p, apply(x.matrix, p)));
  }
  if (f.freeness) {
    std::vector<double> short_loops;
    for (double d : r.loop_displacements)
      if (d < std::log(9.0)) short_loops.push_back(d);
    r.rho = rho_from_mode(*f.freeness, short_loops);
    if (r.rho->checked)
      check(r, "loop_displacements_consistent_with_freeness", !r.rho->check.violates,
            "sum " + std::to_string(r.rho->check.sum));
    for (auto& n : loops_at) n = std::min<std::int64_t>(n, r.rho->rho);
  }
  r.graph_inputs = {r.stats.edges, r.stats.loops, s, loops_at};
  r.betti_bound = hypervor::betti_bound(r.graph_inputs);
  r.rank_bound = rank_bound_graph(r.graph_inputs);
  if (r.pruned.dagger_connected && r.betti_bound >= Rational(0))
    check(r, "dagger_betti_within_bound",
          Rational(r.pruned.dagger_stats.betti) <= r.betti_bound,
          std::to_string(r.pruned.dagger_stats.betti) + " <= " + r.betti_bound.str());

  if (f.volume) {
    const std::int64_t rho = r.rho ? r.rho->rho : 0;
    r.corollary = corollary_bound(*f.volume, rho, f.scene.b_half_epsilon);
    if (std::abs(f.scene.epsilon - std::log(3.0)) < 1e-12) {
      BoundInputs in{*f.volume, f.scene.epsilon, log3::R(), log3::c.to_double(), rho,
                     f.scene.b_half_epsilon};
      r.volume_bound = rank_volume_bound(in);
    }
    if (f.freeness) {
      std::optional<HeadlineCase> which;
      if (f.freeness->kind == FreenessKind::KFree && f.freeness->k == 5)
        which = HeadlineCase::FiveFree;
      if (f.freeness->kind == FreenessKind::Semifree && f.freeness->k == 9)
        which = HeadlineCase::NineSemifree;
      if (which) r.headline = headline_bounds(*f.volume, *which, f.scene.b_half_epsilon);
    }
  }
}

}  // namespace detail

// Input errors propagate; any other failure is recorded with its stage.
inline PipelineRun run_pipeline(const SceneFile& f, const PipelineOptions& opt = {}) {
  PipelineRun r;
  r.seed = resolve_seed(f, opt.seed);
  validate(f.scene);
  std::string stage = "group_ball";
  try {
    r.ball = make_group_ball(f.scene);
    stage = "sites";
    detail::stage_sites(r, f);
    for (int round = 0;; ++round) {
      stage = "complex";
      detail::stage_complex(r, f, opt);
      stage = "graph";
      detail::stage_graph(r, f);
      if (f.mode != SiteMode::MaximalNet || round == opt.max_net_repairs) break;
      const int added = detail::repair_net(r, f);
      if (!added) break;
      r.net_repairs += added;
    }
    detail::check_lengths(r, f);
    stage = "coloring";
    detail::stage_coloring(r);
    stage = "reroute";
    detail::stage_reroute(r, f);
    stage = "bounds";
    detail::stage_bounds(r, f);
    r.completed = true;
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    r.failed_stage = stage;
    r.error_kind = e.kind();
    r.error_message = e.what();
  }
  return r;
}

inline GraphExport export_graph(const PipelineRun& r) {
  GraphExport g;
  g.vertices = r.graph.vertices;
  const std::set<int> dd(r.dd.begin(), r.dd.end());
  for (int e = 0; e < r.graph.edge_count(); ++e) {
    const auto& x = r.graph.oriented[2 * e];
    ExportEdge out;
    out.u = x.init;
    out.v = x.term;
    out.loop = r.graph.is_loop(e);
    out.dd = dd.count(e) > 0;
    out.length = e < static_cast<int>(r.lengths.size()) ? r.lengths[e] : 0.0;
    if (e < static_cast<int>(r.colored.edges.size())) {
      out.color_u = r.colored.edges[e].cu;
      out.color_v = r.colored.edges[e].cv;
    }
    out.word = x.word;
    g.edges.push_back(std::move(out));
  }
  return g;
}

inline json stats_json(const GraphStats& s) {
  return {{"edges", s.edges}, {"loops", s.loops}, {"vertices", s.vertices},
          {"betti", s.betti}, {"components", s.components}};
}

inline json headline_json(const HeadlineReport& h) {
  json j{{"case", case_name(h.which)}, {"volume", h.volume}, {"b", h.b},
         {"constant", h.constant.str()}, {"bound", h.bound}};
  j["intermediates"] = json::object();
  for (const auto& [k, v] : h.intermediates) j["intermediates"][k] = v.str();
  if (!h.branches.empty()) {
    j["branches"] = json::object();
    for (const auto& [k, v] : h.branches) j["branches"][k] = v;
  }
  j["checks"] = json::array();
  for (const auto& c : h.checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}});
  return j;
}

inline json rank_volume_json(const RankVolumeBound& b) {
  return {{"ball_volume", b.ball},       {"packing_ratio", b.packing_ratio},
          {"packing_floor", b.packing_floor}, {"volume_floor", b.volume_floor},
          {"per_piece", b.per_piece.str()}, {"bound", b.bound.str()}};
}

inline json report_json(const PipelineRun& r, const SceneFile& f) {
  json j;
  j["schema"] = kSchema;
  j["kind"] = "pipeline_report";
  j["status"] = !r.completed ? "failed" : r.all_pass() ? "ok" : "violation";
  j["seed"] = r.seed;
  j["mode"] = mode_name(f.mode);
  if (!r.completed)
    j["failure"] = {{"stage", r.failed_stage}, {"kind", r.error_kind}, {"message", r.error_message}};
  j["group_ball"] = {{"elements", r.ball.elements.size()}, {"trivial", r.ball.trivial}};
  if (f.mode == SiteMode::MaximalNet)
    j["net"] = {{"points", r.net.points.size()}, {"candidates", r.net.candidates},
                {"certificate", r.net.certificate.size()},
                {"budget_exhausted", r.net.budget_exhausted},
                {"repairs", r.net_repairs}};
  j["sites"] = {{"basepoints", r.points.size()}, {"truncation_radius", r.truncation_radius}};
  if (r.completed || r.failed_stage != "complex") {
    j["complex"] = {{"attempts", r.attempts},
                    {"perturbation", r.perturbation},
                    {"orbit_points", r.vc.sites.orbit.size()},
                    {"cells", r.vc.cells.size()},
                    {"one_faces", r.vc.one_faces.size()},
                    {"weakly_simple", r.good.weakly_simple},
                    {"good", r.good.good},
                    {"degenerate_quadruples", r.degeneracies.size()}};
  }
  if (r.completed) {
    j["dots"] = {{"facet_orbits", r.dots.orbits.size()}, {"dots", r.dots.dots.size()}};
    j["graph"] = stats_json(r.stats);
    j["coloring"] = {{"violations", r.coloring_violations.size()},
                     {"assignment", r.assignment.colors},
                     {"doubly_distinguished", r.dd}};
    j["pruned"] = {{"ndd", stats_json(r.pruned.ndd_stats)},
                   {"dagger", stats_json(r.pruned.dagger_stats)},
                   {"dagger_connected", r.pruned.dagger_connected}};
    j["reroutes"] = {{"checked", r.reroutes_checked}, {"unresolved", r.reroutes_unresolved}};
    json b;
    b["betti_bound"] = r.betti_bound.str();
    b["rank_bound_graph"] = r.rank_bound.str();
    b["loop_group_ranks"] = r.graph_inputs.loop_group_ranks;
    b["loop_displacements"] = r.loop_displacements;
    if (r.rho) {
      b["rho"] = r.rho->rho;
      if (r.rho->checked)
        b["log2k1"] = {{"k", r.rho->independent_k}, {"sum", r.rho->check.sum},
                       {"verdict", r.rho->check.violates ? "violates" : "consistent"}};
    }
    if (r.corollary) b["corollary_bound"] = r.corollary->str();
    if (r.volume_bound) b["rank_volume_bound"] = rank_volume_json(*r.volume_bound);
    if (r.headline) b["headline"] = headline_json(*r.headline);
    j["bounds"] = b;
    j["graph_export"] = graph_to_json(export_graph(r));
  }
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    json x{{"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) x["detail"] = c.detail;
    j["checks"].push_back(x);
  }
  return j;
}

}  // namespace hypervor
