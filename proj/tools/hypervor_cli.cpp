// Command-line workbench. Exit codes: 0 success, 1 a report with a property
// violation or stage failure, 2 input error, 3 IO error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypervor/hypervor.hpp"

using namespace hypervor;

namespace {

struct Common {
  std::string scene;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("scene", c.scene, "scene JSON file")->required();
  cmd->add_option("--seed", c.seed, "overrides the scene seed");
  if (with_out) cmd->add_option("-o,--out", c.out, "output file (default: stdout)");
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) std::cout << text;
  else write_file(out, text);
}

void emit(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

json failure_json(const PipelineRun& r) {
  return {{"schema", kSchema},
          {"status", "failed"},
          {"failure", {{"stage", r.failed_stage}, {"kind", r.error_kind}, {"message", r.error_message}}}};
}

int cmd_scene_validate(const Common& c) {
  const SceneFile f = parse_scene_file(c.scene);
  const GroupBall ball = make_group_ball(f.scene);
  json j{{"schema", kSchema},
         {"status", "ok"},
         {"mode", mode_name(f.mode)},
         {"generators", f.scene.generators.size()},
         {"basepoints", f.basepoints.size()},
         {"trivial_group", ball.trivial},
         {"group_ball_elements", ball.elements.size()}};
  emit(c.out, j);
  return 0;
}

json complex_json(const PipelineRun& r) {
  json cells = json::array();
  for (const auto& cell : r.vc.cells) {
    const auto& o = r.vc.sites.orbit[cell.site];
    cells.push_back({{"site", cell.site},
                     {"basepoint", o.base_index},
                     {"word", word_string(o.word)},
                     {"interior", cell.interior},
                     {"vertices", cell.poly.count(0)},
                     {"edges", cell.poly.count(1, true)},
                     {"facets", cell.poly.count(2, true)},
                     {"compact", cell.poly.compact()}});
  }
  json ones = json::array();
  for (const auto& of : r.vc.one_faces) ones.push_back({{"sites", of.sites}, {"valence", of.valence}});
  return {{"schema", kSchema},
          {"kind", "voronoi_complex"},
          {"truncation_radius", r.vc.truncation_radius},
          {"attempts", r.attempts},
          {"perturbation", r.perturbation},
          {"cells", cells},
          {"one_faces", ones}};
}

// Sites and complex only; perturbation retries are opt-in.
PipelineRun build_sites_and_complex(const SceneFile& f, const Common& c, int retries) {
  PipelineRun r;
  r.seed = resolve_seed(f, c.seed);
  PipelineOptions opt;
  opt.max_retries = retries;
  std::string stage = "sites";
  try {
    r.ball = make_group_ball(f.scene);
    detail::stage_sites(r, f);
    stage = "complex";
    detail::stage_complex(r, f, opt);
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

int cmd_voronoi_build(const Common& c, int retries) {
  const SceneFile f = parse_scene_file(c.scene);
  const PipelineRun r = build_sites_and_complex(f, c, retries);
  if (!r.completed) {
    emit(c.out, failure_json(r));
    return 1;
  }
  emit(c.out, complex_json(r));
  return 0;
}

int cmd_voronoi_check(const Common& c) {
  const SceneFile f = parse_scene_file(c.scene);
  PipelineRun r;
  r.seed = resolve_seed(f, c.seed);
  r.ball = make_group_ball(f.scene);
  detail::stage_sites(r, f);
  const SiteSystem s = enumerate_orbit(f.scene.generators, r.points, f.scene.word_length_cap);
  json j{{"schema", kSchema}, {"kind", "voronoi_check"}};
  if (s.orbit.size() <= kMaxScanSites) {
    json q = json::array();
    for (const auto& d : degeneracy_scan(s)) q.push_back(d);
    j["degenerate_quadruples"] = q;
  }
  bool ok = true;
  try {
    const VoronoiComplex vc = build_complex(s, r.truncation_radius);
    const GoodSetReport g = good_set_check(vc, r.ball, f.scene.epsilon);
    json viol = json::array();
    for (int i : g.weak.violators)
      viol.push_back({{"sites", vc.one_faces[i].sites}, {"valence", vc.one_faces[i].valence}});
    j["one_faces_checked"] = g.weak.checked;
    j["weakly_simple"] = g.weakly_simple;
    j["valence_violations"] = viol;
    j["thick_interior"] = g.thick_interior;
    j["good"] = g.good;
    ok = g.good;
  } catch (const DegenerateInput& e) {
    j["degenerate_input"] = e.what();
    ok = false;
  }
  j["status"] = ok ? "ok" : "violation";
  emit(c.out, j);
  return ok ? 0 : 1;
}

int cmd_graph(const Common& c, const std::string& what, const std::string& format) {
  const SceneFile f = parse_scene_file(c.scene);
  PipelineOptions opt;
  opt.seed = c.seed;
  const PipelineRun r = run_pipeline(f, opt);
  if (!r.completed) {
    emit(c.out, failure_json(r));
    return 1;
  }
  if (what == "build") {
    const GraphExport g = export_graph(r);
    if (format == "dot") emit(c.out, graph_to_dot(g));
    else emit(c.out, graph_to_json(g));
    return 0;
  }
  if (what == "color") {
    json cells = json::object();
    for (const auto& [cell, col] : r.coloring.cell_colors) {
      json m = json::object();
      for (const auto& [face, k] : col) m[std::to_string(face)] = k;
      cells[std::to_string(cell)] = m;
    }
    json j{{"schema", kSchema},
           {"kind", "coloring"},
           {"cell_colors", cells},
           {"edge_colors", r.coloring.edge_color},
           {"violations", r.coloring_violations.size()},
           {"assignment", r.assignment.colors},
           {"doubly_distinguished", r.dd},
           {"nonloop_edges", nonloop_count(r.colored)}};
    emit(c.out, j);
    return r.coloring_violations.empty() ? 0 : 1;
  }
  json j{{"schema", kSchema},
         {"kind", "pruned"},
         {"graph", stats_json(r.stats)},
         {"ndd", stats_json(r.pruned.ndd_stats)},
         {"dagger", stats_json(r.pruned.dagger_stats)},
         {"dagger_connected", r.pruned.dagger_connected},
         {"betti_bound", r.betti_bound.str()},
         {"rank_bound_graph", r.rank_bound.str()}};
  emit(c.out, j);
  return r.all_pass() ? 0 : 1;
}

void require_b_ack(const CLI::App* cmd, double b, bool ack) {
  if (cmd->count("--b") && !ack)
    throw InputError("overriding b requires --override-b");
  if (!(b > 0.0)) throw InputError("b must be positive");
}

int cmd_bounds_rank(double V, std::int64_t rho, double eps, double R, double c, double b,
                    const std::string& out) {
  const auto r = rank_volume_bound({V, eps, R, c, rho, b});
  json j = rank_volume_json(r);
  j["schema"] = kSchema;
  j["kind"] = "rank_volume_bound";
  j["inputs"] = {{"volume", V}, {"epsilon", eps}, {"R", R}, {"c", c}, {"rho", rho}, {"b", b}};
  j["corollary_bound"] = corollary_bound(V, rho, b).str();
  j["b_in_accepted_interval"] = log3::b_accepted(b);
  emit(out, j);
  return 0;
}

int cmd_bounds_headline(double V, const std::string& which, double b, const std::string& out) {
  const auto h = headline_bounds(V, parse_case(which), b);
  json j = headline_json(h);
  j["schema"] = kSchema;
  j["kind"] = "headline";
  emit(out, j);
  return h.all_pass() ? 0 : 1;
}

int cmd_log2k1(const std::vector<double>& d, const std::string& out) {
  const auto r = log2k1_check(d);
  json j{{"schema", kSchema},
         {"kind", "log2k1"},
         {"k", d.size()},
         {"sum", r.sum},
         {"verdict", r.violates ? "violates" : "consistent"},
         {"max_displacement", r.max_displacement},
         {"log_2k_minus_1", r.threshold}};
  emit(out, j);
  return r.violates ? 1 : 0;
}

int cmd_pipeline(const Common& c, const std::string& graph_dot) {
  const SceneFile f = parse_scene_file(c.scene);
  PipelineOptions opt;
  opt.seed = c.seed;
  const PipelineRun r = run_pipeline(f, opt);
  emit(c.out, report_json(r, f));
  if (!graph_dot.empty() && r.completed) write_file(graph_dot, graph_to_dot(export_graph(r)));
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi complexes, dual graphs and rank bounds for hyperbolic 3-manifolds"};
  app.require_subcommand(1);
  int code = 0;

  auto* scene = app.add_subcommand("scene", "scene files")->require_subcommand(1);
  Common sv;
  auto* scene_validate = scene->add_subcommand("validate", "parse and validate a scene");
  add_common(scene_validate, sv);

  auto* voronoi = app.add_subcommand("voronoi", "Voronoi complexes")->require_subcommand(1);
  Common vb, vk;
  int retries = 0;
  auto* voronoi_build = voronoi->add_subcommand("build", "build the complex");
  add_common(voronoi_build, vb);
  voronoi_build->add_option("--retries", retries, "perturbation retries")->check(CLI::Range(0, 64));
  auto* voronoi_check = voronoi->add_subcommand("check", "valence, weak simplicity, degeneracies");
  add_common(voronoi_check, vk);

  auto* graph = app.add_subcommand("graph", "dual graphs")->require_subcommand(1);
  Common gb, gc, gp;
  std::string format = "json";
  auto* graph_build = graph->add_subcommand("build", "export the dual graph");
  add_common(graph_build, gb);
  graph_build->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  auto* graph_color = graph->add_subcommand("color", "coloring system and assignment");
  add_common(graph_color, gc);
  auto* graph_prune = graph->add_subcommand("prune", "pruned graphs and their bounds");
  add_common(graph_prune, gp);

  auto* bounds = app.add_subcommand("bounds", "bound formulas")->require_subcommand(1);
  double V = 0.0, b = log3::kDefaultB, eps = log3::epsilon(), R = log3::R(), c = log3::c.to_double();
  std::int64_t rho = 0;
  bool override_b = false;
  std::string which, bounds_out;
  auto* bounds_rank = bounds->add_subcommand("rank", "rank bound from volume");
  bounds_rank->add_option("--volume", V, "volume")->required();
  bounds_rank->add_option("--rho", rho, "loop-group rank bound")->required()->check(CLI::NonNegativeNumber);
  bounds_rank->add_option("--epsilon", eps, "Margulis number (default log 3)");
  bounds_rank->add_option("--R", R, "radius (default 2 log 3 + 0.15)");
  bounds_rank->add_option("--c", c, "packing constant (default 0.496)");
  bounds_rank->add_option("--b", b, "density constant b(epsilon/2) (default 0.93)");
  bounds_rank->add_flag("--override-b", override_b, "acknowledge a non-default b");
  bounds_rank->add_option("-o,--out", bounds_out, "output file");
  auto* bounds_headline = bounds->add_subcommand("headline", "headline bound evaluation");
  bounds_headline->add_option("--volume", V, "volume")->required();
  bounds_headline->add_option("--case", which, "five_free, nine_semifree, closed_homology or cusped_homology")
      ->required();
  bounds_headline->add_option("--b", b, "density constant b(epsilon/2) (default 0.93)");
  bounds_headline->add_flag("--override-b", override_b, "acknowledge a non-default b");
  bounds_headline->add_option("-o,--out", bounds_out, "output file");

  auto* log2k1 = app.add_subcommand("log2k1", "displacement test for independent elements")
                     ->require_subcommand(1);
  std::vector<double> displacements;
  std::string log_out;
  auto* log2k1_check_cmd = log2k1->add_subcommand("check", "sum of 1/(1+e^d) against 1/2");
  log2k1_check_cmd->add_option("displacements", displacements, "displacements d_i")->required();
  log2k1_check_cmd->add_option("-o,--out", log_out, "output file");

  auto* pipeline = app.add_subcommand("pipeline", "end-to-end runs")->require_subcommand(1);
  Common pr;
  std::string graph_dot;
  auto* pipeline_run = pipeline->add_subcommand("run", "run every stage and write a report");
  add_common(pipeline_run, pr);
  pipeline_run->add_option("--graph-dot", graph_dot, "also write the dual graph as DOT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*scene_validate) code = cmd_scene_validate(sv);
    else if (*voronoi_build) code = cmd_voronoi_build(vb, retries);
    else if (*voronoi_check) code = cmd_voronoi_check(vk);
    else if (*graph_build) code = cmd_graph(gb, "build", format);
    else if (*graph_color) code = cmd_graph(gc, "color", format);
    else if (*graph_prune) code = cmd_graph(gp, "prune", format);
    else if (*bounds_rank) {
      require_b_ack(bounds_rank, b, override_b);
      code = cmd_bounds_rank(V, rho, eps, R, c, b, bounds_out);
    } else if (*bounds_headline) {
      require_b_ack(bounds_headline, b, override_b);
      code = cmd_bounds_headline(V, which, b, bounds_out);
    } else if (*log2k1_check_cmd) code = cmd_log2k1(displacements, log_out);
    else if (*pipeline_run) code = cmd_pipeline(pr, graph_dot);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return 1;
  }
  return code;
}
