#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "hypervor/io.hpp"

using namespace hypervor;

namespace {

json identity_row() {
  return json::array({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
}

json minimal_scene() {
  return json::parse(R"({
    "generators": [],
    "basepoints": [[1, 0, 0, 0], [1.25, 0.75, 0, 0]],
    "epsilon": 0.5,
    "word_length_cap": 2,
    "truncation_radius": "auto",
    "seed": 3,
    "mode": "basepoints"
  })");
}

std::string error_of(const json& j) {
  try {
    parse_scene(j);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scene, ParsesMinimal) {
  const auto f = parse_scene(minimal_scene());
  EXPECT_EQ(f.basepoints.size(), 2u);
  EXPECT_FALSE(f.truncation_radius.has_value());
  EXPECT_EQ(f.scene.seed, 3u);
  EXPECT_TRUE(f.has_seed);
  EXPECT_DOUBLE_EQ(f.scene.b_half_epsilon, 0.93);
  EXPECT_EQ(f.mode, SiteMode::Basepoints);
}

TEST(Scene, IdentityGeneratorParses) {
  auto j = minimal_scene();
  j["generators"].push_back(identity_row());
  const auto f = parse_scene(j);
  ASSERT_EQ(f.scene.generators.size(), 1u);
  EXPECT_TRUE(is_trivial_generator(f.scene.generators[0]));
  EXPECT_TRUE(make_group_ball(f.scene).trivial);
}

TEST(Scene, BadMatrixNamesItsIndex) {
  auto j = minimal_scene();
  j["generators"].push_back(identity_row());
  auto bad = identity_row();
  bad[1] = 0.5;
  j["generators"].push_back(bad);
  EXPECT_NE(error_of(j).find("generators[1]"), std::string::npos) << error_of(j);
  EXPECT_NE(error_of(j).find("m^T J m"), std::string::npos);
  j["generators"][1] = json::array({1, 2, 3});
  EXPECT_NE(error_of(j).find("generators[1]: expected 16 numbers"), std::string::npos);
}

TEST(Scene, StrictFields) {
  auto j = minimal_scene();
  j["colour"] = 1;
  EXPECT_NE(error_of(j).find("colour: unknown field"), std::string::npos);
  j = minimal_scene();
  j["basepoints"][1] = json::array({1, 1, 0, 0});
  EXPECT_NE(error_of(j).find("basepoints[1]"), std::string::npos);
  j = minimal_scene();
  j["epsilon"] = "small";
  EXPECT_NE(error_of(j).find("epsilon: expected a number"), std::string::npos);
  j = minimal_scene();
  j["seed"] = -1;
  EXPECT_NE(error_of(j).find("seed"), std::string::npos);
  j = minimal_scene();
  j["mode"] = "maximal_net";
  EXPECT_NE(error_of(j).find("basepoints: must be empty"), std::string::npos);
  j = minimal_scene();
  j["relators"] = json::array({json::array({1})});
  EXPECT_NE(error_of(j).find("relators[0][0]: letter out of range"), std::string::npos);
  j = minimal_scene();
  j["freeness"] = {{"kind", "k_free"}, {"k", 5}, {"extra", 1}};
  EXPECT_NE(error_of(j).find("freeness.extra"), std::string::npos);
  j = minimal_scene();
  j["schema"] = "hypervor/0";
  EXPECT_NE(error_of(j).find("schema"), std::string::npos);
}

TEST(Scene, MalformedJsonGivesPosition) {
  try {
    parse_scene_text("{\n  \"epsilon\": 0.5,\n  \"seed\": ]\n}", "s.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("s.json: malformed JSON at line 3"), std::string::npos)
        << e.what();
  }
}

TEST(Scene, MissingFileIsIoError) {
  EXPECT_THROW(parse_scene_file("/nonexistent/scene.json"), IoError);
}

TEST(Scene, RoundTrip) {
  auto j = minimal_scene();
  j["generators"].push_back(identity_row());
  j["relators"] = json::array({json::array({1, -1})});
  j["truncation_radius"] = 2.5;
  j["freeness"] = {{"kind", "semifree"}, {"k", 9}};
  j["volume"] = 3.5;
  const auto f = parse_scene(j);
  const auto once = scene_to_json(f);
  const auto g = parse_scene(once);
  EXPECT_EQ(scene_to_json(g).dump(), once.dump());
  EXPECT_EQ(g.basepoints.size(), f.basepoints.size());
  for (std::size_t i = 0; i < f.basepoints.size(); ++i)
    EXPECT_EQ(g.basepoints[i].coords(), f.basepoints[i].coords());
  EXPECT_EQ(g.scene.relators, f.scene.relators);
  EXPECT_EQ(*g.truncation_radius, 2.5);
  EXPECT_EQ(g.freeness->kind, FreenessKind::Semifree);
  EXPECT_EQ(*g.volume, 3.5);
}

TEST(Scene, ShippedScenesParse) {
  const std::filesystem::path dir = HYPERVOR_SCENES;
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_scene_file(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 5);
}

TEST(GraphExport, EmptyGraph) {
  const GraphExport g;
  EXPECT_EQ(graph_to_dot(g), "digraph dual_graph {\n}\n");
  EXPECT_EQ(parse_graph(graph_to_json(g)), g);
}

TEST(GraphExport, OneEdge) {
  GraphExport g;
  g.vertices = 2;
  g.edges.push_back({0, 1, false, true, 0.8, 1, 3, {1, -2}});
  const auto dot = graph_to_dot(g);
  EXPECT_NE(dot.find("  0 [label=\"0\"];"), std::string::npos);
  EXPECT_NE(dot.find("  1 [label=\"1\"];"), std::string::npos);
  EXPECT_NE(dot.find("0 -> 1 [loop=false, dd=true, length=0.8"), std::string::npos);
  EXPECT_NE(dot.find("label=\"aB\""), std::string::npos);
  EXPECT_LT(g.edges[0].length, 2 * 0.5);
  EXPECT_EQ(parse_graph(json::parse(graph_to_json(g).dump())), g);
}

TEST(GraphExport, ParseRejectsBadEndpoints) {
  GraphExport g;
  g.vertices = 1;
  g.edges.push_back({0, 0, true, false, 0.3, 1, 1, {}});
  auto j = graph_to_json(g);
  j["edges"][0]["v"] = 4;
  EXPECT_THROW(parse_graph(j), InputError);
  j = graph_to_json(g);
  j["edges"][0].erase("dd");
  EXPECT_THROW(parse_graph(j), InputError);
}
