#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace tegeo;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int error_line(const std::string& text) {
  try {
    build_model(parse_config(text));
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kMinimal =
    "[chart]\n"
    "dim = 4\n"
    "[metric]\n"
    "g_0_0 = \"-1\"\n"
    "g_1_1 = \"1\"\n"
    "g_2_2 = \"1\"\n"
    "g_3_3 = \"1\"\n";

}  // namespace

TEST(Config, GalleryRoundTripIsByteIdentical) {
  for (const auto& name : gallery_names()) {
    const std::string text = gallery_text(name);
    EXPECT_EQ(emit_config(parse_config(text)), text) << name;
  }
}

TEST(Config, ShippedGalleryFilesMatchTheEmitter) {
  for (const auto& name : gallery_names()) {
    EXPECT_EQ(read_file(std::string(TEGEO_SOURCE_DIR) + "/gallery/" + name + ".cfg"), gallery_text(name)) << name;
  }
}

TEST(Config, MinimalFileUsesDefaults) {
  const ModelConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.dim, 4);
  EXPECT_EQ(c.connection_kind, "levi-civita");
  EXPECT_EQ(c.sampling.points, 30);
  EXPECT_EQ(c.sampling.seed, 42u);
  EXPECT_EQ(c.tolerances.residual, 1e-8);
  const Model m = build_model(c);
  EXPECT_EQ(verify(m, c.sampling, c.tolerances).exit_code(), 0);
  // Canonical form is a fixed point after one emission.
  const std::string once = emit_config(c);
  EXPECT_EQ(emit_config(parse_config(once)), once);
}

TEST(Config, CommentsOrderAndWhitespaceDoNotMatter) {
  const std::string shuffled =
      "# leading comment\n"
      "[metric]\n"
      "  g_3_3 = \"1\"   \n"
      "g_1_1 = \"1\"\n"
      "g_0_0 = \"-1\"\n"
      "g_2_2 = \"1\"\n"
      "\n"
      "[chart]\n"
      "dim=4\n";
  EXPECT_EQ(emit_config(parse_config(shuffled)), emit_config(parse_config(kMinimal)));
}

TEST(Config, ErrorsCarryTheirLine) {
  EXPECT_EQ(error_line("[chart]\ndim = 4\n[bogus]\n"), 3);
  EXPECT_EQ(error_line("[chart]\ndim = 4\ncolour = 3\n"), 3);
  EXPECT_EQ(error_line("[chart]\ndim = 4\ndim = 5\n"), 3);
  EXPECT_EQ(error_line("[chart]\ndim = 4\n[chart]\n"), 3);
  EXPECT_EQ(error_line("dim = 4\n"), 1);
  EXPECT_EQ(error_line("[chart]\ndim = four\n"), 2);
  EXPECT_EQ(error_line("[chart]\ndim = 2\n"), 2);
  EXPECT_EQ(error_line("[metric]\ng_0_0 = \"1\"\n"), 0);
  EXPECT_EQ(error_line(std::string(kMinimal) + "g_1_0 = \"0\"\n"), 8);
  EXPECT_EQ(error_line(std::string(kMinimal) + "g_0_1 = \"x1 + * x2\"\n"), 8);
  EXPECT_EQ(error_line(std::string(kMinimal) + "g_0_1 = \"v1\"\n"), 8);
  EXPECT_EQ(error_line(std::string(kMinimal) + "g_0_9 = \"1\"\n"), 8);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[connection]\nkind = affine\n"), 9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[connection]\nkind = linear\nK_0_1 = \"1\"\n"), 10);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[connection]\nkind = linear\nK_0_1_2 = \"v0\"\n"), 10);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[connection]\nK_0_1_2 = \"1\"\n"), 9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[sampling]\npoints = 0\n"), 9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[sampling]\nx_0 = 1\n"), 9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[sampling]\nx_0 = -1, 1\n"), 9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[tolerances]\nresidual = -1\n"), 9);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[chart]\n"), 8);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[connection]\nkind = general\nK_0_1 = \"v0*v1 + z\"\n"), 10);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[connection]\nkind = general\nK_0_1 = \"v0*v1\"\n"), -1);
}

TEST(Config, DegenerateMetricIsRejected) {
  const std::string text = "[chart]\ndim = 3\n[metric]\ng_0_0 = \"1\"\ng_1_1 = \"1\"\n";
  const Model m = build_model(parse_config(text));
  const Report r = verify(m, {}, {});
  EXPECT_EQ(r.points_evaluated, 0);
  EXPECT_FALSE(r.valid);
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Report, HashIsTheGitBlobId) {
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Report, JsonFollowsTheSchema) {
  const ModelConfig c = gallery_config("schwarzschild");
  const std::string text = gallery_text("schwarzschild");
  const Report r = verify(build_model(c), c.sampling, c.tolerances);
  const auto j = nlohmann::json::parse(report_machine(r, git_blob_sha1(text)));
  EXPECT_EQ(j["schema"], "tegeo-report/1");
  EXPECT_EQ(j["config_sha1"], git_blob_sha1(text));
  EXPECT_EQ(j["metadata"]["dim"], 4);
  EXPECT_EQ(j["metadata"]["connection_kind"], "levi-civita");
  EXPECT_EQ(j["metadata"]["points_requested"], 30);
  EXPECT_EQ(j["outcome"], "pass");
  EXPECT_EQ(j["exit_code"], 0);
  std::vector<std::string> names;
  for (const auto& s : j["sections"]) names.push_back(s["name"]);
  EXPECT_EQ(names, (std::vector<std::string>{"symplectic", "poisson", "conditions", "linear-equivalence",
                                             "torsion-free-equivalence", "fd-oracle"}));
  for (const auto& s : j["sections"]) {
    for (const auto& chk : s["checks"]) {
      EXPECT_TRUE(chk["comparison"] == "below" || chk["comparison"] == "above");
      // Only the aggregate fraction check has no single worst point.
      EXPECT_EQ(chk["worst_point"].is_object(), chk["name"] != "fd-fraction-within") << chk["name"];
    }
  }
  const std::vector<std::string> keys{"schema", "config_sha1", "metadata", "sections",
                                      "verdicts", "skipped", "notes", "outcome", "exit_code"};
  std::vector<std::string> got;
  for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
  std::sort(got.begin(), got.end());
  auto sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(got, sorted);
  const std::string dump = report_machine(r, "x");
  EXPECT_EQ(dump.find("\"schema\""), dump.find('"'));
}

TEST(Report, TextNamesEverySectionAndTheOutcome) {
  const ModelConfig c = gallery_config("nonmetric-linear");
  const std::string t = report_text(verify(build_model(c), c.sampling, c.tolerances), "abc");
  for (const char* s : {"[symplectic] FAIL", "[poisson] FAIL", "[conditions] FAIL", "[linear-equivalence] FAIL",
                        "[fd-oracle] PASS", "verdict symplectic-poisson: consistent", "outcome: fail"}) {
    EXPECT_NE(t.find(s), std::string::npos) << s;
  }
}

TEST(Evaluate, ObjectsAndErrors) {
  const Model m = support::model_of("minkowski-zero-K");
  const TangentPoint p{{0, 0, 0, 0}, {1, 0, 0, 0}};
  EXPECT_EQ(std::get<double>(evaluate_object(m, "contraction", p).value), -4.0);
  for (const auto& name : object_names()) EXPECT_NO_THROW(evaluate_object(m, name, p)) << name;
  EXPECT_THROW(evaluate_object(m, "ricci", p), UnknownObjectError);
  const Model s = support::model_of("schwarzschild");
  EXPECT_THROW(evaluate_object(s, "upsilon", {{0, 1, 1, 0}, {0, 0, 0, 0}}), FieldError);
  EXPECT_THROW(evaluate_object(support::model_of("nonlinear-general"), "nabla-g", p), FieldError);
  const std::string text = format_object_text(evaluate_object(m, "upsilon", p));
  EXPECT_NE(text.find("unit_power = 2"), std::string::npos);
  EXPECT_NE(text.find("(x0, v0) = 1"), std::string::npos);
  const auto j = object_json(evaluate_object(m, "lambda", p));
  EXPECT_EQ(j["kind"], "multivector");
  EXPECT_EQ(j["unit_power"], -2);
}
