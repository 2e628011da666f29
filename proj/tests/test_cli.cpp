#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"

using namespace gss;
using namespace gss::cli;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gss_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

RunConfig config_for(json doc, const std::filesystem::path& dir) {
  doc["output"]["directory"] = dir.string();
  return load_config(doc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

int run(const std::string& command, const RunConfig& c, CommandOptions o = {}) {
  std::ostringstream log;
  return run_command(command, c, o, log);
}

ErrorKind config_error(const json& doc) {
  try {
    load_config(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a config error");
  return ErrorKind::syntax;
}

const json kEllipsoid = {{"surface", {{"family", "ellipsoid"}, {"semiaxes", {2, 1, 1}}}}};

}  // namespace

TEST_CASE("config: defaults are resolved and embedded") {
  const RunConfig c = load_config(kEllipsoid);
  CHECK(c.surface.dimension == 3);
  CHECK(c.integrator.base_step == doctest::Approx(2 * std::numbers::pi * 1e-3));
  CHECK(c.resolved["integrator"]["max_steps"] == 10000000);
  CHECK(c.resolved["audit"]["strip_halfwidth"].is_null());
  CHECK(c.resolved["surface"]["semiaxes"] == json({2, 1, 1}));
  CHECK(c.output.has("csv"));
}

TEST_CASE("config: strict schema") {
  json doc = kEllipsoid;
  doc["extra"] = 1;
  CHECK(config_error(doc) == ErrorKind::config);
  doc = kEllipsoid;
  doc["integrator"] = {{"base_stp", 0.1}};
  CHECK(config_error(doc) == ErrorKind::config);
  doc = kEllipsoid;
  doc["integrator"] = {{"base_step", -0.1}};
  CHECK(config_error(doc) == ErrorKind::config);
  doc = kEllipsoid;
  doc["integrator"] = {{"max_angle_per_step", 2.0}};
  CHECK(config_error(doc) == ErrorKind::config);
  doc = kEllipsoid;
  doc["sweep"] = {{"starts", "ten"}};
  CHECK(config_error(doc) == ErrorKind::config);
  doc = kEllipsoid;
  doc["sweep"] = {{"starts", 0}};
  CHECK(config_error(doc) == ErrorKind::config);
  CHECK(config_error({{"surface", {{"family", "torus"}}}}) == ErrorKind::config);
  CHECK(config_error({{"surface", {{"expression", "x0^2 - 1"}}}}) == ErrorKind::config);
  CHECK(config_error({{"surface", {{"family", "sphere"}, {"semiaxes", {1, 1, 1}}}}}) == ErrorKind::config);
  CHECK(config_error({{"surface", {{"family", "ellipsoid"}, {"semiaxes", {2, 1, 1}}, {"dimension", 4}}}}) ==
        ErrorKind::config);
  doc = kEllipsoid;
  doc["output"] = {{"formats", {"xml"}}};
  CHECK(config_error(doc) == ErrorKind::config);
  doc = kEllipsoid;
  doc["flow"] = {{"x", {0, 1, 0}}};
  CHECK(config_error(doc) == ErrorKind::config);
}

TEST_CASE("config: malformed JSON reports its location") {
  try {
    parse_json_text("{\n  \"surface\": {,}\n}", "bad.json");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("bad.json:2:") != std::string::npos);
  }
}

TEST_CASE("config: dotted-path overrides") {
  json doc = kEllipsoid;
  apply_override(doc, "integrator.base_step=1e-4");
  apply_override(doc, "surface.semiaxes=[0.5,1,1]");
  apply_override(doc, "output.directory=results/run1");
  apply_override(doc, "sweep.seed=42");
  const RunConfig c = load_config(doc);
  CHECK(c.integrator.base_step == 1e-4);
  CHECK(c.surface.semiaxes == std::vector<double>{0.5, 1, 1});
  CHECK(c.output.directory == "results/run1");
  CHECK(c.sweep.seed == 42);
  CHECK_THROWS_AS(apply_override(doc, "novalue"), Error);
  CHECK_THROWS_AS(apply_override(doc, "surface..family=sphere"), Error);
  CHECK_THROWS_AS(apply_override(doc, "sweep.seed.x=1"), Error);
}

TEST_CASE("exit codes by error kind") {
  CHECK(exit_code_for(ErrorKind::syntax) == 1);
  CHECK(exit_code_for(ErrorKind::config) == 1);
  CHECK(exit_code_for(ErrorKind::unsupported_surface) == 1);
  CHECK(exit_code_for(ErrorKind::indefinite) == 2);
  CHECK(exit_code_for(ErrorKind::max_steps_exceeded) == 3);
  CHECK(exit_code_for(ErrorKind::projection_diverged) == 3);
}

TEST_CASE("audit command") {
  SUBCASE("ellipsoid passes with ε > 0") {
    const auto dir = scratch("audit_ok");
    CHECK(run("audit", config_for(kEllipsoid, dir)) == 0);
    const json doc = read_json(dir / "audit.json");
    CHECK(doc["format_version"] == kFormatVersion);
    CHECK(doc["config"]["surface"]["family"] == "ellipsoid");
    CHECK(doc["report"]["passed"] == true);
    CHECK(doc["report"]["epsilon_estimate"].get<double>() > 0.0);
    CHECK(slurp(dir / "audit.csv").rfind("# format_version=1\n", 0) == 0);
  }
  SUBCASE("cubic fails with a symmetry witness") {
    const auto dir = scratch("audit_cubic");
    const json doc = {{"surface", {{"expression", "x0^3 + x1^2 + x2^2 - 1"}, {"dimension", 3}}}};
    CHECK(run("audit", config_for(doc, dir)) == 2);
    const json r = read_json(dir / "audit.json");
    CHECK(r["report"]["symmetry"]["ok"] == false);
    CHECK(r["report"]["symmetry"]["witness"].size() == 3);
  }
  SUBCASE("indefinite quartic fails with an eigenpair witness") {
    const auto dir = scratch("audit_torus");
    const json doc = {{"surface", {{"expression", "((x0^2+x1^2+x2^2)+3)^2 - 16*(x1^2+x2^2)"}, {"dimension", 3}}}};
    CHECK(run("audit", config_for(doc, dir)) == 2);
    const json r = read_json(dir / "audit.json");
    CHECK(r["report"]["definiteness"]["kind"] == "indefinite");
    CHECK(r["report"]["definiteness"]["witness"]["eigenvector"].size() == 3);
    CHECK(r["report"]["epsilon_estimate"] == 0.0);
  }
  SUBCASE("negated sphere is normalised") {
    const auto dir = scratch("audit_neg");
    const json doc = {{"surface", {{"expression", "1 - x0^2 - x1^2 - x2^2"}, {"dimension", 3}}}};
    CHECK(run("audit", config_for(doc, dir)) == 0);
    CHECK(read_json(dir / "audit.json")["sign_normalized"] == true);
  }
}

TEST_CASE("section command") {
  SUBCASE("sphere: every row returns to its start") {
    const auto dir = scratch("section_sphere");
    json doc = {{"surface", {{"family", "sphere"}}}, {"sweep", {{"starts", 10}, {"seed", 3}}}};
    CHECK(run("section", config_for(doc, dir)) == 0);
    const json r = read_json(dir / "section.json");
    REQUIRE(r["rows"].size() == 10);
    for (const json& row : r["rows"]) {
      CHECK(std::abs(row["tau"].get<double>() - 2 * std::numbers::pi) < 1e-8);
      for (const char* k : {"x", "y"})
        for (int i = 0; i < 3; ++i)
          CHECK(std::abs(row["end"][k][i].get<double>() - row["start"][k][i].get<double>()) < 1e-8);
    }
  }
  SUBCASE("fixed seed gives bit-identical CSV across runs and thread counts") {
    json doc = kEllipsoid;
    doc["sweep"] = {{"starts", 8}, {"seed", 11}, {"threads", 4}};
    const auto dir = scratch("section_det");
    CHECK(run("section", config_for(doc, dir)) == 0);
    const std::string csv = slurp(dir / "section.csv"), js = slurp(dir / "section.json");
    CHECK(run("section", config_for(doc, dir)) == 0);
    CHECK(slurp(dir / "section.csv") == csv);
    CHECK(slurp(dir / "section.json") == js);
    doc["sweep"]["threads"] = 1;
    CHECK(run("section", config_for(doc, dir)) == 0);
    auto rows = [](const std::string& text) { return text.substr(text.find("\nrow,")); };
    CHECK(rows(slurp(dir / "section.csv")) == rows(csv));
  }
  SUBCASE("audit failure blocks the sweep unless forced") {
    const auto dir = scratch("section_blocked");
    const json doc = {{"surface", {{"expression", "x0^3 + x1^2 + x2^2 - 1"}, {"dimension", 3}}},
                      {"sweep", {{"starts", 2}}}};
    CHECK(run("section", config_for(doc, dir)) == 2);
    CHECK_FALSE(std::filesystem::exists(dir / "section.csv"));
  }
  SUBCASE("per-row numerical failures are reported and set exit 3") {
    const auto dir = scratch("section_maxsteps");
    json doc = kEllipsoid;
    doc["sweep"] = {{"starts", 3}};
    doc["integrator"] = {{"max_steps", 5}};
    CHECK(run("section", config_for(doc, dir)) == 3);
    const json r = read_json(dir / "section.json");
    CHECK(r["rows"][0]["error"].get<std::string>().find("MaxStepsExceeded") != std::string::npos);
  }
}

TEST_CASE("compare command") {
  SUBCASE("ellipsoid(2,1,1): 20 starts within 1e-6") {
    const auto dir = scratch("compare_ell");
    json doc = kEllipsoid;
    doc["sweep"] = {{"starts", 20}};
    CHECK(run("compare", config_for(doc, dir)) == 0);
    const json r = read_json(dir / "compare.json");
    CHECK(r["summary"]["max_abs_diff"].get<double>() < 1e-6);
    CHECK(r["g_table"].size() == 9);
    for (const json& g : r["g_table"]) CHECK(g["abs_diff"].get<double>() < 1e-8);
  }
  SUBCASE("a0 = 1: both maps are the identity") {
    const auto dir = scratch("compare_unit");
    const json doc = {{"surface", {{"family", "ellipsoid"}, {"semiaxes", {1, 1, 1}}}}, {"sweep", {{"starts", 5}}}};
    CHECK(run("compare", config_for(doc, dir)) == 0);
    for (const json& row : read_json(dir / "compare.json")["rows"]) {
      CHECK(row["G"].get<double>() == doctest::Approx(2 * std::numbers::pi));
      for (const char* k : {"x", "y"})
        for (int i = 0; i < 3; ++i) {
          const double s = row["closed_form"][k][i].get<double>(), e = row["numeric"][k][i].get<double>();
          CHECK(std::abs(s - e) < 1e-8);
        }
    }
  }
  SUBCASE("thin revolution surfaces approach the billiard map as c shrinks") {
    double previous = 1e300;
    for (double c : {0.2, 0.1, 0.05}) {
      const auto dir = scratch("compare_rev");
      const std::string profile = std::to_string(c) + "*sin(phi)";
      // Crossing the rim takes time of order c, so the step scales with c.
      const json doc = {{"surface", {{"family", "revolution"}, {"profile", profile}}},
                        {"integrator", {{"base_step", 5e-3 * c}}},
                        {"sweep", {{"starts", 6}, {"seed", 9}}},
                        {"compare", {{"t_values", {0.3, 0.6, 0.9}}}}};
      CHECK(run("compare", config_for(doc, dir)) == 0);
      const double d = read_json(dir / "compare.json")["summary"]["max_billiard_diff"].get<double>();
      CAPTURE(c);
      CHECK(d < previous);
      previous = d;
    }
    CHECK(previous < 0.05);
  }
  SUBCASE("generic expressions are unsupported") {
    const json doc = {{"surface", {{"expression", "x0^2/4 + x1^2 + x2^2 - 1"}, {"dimension", 3}}}};
    try {
      run("compare", config_for(doc, scratch("compare_expr")));
      FAIL("expected UnsupportedSurface");
    } catch (const Error& e) {
      CHECK(exit_code_for(e.kind()) == 1);
    }
  }
}

TEST_CASE("flow and epsilon commands") {
  const auto dir = scratch("flow");
  json doc = {{"surface", {{"family", "sphere"}}},
              {"flow", {{"t_end", std::numbers::pi / 2}, {"x", {1, 0, 0}}, {"y", {0, 1, 0}}}}};
  CHECK(run("flow", config_for(doc, dir)) == 0);
  const json r = read_json(dir / "flow.json");
  CHECK(std::abs(r["end"]["x"][1].get<double>() - 1.0) < 1e-8);
  const std::string csv = slurp(dir / "flow.csv");
  CHECK(csv.find("\nt,x0,x1,x2,y0,y1,y2,abs_f,abs_y_dot_grad,norm_y_minus_1,unwrapped_angle\n") != std::string::npos);

  CHECK(run("epsilon", config_for(doc, dir)) == 0);
  CHECK(read_json(dir / "epsilon.json")["epsilon"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));

  doc["output"] = {{"formats", {"json"}}};
  const auto only_json = scratch("flow_json");
  CHECK(run("epsilon", config_for(doc, only_json)) == 0);
  CHECK(std::filesystem::exists(only_json / "epsilon.json"));
  CHECK_FALSE(std::filesystem::exists(only_json / "epsilon.csv"));
}
