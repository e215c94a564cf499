#include "fcalc/xlab/xlab.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace fcalc;
using namespace fcalc::xlab;

TEST_CASE("config keys are split into fixed fields and params") {
  const ExperimentConfig c = config_from_json(
      json::parse(R"({"experiment":"apply","seed":7,"tol":1e-6,"method":"taylor","tolerances":{"x":0.5}})"));
  CHECK(c.experiment == "apply");
  CHECK(c.seed == 7);
  CHECK(*c.tol == 1e-6);
  CHECK(c.get<std::string>("method", "") == "taylor");
  CHECK(c.get<int>("missing", 3) == 3);
  CHECK(c.tolerance("x", 1.0) == 0.5);
  CHECK(c.tolerance("y", 1.0) == 1.0);
  CHECK(c.options().extension.method == ahx::Method::taylor);
  CHECK(c.resolved()["seed"] == 7);
  CHECK_THROWS_AS(config_from_json(json::array()), DomainError);
}

TEST_CASE("checks: NaN fails, reports sort by name") {
  Report r;
  r.experiment = "t";
  add_check(r, "b", 1e-3, 1e-2);
  add_check(r, "a", std::numeric_limits<double>::quiet_NaN(), 1.0);
  add_check(r, "a2", 2.0, 1.0);
  CHECK(r.find("b")->pass);
  CHECK_FALSE(r.find("a")->pass);
  CHECK_FALSE(r.all_pass());
  CHECK(r.with_prefix("a").size() == 2);
  const json j = r.to_json();
  CHECK(j["checks"][0]["name"] == "a");
  CHECK(j["checks"][2]["name"] == "b");
  CHECK(j["failed"] == 2);
  CHECK(j["format_version"] == kFormatVersion);
}

TEST_CASE("csv layout") {
  std::ostringstream os;
  write_csv(os, Table{"t", {"x", "y"}, {{1.0, 0.5}, {2.0, 0.25}}});
  CHECK(os.str() == "x,y\n1,0.5\n2,0.25\n");
}

TEST_CASE("unknown verbs throw, every verb is listed") {
  CHECK_THROWS_AS(run("nope", ExperimentConfig{}), DomainError);
  CHECK(verbs().size() == 9);
}

TEST_CASE("a cheap experiment runs end to end and writes its report") {
  ExperimentConfig c;
  c.out_dir = (std::filesystem::temp_directory_path() / "fcalc_test_xlab").string();
  const Report r = run("recover", c);
  CHECK(r.all_pass());
  CHECK(r.find("exact") != nullptr);
  std::ifstream is(std::filesystem::path(c.out_dir) / "recover.json");
  REQUIRE(is);
  const json j = json::parse(is);
  CHECK(j["experiment"] == "recover");
  CHECK(j["pass"] == true);
}

TEST_CASE("example pair and unit bump") {
  const auto [a, ae] = example_pair(0.1);
  CHECK(std::abs(a(0, 0) - 1.0) == 0.0);
  CHECK(std::abs(ae.trace() - 1.0) <= 1e-15);
  CHECK(norm2(ae * ae - ae) <= 1e-15);
  CHECK(std::abs(unit_bump(0.3, 0.5)(0.3) - 1.0) <= 1e-15);
  CHECK(unit_bump(0.3, 0.5)(0.9) == 0.0);
}
