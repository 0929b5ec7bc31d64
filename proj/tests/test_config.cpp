#include <doctest.h>

#include "halfspace/config.hpp"

using namespace halfspace;

TEST_CASE("every preset builds and round-trips through keys and JSON") {
  for (const char* name : {"monatomic", "mixture", "mixture3", "polyatomic-discrete",
                           "polyatomic-continuous", "polyatomic-mixture", "fermion", "boson"}) {
    RunConfig c = preset_config(name);
    c.u = 0.25;
    c.u_range = std::array<double, 3>{-1.0, 1.0, 11.0};
    c.sources = {{1.5, 0.5}, {2.0, -1.0}};
    const std::string norm = normalized(c);
    CHECK(normalized(config_from_keys(to_keys(c))) == norm);
    CHECK(normalized(config_from_keys(read_json(norm))) == norm);
  }
  CHECK_THROWS_AS(preset_config("plasma"), Error);
}

TEST_CASE("ini sections map onto the run config") {
  const std::string ini =
      "[model]\npreset = mixture\ndimension = 2\n"
      "[grid]\nnodes = 4\n"
      "[boundary]\ntype = accommodate\ncoefficient = 0.3\n"
      "[penalty]\neps1 = 0.25\n"
      "[run]\nu = 0.4\nu_range = -2:2:9\nextra_conditions = true\nsources = 1.5:2\n"
      "[output]\nformat = csv\n";
  const RunConfig c = config_from_keys(read_ini(ini));
  CHECK(c.model.family == Family::monatomic_mixture);
  CHECK(c.model.dimension == 2);
  CHECK(c.grid.dimension == 2);
  CHECK(c.grid.nodes == 4);
  CHECK(c.accommodation == 0.3);
  CHECK(c.penalty.eps1 == 0.25);
  CHECK(*c.u == 0.4);
  CHECK((*c.u_range)[2] == 9.0);
  CHECK(c.extra_conditions);
  REQUIRE(c.sources.size() == 1);
  CHECK(c.sources[0] == SourceConfig{1.5, 2.0});
  CHECK(c.format == "csv");
  CHECK(normalized(config_from_keys(to_keys(c))) == normalized(c));
}

TEST_CASE("unknown keys and malformed values are usage errors") {
  try {
    config_from_keys(read_ini("[model]\ncolour = blue\n"));
    FAIL("accepted an unknown key");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
    CHECK(std::string(e.what()).find("model.colour") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_keys(read_ini("[grid]\nnodes = six\n")), Error);
  CHECK_THROWS_AS(config_from_keys(read_ini("[output]\nformat = xml\n")), Error);
  CHECK_THROWS_AS(read_json("[1, 2]"), Error);
  CHECK_THROWS_AS(read_ini("stray = 1\n"), Error);
}

TEST_CASE("u ranges") {
  const auto r = parse_range("-2:2.5:41");
  CHECK(r[0] == -2.0);
  CHECK(r[1] == 2.5);
  CHECK(r[2] == 41.0);
  CHECK_THROWS_AS(parse_range("1:2"), Error);
  CHECK_THROWS_AS(parse_range("a:b:c"), Error);
}
