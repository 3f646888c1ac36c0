#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "helpers.hpp"
#include "rvelab/io.hpp"
#include "rvelab/packing.hpp"

using namespace rvelab;
using namespace rvelab::test;

TEST_SUITE("io") {

TEST_CASE("configurations round-trip bit for bit") {
  const auto dir = scratch_dir("io");
  PackingParams p;
  p.seed = 3;
  auto [spheres, rs] = mcm_pack(Cell{3, 2.0, true}, ShapeKind::Sphere, 8, p);
  REQUIRE(rs.success);
  save_configuration(spheres, dir / "spheres.json");
  const auto back = load_configuration(dir / "spheres.json");
  CHECK(back.centers == spheres.centers);
  CHECK(back.species.radius == spheres.species.radius);
  CHECK(back.cell.edge == spheres.cell.edge);
  CHECK(back.cell.periodic);
  CHECK(back.non_overlapping);
  CHECK(back.meta.isolation_factor == 1.2);

  Configuration fibers = random_configuration(ShapeKind::Spherocylinder, 5, 1.0, 0.025, 4, 1.0);
  fibers.cell.periodic = false;
  const auto j = configuration_to_json(fibers);
  CHECK(j.at("length").get<double>() == 1.0);
  const auto fb = configuration_from_json(Json::parse(j.dump()));
  CHECK(fb.axes == fibers.axes);
  CHECK(fb.centers == fibers.centers);
  CHECK_FALSE(fb.cell.periodic);
  CHECK_FALSE(fb.species.caps_included);
}

TEST_CASE("malformed configurations are rejected") {
  CHECK_THROWS(configuration_from_json(Json::parse(R"({"dim": 3})")));
  CHECK_THROWS(configuration_from_json(
      Json::parse(R"({"dim": 3, "edge": 1, "shape": "sphere", "radius": 0.1, "centers": [[0.5, 0.5]]})")));
  CHECK_THROWS(configuration_from_json(
      Json::parse(R"({"dim": 2, "edge": 1, "shape": "sphere", "radius": 0.1, "centers": [[0.5, 0.5]]})")));
  CHECK_THROWS(load_configuration("/nonexistent/config.json"));
}

TEST_CASE("doubles are written with 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, 0.345228, 1e-300, -2.5e17, 0.30000000000000004}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()).empty());
}

TEST_CASE("CSV fields round-trip") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "", "line\nbreak"};
  const std::string line = csv_join(fields);
  CHECK(csv_split(line) == fields);
  CHECK(csv_escape("abc") == "abc");
  CHECK(csv_escape("a,b") == "\"a,b\"");
}

TEST_CASE("CSV tables") {
  const auto dir = scratch_dir("csv");
  {
    std::ofstream out(dir / "t.csv");
    out << "a,b\n1,2\n3,\"x,y\"\n";
  }
  const auto t = read_csv(dir / "t.csv");
  CHECK(t.column("b") == 1);
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][1] == "x,y");
  CHECK_THROWS(t.column("c"));
  {
    std::ofstream out(dir / "bad.csv");
    out << "a,b\n1,2,3\n";
  }
  CHECK_THROWS(read_csv(dir / "bad.csv"));
}

}  // TEST_SUITE
