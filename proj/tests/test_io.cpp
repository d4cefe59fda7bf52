#include <doctest.h>

#include "cmcspec/io.hpp"

using namespace cmcspec;
using nlohmann::json;

TEST_CASE("curve spec parsing") {
  const SpecFile f = parse_curve_spec(json::parse(R"({"genus": 2, "eta": [[0.4, 0], [0, 0.3]], "tol": 1e-8})"));
  CHECK(f.spec.genus == 2);
  CHECK(f.spec.eta[1] == cplx(0, 0.3));
  CHECK(*f.tol == 1e-8);
  const SpecFile o = parse_curve_spec(json::parse(R"({"genus": 0, "tol": {"quad_nodes": 128, "quad_tol": 1e-12}})"));
  CHECK(*o.quad_nodes == 128);
  CHECK_FALSE(o.tol.has_value());
  CHECK_THROWS_WITH_AS(parse_curve_spec(json::parse(R"({"eta": []})")), doctest::Contains("genus"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_curve_spec(json::parse(R"({"genus": 1, "eta": [[0.5]]})")), doctest::Contains("eta[0]"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_curve_spec(json::parse(R"({"genus": 2, "eta": [[0.5, 0]]})")), doctest::Contains("eta"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(parse_curve_spec(json::parse(R"({"genus": 1, "eta": [["a", 0]]})")),
                       doctest::Contains("eta[0]"), ValidationError);
  const json round = curve_spec_json(f.spec);
  CHECK(parse_curve_spec(round).spec.eta == f.spec.eta);
}

TEST_CASE("plane parsing") {
  const GrPlane p = parse_plane(json::parse(R"({"genus": 2, "M": [[1, 2], [3, 4]]})"));
  CHECK(p.M(1, 0) == 3.0);
  CHECK(parse_plane(plane_json(p)).M == p.M);
  CHECK_THROWS_AS(parse_plane(json::parse(R"({"genus": 2, "M": [[1, 2]]})")), ValidationError);
}

TEST_CASE("Q parsing") {
  const CPoly q = parse_q("0.3:0.2,0.7,0.3:-0.2");
  CHECK(q[0] == cplx(0.3, 0.2));
  CHECK(q[1] == cplx(0.7, 0));
  CHECK(parse_q("1+2j,0,1-2j")[0] == cplx(1, 2));
  CHECK(parse_q("1e-3-2e-1j,0,0")[0] == cplx(1e-3, -0.2));
  CHECK_THROWS_AS(parse_q("1,2"), ValidationError);
  CHECK_THROWS_AS(parse_q("a,b,c"), ValidationError);
}

TEST_CASE("scan sampling is seeded, in the annulus and separated") {
  const auto a = scan_specs(3, 50, 9), b = scan_specs(3, 50, 9), c = scan_specs(3, 50, 10);
  CHECK(a.size() == 50);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].eta == b[k].eta);
    differs = differs || a[k].eta != c[k].eta;
    for (std::size_t i = 0; i < a[k].eta.size(); ++i) {
      CHECK(std::abs(a[k].eta[i]) >= 0.05);
      CHECK(std::abs(a[k].eta[i]) <= 0.95);
      for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(a[k].eta[i] - a[k].eta[j]) >= 0.02);
    }
  }
  CHECK(differs);
}

TEST_CASE("scan output is independent of the worker count") {
  const auto specs = scan_specs(2, 24, 3);
  const std::string one = scan_csv(2, run_scan(specs, 1, {}, kDefaultTol));
  const std::string four = scan_csv(2, run_scan(specs, 4, {}, kDefaultTol));
  CHECK(one == four);
  CHECK(one.rfind("# cmcspec scan csv v1 genus=2\n", 0) == 0);
  CHECK(one.find("# summary") != std::string::npos);
}

TEST_CASE("scan flags invalid curves without failing") {
  const auto rows = run_scan({{1, {0.5}}, {1, {1.5}}}, 2, {}, kDefaultTol);
  CHECK(rows[0].status == "ok");
  CHECK(rows[1].status == "validation");
  CHECK(scan_json(1, rows)["summary"]["flagged"] == 1);
}

TEST_CASE("report json carries the schema version") {
  const SpectralCurve c = build_curve({1, {0.5}});
  const json j = report_json(classify(solve_Ba(c)), c.spec);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["stratum"] == "V_0");
  CHECK(period_records({cplx(1, 2)}, "B")[0]["cycle"] == "B1");
}
