#include <doctest.h>

#include "cmcspec/curve.hpp"
#include "generators.hpp"

using namespace cmcspec;

TEST_CASE("genus zero curve is y^2 = lambda") {
  const SpectralCurve c = build_curve({0, {}});
  CHECK(c.a.degree() == 0);
  CHECK(std::abs(c.a[0] - 1.0) < 1e-15);
  CHECK(c.branch_points.size() == 1);
  CHECK(std::abs(c.y2(cplx(0.3, 0.2)) - cplx(0.3, 0.2)) < 1e-15);
}

TEST_CASE("random curves satisfy the admissibility conditions") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int g = 1 + trial % 4;
    const auto eta = gen::eta(rng, g);
    const SpectralCurve c = build_curve({g, eta});
    CHECK(c.a.degree() == 2 * g);
    CHECK(std::abs(std::abs(c.lead()) - 1.0) < 1e-12);
    CHECK(reality_check(c.a, 1e-12).is_real);
    for (cplx e : eta) {
      CHECK(std::abs(c.a(e)) < 1e-12);
      CHECK(std::abs(c.a(1.0 / std::conj(e))) < 1e-10 * std::abs(c.a.lead()) * std::pow(1.0 / std::abs(e), 2 * g));
    }
    double minval = 1e300;
    for (int k = 0; k < 2000; ++k) {
      const cplx l = std::polar(1.0, 2.0 * M_PI * k / 2000.0);
      const cplx v = std::pow(l, -static_cast<double>(g)) * c.a(l);
      CHECK(std::abs(v.imag()) < 1e-10);
      minval = std::min(minval, v.real());
    }
    CHECK(minval > 0.0);
    CHECK(c.cuts.size() == static_cast<std::size_t>(g + 1));
  }
}

TEST_CASE("invalid root data is rejected") {
  CHECK_THROWS_AS(build_curve({1, {0.0}}), ValidationError);
  CHECK_THROWS_AS(build_curve({1, {1.0}}), ValidationError);
  CHECK_THROWS_AS(build_curve({1, {cplx(0.0, 1.2)}}), ValidationError);
  CHECK_THROWS_AS(build_curve({2, {0.5, 0.5}}), ValidationError);
  CHECK_THROWS_AS(build_curve({2, {0.5}}), ValidationError);
  // same ray: the second cut would pass through the first root pair
  CHECK_THROWS_AS(build_curve({2, {0.3, 0.6}}), ValidationError);
}

TEST_CASE("root tracker follows the square root around the origin") {
  RootTracker tr([](double t) { return std::polar(1.0, 2.0 * M_PI * t); }, 0.0, 1.0);
  const cplx half = tr.advance(0.5);
  CHECK(std::abs(half - cplx(0.0, 1.0)) < 1e-12);
  CHECK(std::abs(tr.advance(1.0) + 1.0) < 1e-12);
}

TEST_CASE("lifted cycles are closed on the curve") {
  gen::Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const int g = 1 + trial % 3;
    const SpectralCurve c = build_curve({g, gen::eta(rng, g)});
    const HomologyBasis hb = homology_cycles(c);
    REQUIRE(hb.A.size() == static_cast<std::size_t>(g));
    for (const auto* cycles : {&hb.A, &hb.B})
      for (const Cycle& cy : *cycles) {
        const SheetPath p = trace_cycle(c, cy, 64);
        REQUIRE(p.points.size() >= 2);
        for (std::size_t k = 0; k < p.points.size(); ++k)
          CHECK(std::abs(p.y_values[k] * p.y_values[k] - c.y2(p.points[k])) <
                1e-9 * std::max(1.0, std::abs(c.y2(p.points[k]))));
        CHECK(std::abs(p.points.front() - p.points.back()) < 1e-12);
        // A loops close on one sheet; B passes through the branch point η and returns on the other sheet.
        const cplx expected = cy.kind == CycleKind::A ? p.y_values.front() : -p.y_values.front();
        CHECK(std::abs(p.y_values.back() - expected) < 1e-8 * std::max(1.0, std::abs(p.y_values.front())));
      }
  }
}

TEST_CASE("y along a polyline is continuous") {
  const SpectralCurve c = build_curve({1, {0.5}});
  std::vector<cplx> line;
  for (int k = 0; k <= 100; ++k) line.push_back(std::polar(0.8, 2.0 * k / 100.0 + 0.3));
  const SheetPath p = y_along(c, line, 1);
  for (std::size_t k = 1; k < p.y_values.size(); ++k)
    CHECK(std::abs(p.y_values[k] - p.y_values[k - 1]) < 0.5 * std::abs(p.y_values[k]));
}
