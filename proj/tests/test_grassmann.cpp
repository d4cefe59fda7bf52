#include <doctest.h>

#include "cmcspec/grassmann.hpp"
#include "generators.hpp"

using namespace cmcspec;

TEST_CASE("plane basis examples") {
  GrPlane p{1, Eigen::MatrixXd::Zero(1, 2)};
  auto [b1, b2] = plane_basis(p);
  CHECK((b1 - CPoly(std::vector<cplx>{1.0, 0.0, 1.0})).norm_inf() == 0.0);
  CHECK((b2 - CPoly(std::vector<cplx>{cplx(0, 1), 0.0, cplx(0, -1)})).norm_inf() == 0.0);
  CHECK(gr_classify(p).gcd_degree == 0);
  CHECK_FALSE(gr_classify(p).in_R);

  p.M(0, 0) = -2.0;
  std::tie(b1, b2) = plane_basis(p);
  CHECK((b1 - CPoly::from_roots(std::vector<cplx>{1.0, 1.0})).norm_inf() == 0.0);
  const GrClass c = gr_classify(p);
  CHECK(c.gcd_degree == 1);
  CHECK(c.in_R);
  CHECK(c.in_S);
  REQUIRE(c.s1_roots.size() == 1);
  CHECK(std::abs(c.s1_roots[0] - 1.0) < 1e-9);
}

TEST_CASE("normalization and reality of plane bases") {
  gen::Rng rng(41);
  for (int g = 0; g <= 5; ++g) {
    GrPlane p{g, Eigen::MatrixXd(g, 2)};
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < 2; ++j) p.M(i, j) = gen::uniform(rng, -2, 2);
    const auto [b1, b2] = plane_basis(p);
    CHECK(b1(0.0) == cplx(1.0, 0.0));
    CHECK(b2(0.0) == cplx(0.0, 1.0));
    CHECK(reality_check(b1, 1e-15).is_real);
    CHECK(reality_check(b2, 1e-15).is_real);
    if (g > 0) CHECK((plane_from_span(b1, b2).M - p.M).norm() < 1e-12);
  }
}

TEST_CASE("common factor off the circle is R but not S") {
  // (λ - 0.5)(λ - 2) = -2·(λ - 0.5)(0.5λ - 1) up to a real factor
  const GrPlane p = plane_with_gcd(2, pair_factor(0.5), 4);
  const GrClass c = gr_classify(p);
  CHECK(c.gcd_degree == 2);
  CHECK(c.in_R);
  CHECK_FALSE(c.in_S);
  const auto [b1, b2] = plane_basis(p);
  CHECK(std::abs(b1(0.5)) < 1e-10);
  CHECK(std::abs(b2(2.0)) < 1e-9);
}

TEST_CASE("gcd degree is invariant under real recombination") {
  gen::Rng rng(42);
  for (int g = 1; g <= 4; ++g)
    for (int k : {0, 1, 2}) {
      if (k == 2 && g < 2) continue;
      const CPoly common = k == 0 ? CPoly(std::vector<cplx>{1.0}) : k == 1 ? s1_factor(0.4) : pair_factor(cplx(0.2, -0.5));
      const GrPlane p = plane_with_gcd(g, common, 100 + g * 3 + k);
      const auto [b1, b2] = plane_basis(p);
      Eigen::Matrix2d R;
      do {
        R << gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1);
      } while (std::abs(R.determinant()) < 0.1);
      const GrPlane q = plane_from_span(R(0, 0) * b1 + R(1, 0) * b2, R(0, 1) * b1 + R(1, 1) * b2);
      CHECK(gr_classify(q).gcd_degree == gr_classify(p).gcd_degree);
      CHECK((q.M - p.M).norm() < 1e-9);
    }
}

TEST_CASE("stratum dimensions") {
  for (int g = 1; g <= 3; ++g) {
    const StratumProbe s = stratum_dimension_probe(plane_with_gcd(g, s1_factor(0.7), g));
    CHECK(s.dimension == 2 * g - 1);
    CHECK(s.dimension_fine == 2 * g - 1);
    CHECK_FALSE(s.singular);
    if (g < 2) continue;
    const StratumProbe r = stratum_dimension_probe(plane_with_gcd(g, pair_factor(cplx(0.5, 0.2)), g));
    CHECK(r.dimension == 2 * g - 2);
    CHECK(r.dimension_fine == 2 * g - 2);
    CHECK(r.sheets == 1);
    const StratumProbe two = stratum_dimension_probe(plane_with_gcd(g, s1_factor(0.7) * s1_factor(2.5), g));
    CHECK(two.sheets == 2);
    CHECK(two.singular);
  }
  CHECK_THROWS_AS(stratum_dimension_probe(GrPlane{1, Eigen::MatrixXd::Zero(1, 2)}), ValidationError);
}

TEST_CASE("the (lambda - 1) plane probes to dimension 1") {
  GrPlane p{1, Eigen::MatrixXd::Zero(1, 2)};
  p.M(0, 0) = -2.0;
  CHECK(stratum_dimension_probe(p).dimension == 1);
}

TEST_CASE("B map and immersion rank") {
  const SpectralCurve c = build_curve({1, {0.5}});
  const PencilBasis pb = solve_Ba(c);
  const GrPlane p = B_map(pb);
  const auto [b1, b2] = plane_basis(p);
  CHECK((b1 - pb.b1).norm_inf() < 1e-12);
  CHECK((b2 - pb.b2).norm_inf() < 1e-12);
  CHECK(immersion_rank(c).rank == 2);
  CHECK(B_map(build_curve({0, {}})).M.size() == 0);
  CHECK(immersion_rank(build_curve({0, {}})).rank == 0);
  const CurveSpec s{2, {0.4, cplx(0.0, 0.3)}};
  CurveSpec rot = s;
  for (auto& e : rot.eta) e *= std::polar(1.0, 1.3);
  CHECK(immersion_rank(build_curve(s)).rank == immersion_rank(build_curve(rot)).rank);
}

TEST_CASE("B map then gr_classify agrees with classify") {
  gen::Rng rng(43);
  for (int g = 1; g <= 4; ++g)
    for (int k = 0; k < 5; ++k) {
      const PencilBasis pb = solve_Ba(build_curve({g, gen::eta(rng, g)}));
      const GrClass c = gr_classify(B_map(pb));
      const InvariantReport r = classify(pb);
      CHECK(c.gcd_degree == r.gcd_degree);
      CHECK(c.s1_roots.size() == r.s1_roots.size());
    }
}
