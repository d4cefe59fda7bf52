#include <doctest.h>

#include "cmcspec/grassmann.hpp"
#include "generators.hpp"

using namespace cmcspec;

namespace {

// Winding of f̃ on S¹ by dense unwrapping, independent of both library algorithms.
int dense_winding(const CPoly& b1, const CPoly& b2, int n = 200000) {
  double total = 0.0;
  cplx prev = f_tilde(b1, b2, 1.0);
  for (int k = 1; k <= n; ++k) {
    const cplx cur = f_tilde(b1, b2, std::polar(1.0, 2.0 * M_PI * k / n));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

// deg f as the number of solutions of b1 = w b2 off the common roots, for a generic w.
int preimage_count(const CPoly& b1, const CPoly& b2) {
  const cplx w(0.377, -1.291);
  int n = 0;
  for (cplx r : roots(b1 - w * b2))
    if (std::abs(b2(r)) > 1e-6) ++n;
  return n;
}

std::vector<CurveSpec> sample(int g, int n, unsigned seed) {
  gen::Rng rng(seed);
  std::vector<CurveSpec> out;
  for (int k = 0; k < n; ++k) out.push_back({g, gen::eta(rng, g)});
  return out;
}

}  // namespace

TEST_CASE("genus zero: deg f = winding = 1 and f tilde is lambda") {
  const PencilBasis pb = solve_Ba(build_curve({0, {}}));
  const InvariantReport r = classify(pb);
  CHECK(r.deg_f == 1);
  CHECK(r.winding_arg == 1);
  CHECK(r.winding_roots == 1);
  CHECK(r.genus0_flags == std::array<bool, 3>{true, true, true});
  for (int k = 0; k < 256; ++k) {
    const cplx l = std::polar(1.0, 2.0 * M_PI * k / 256);
    CHECK(std::abs(f_tilde(pb, l) - l) < 1e-9);
  }
}

TEST_CASE("genus one curves are in V_0 with deg f = 2") {
  const InvariantReport r = classify(solve_Ba(build_curve({1, {0.5}})));
  CHECK(r.deg_f == 2);
  CHECK(r.winding() == 0);
  CHECK(r.gcd_degree == 0);
  CHECK(r.label() == "V_0");
  CHECK(r.genus0_flags == std::array<bool, 3>{false, false, false});
}

TEST_CASE("winding and degree agree with independent oracles on random curves") {
  for (int g = 1; g <= 4; ++g)
    for (const CurveSpec& s : sample(g, 15, 100 + g)) {
      const PencilBasis pb = solve_Ba(build_curve(s));
      const InvariantReport r = classify(pb);
      CHECK(r.winding_arg == dense_winding(pb.b1, pb.b2));
      CHECK(r.deg_f == preimage_count(pb.b1, pb.b2));
      CHECK(r.winding_bounds_ok());
      if (g == 2 && r.gcd_degree == 0) CHECK((r.winding() == 1 || r.winding() == -1));
    }
}

TEST_CASE("f tilde maps the circle to itself") {
  for (const CurveSpec& s : sample(3, 5, 7)) {
    const PencilBasis pb = solve_Ba(build_curve(s));
    for (int k = 0; k < 512; ++k) CHECK(std::abs(std::abs(f_tilde(pb, std::polar(1.0, 0.0123 * k))) - 1.0) < 1e-7);
  }
}

TEST_CASE("rotation of the curve leaves deg f and winding unchanged") {
  for (const CurveSpec& s : sample(3, 6, 8)) {
    CurveSpec rot = s;
    for (auto& e : rot.eta) e *= std::polar(1.0, 0.731);
    const InvariantReport a = classify(solve_Ba(build_curve(s))), b = classify(solve_Ba(build_curve(rot)));
    CHECK(a.deg_f == b.deg_f);
    CHECK(a.winding() == b.winding());
  }
}

TEST_CASE("deg f is invariant under real recombination of the pencil") {
  gen::Rng rng(9);
  for (const CurveSpec& s : sample(4, 6, 10)) {
    const PencilBasis pb = solve_Ba(build_curve(s));
    Eigen::Matrix2d R;
    do {
      R << gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1), gen::uniform(rng, -1, 1);
    } while (std::abs(R.determinant()) < 0.1);
    const CPoly c1 = R(0, 0) * pb.b1 + R(1, 0) * pb.b2, c2 = R(0, 1) * pb.b1 + R(1, 1) * pb.b2;
    CHECK(deg_f(c1, c2) == deg_f(pb));
  }
}

TEST_CASE("constructed pencil with a common S1 factor") {
  for (int g = 1; g <= 3; ++g) {
    const GrPlane p = plane_with_gcd(g, s1_factor(1.1), 5u + g);
    const auto [b1, b2] = plane_basis(p);
    const InvariantReport r = classify_pair(g, b1, b2);
    CHECK(r.gcd_degree == 1);
    CHECK(r.deg_f == g);
    CHECK(r.stratum == Stratum::S);
    REQUIRE(r.s1_roots.size() == 1);
    CHECK(std::abs(r.s1_roots[0] - std::polar(1.0, 1.1)) < 1e-8);
  }
  const auto [b1, b2] = plane_basis(plane_with_gcd(3, pair_factor(cplx(0.3, 0.4)), 3));
  const InvariantReport r = classify_pair(3, b1, b2);
  CHECK(r.gcd_degree == 2);
  CHECK(r.stratum == Stratum::R_only);
}

TEST_CASE("root count near the circle fails loudly") {
  // b1 + i b2 vanishes at λ = 1 while b1, b2 share no root.
  const CPoly b1(std::vector<cplx>{1.0, 0.0, 1.0});
  const CPoly b2(std::vector<cplx>{cplx(0, 1), 0.2, cplx(0, 1) - 0.2});
  CHECK_THROWS_AS(winding_roots(b1, b2), ResolutionError);
}

TEST_CASE("local dimension of simple varieties") {
  auto sphere = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(1);
    r(0) = x.squaredNorm() - 1.0;
    return r;
  };
  CHECK(local_dimension(sphere, Eigen::Vector3d(1, 0, 0), 1e-3).dimension == 2);
  auto line = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(2);
    r << x(0) - x(2) * x(2), x(1) + std::sin(x(2));
    return r;
  };
  CHECK(local_dimension(line, Eigen::Vector3d(0, 0, 0), 1e-3).dimension == 1);
}

TEST_CASE("condition probe at a wall between V_1 and V_-1") {
  CurveSpec a, b;
  bool ha = false, hb = false;
  for (const CurveSpec& s : sample(2, 40, 12)) {
    const int w = classify(solve_Ba(build_curve(s))).winding();
    if (w == 1 && !ha) a = s, ha = true;
    if (w == -1 && !hb) b = s, hb = true;
  }
  REQUIRE((ha && hb));
  const CurveSpec wall = bisect_to_wall(a, b);
  const SpectralCurve c = build_curve(wall);
  CHECK(classify(solve_Ba(c)).gcd_degree == 1);
  const ConditionProbe p = condition_probe(c, 1e-9, 1e-3);
  CHECK(p.c_gcd_degree_one);
  CHECK(p.b_two_components);
  CHECK(p.r_dimension == 3);
  CHECK(p.r_dimension_fine == 3);
  CHECK(p.s_dimension == 2);
  CHECK(p.s_dimension_fine == 2);
}

TEST_CASE("condition probe is undefined off R^g") {
  CHECK_THROWS_AS(condition_probe(build_curve({1, {0.5}}), 1e-9, 1e-3), ValidationError);
}
