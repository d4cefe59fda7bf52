#include <doctest.h>

#include <algorithm>

#include "cmcspec/polyring.hpp"
#include "generators.hpp"

using namespace cmcspec;

namespace {

double match_error(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (cplx x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("arithmetic agrees with pointwise evaluation") {
  gen::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const CPoly p = gen::complex_poly(rng, 1 + trial % 5), q = gen::complex_poly(rng, trial % 4);
    const cplx z = gen::complex_in_box(rng, 1.5);
    CHECK(std::abs((p * q)(z) - p(z) * q(z)) < 1e-12);
    CHECK(std::abs((p + q)(z) - (p(z) + q(z))) < 1e-12);
    CHECK(std::abs((p - q)(z) - (p(z) - q(z))) < 1e-12);
    const double h = 1e-6;
    const cplx fd = (p(z + h) - p(z - h)) / (2.0 * h);
    CHECK(std::abs(p.derivative()(z) - fd) < 1e-6);
  }
}

TEST_CASE("rho_star is an involution and reality is its fixed set") {
  gen::Rng rng(2);
  for (int d = 0; d < 7; ++d) {
    const CPoly p = gen::complex_poly(rng, d);
    CHECK((rho_star(rho_star(p)) - p).norm_inf() < 1e-15);
    const CPoly r = gen::real_poly(rng, d);
    CHECK(reality_check(r, 1e-12).is_real);
    CHECK((conj(rho_star(r)) - r).norm_inf() < 1e-15);
    // λ^{-d/2} r is real on S¹
    const double th = gen::uniform(rng, -3.0, 3.0);
    CHECK(std::abs((std::polar(1.0, -0.5 * d * th) * r(std::polar(1.0, th))).imag()) < 1e-12);
  }
  CHECK_FALSE(reality_check(CPoly(std::vector<cplx>{1.0, 0.0, 2.0}), 1e-9).is_real);
}

TEST_CASE("real coordinates round trip and count d+1") {
  gen::Rng rng(3);
  for (int d = 0; d < 8; ++d) {
    const CPoly r = gen::real_poly(rng, d);
    const auto x = real_coords(r);
    CHECK(static_cast<int>(x.size()) == d + 1);
    CHECK(real_dim(d) == d + 1);
    CHECK((from_real_coords(x, d) - r).norm_inf() == 0.0);
  }
  CHECK_THROWS_AS(from_real_coords(std::vector<double>{1.0}, 2), ValidationError);
}

TEST_CASE("roots recover constructed roots") {
  gen::Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<cplx> rs(1 + trial % 7);
    for (auto& r : rs) r = gen::complex_in_box(rng, 2.0);
    const cplx lead = std::polar(gen::uniform(rng, 0.5, 2.0), gen::uniform(rng, -3.0, 3.0));
    CHECK(match_error(roots(CPoly::from_roots(rs, lead)), rs) < 1e-8);
  }
  CHECK(roots(CPoly(std::vector<cplx>{2.0})).empty());
}

TEST_CASE("deflate returns quotient and remainder p(r)") {
  gen::Rng rng(5);
  const CPoly p = gen::complex_poly(rng, 5);
  const cplx r = gen::complex_in_box(rng);
  cplx rem;
  const CPoly q = deflate(p, r, &rem);
  CHECK(std::abs(rem - p(r)) < 1e-13);
  const CPoly back = q * CPoly(std::vector<cplx>{-r, 1.0}) + CPoly(std::vector<cplx>{rem});
  CHECK((back.with_degree(5) - p).norm_inf() < 1e-13);
}

TEST_CASE("resultant matches the root-product formula") {
  gen::Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> rp(1 + trial % 3), rq(1 + trial % 4);
    for (auto& r : rp) r = gen::complex_in_box(rng);
    for (auto& r : rq) r = gen::complex_in_box(rng);
    const cplx lp(1.3, -0.2), lq(-0.7, 0.4);
    cplx prod = std::pow(lp, static_cast<double>(rq.size())) * std::pow(lq, static_cast<double>(rp.size()));
    for (cplx a : rp)
      for (cplx b : rq) prod *= a - b;
    const cplx res = resultant(CPoly::from_roots(rp, lp), CPoly::from_roots(rq, lq));
    CHECK(std::abs(res - prod) < 1e-9 * std::max(1.0, std::abs(prod)));
  }
}

TEST_CASE("approximate gcd finds planted common factors") {
  gen::Rng rng(7);
  for (int k = 0; k <= 3; ++k) {
    std::vector<cplx> common(k);
    for (auto& c : common) c = gen::complex_in_box(rng);
    const CPoly G = CPoly::from_roots(common);
    const CPoly p = G * gen::complex_poly(rng, 3), q = G * gen::complex_poly(rng, 2);
    const CPoly g = approx_gcd(p, q);
    REQUIRE(g.effective_degree(0.0) == k);
    if (k > 0) CHECK(match_error(roots(g), common) < 1e-7);
  }
  // ρ-real pair sharing λ - 1
  const CPoly b1(std::vector<cplx>{1.0, -2.0, 1.0});
  const CPoly b2(std::vector<cplx>{cplx(0, 1), 0.0, cplx(0, -1)});
  const CPoly g = approx_gcd(b1, b2);
  REQUIRE(g.effective_degree(0.0) == 1);
  CHECK(std::abs(roots(g)[0] - 1.0) < 1e-9);
  // nearby but distinct roots are not merged
  CHECK(approx_gcd(CPoly::from_roots(std::vector<cplx>{0.3, 0.5}), CPoly::from_roots(std::vector<cplx>{0.3 + 1e-3, -0.5}))
            .effective_degree(0.0) == 0);
}
