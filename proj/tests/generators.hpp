#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "cmcspec/polyring.hpp"

namespace gen {

using cmcspec::cplx;
using cmcspec::CPoly;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline cplx complex_in_box(Rng& rng, double r = 1.0) { return {uniform(rng, -r, r), uniform(rng, -r, r)}; }

inline CPoly complex_poly(Rng& rng, int d) {
  std::vector<cplx> c(d + 1);
  for (auto& z : c) z = complex_in_box(rng);
  return CPoly(c);
}

inline CPoly real_poly(Rng& rng, int d) {
  std::vector<double> x(d + 1);
  for (auto& v : x) v = uniform(rng, -1.0, 1.0);
  return cmcspec::from_real_coords(x, d);
}

// Roots in the annulus 0.15 ≤ |η| ≤ 0.85, pairwise and angularly separated.
inline std::vector<cplx> eta(Rng& rng, int g, double sep = 0.08) {
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < g) {
    const cplx e = std::polar(uniform(rng, 0.15, 0.85), uniform(rng, -M_PI, M_PI));
    bool ok = true;
    for (cplx f : out) ok = ok && std::abs(e - f) > sep && std::abs(std::arg(e / f)) > sep;
    if (ok) out.push_back(e);
  }
  return out;
}

// ρ-real degree-2 polynomial: c0, real c1, conj(c0).
inline CPoly real_quadratic(Rng& rng) {
  const cplx c0 = complex_in_box(rng);
  return CPoly(std::vector<cplx>{c0, uniform(rng, -1.0, 1.0), std::conj(c0)});
}

}  // namespace gen
