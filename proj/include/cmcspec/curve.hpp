#pragma once

#include <functional>
#include <vector>

#include "cmcspec/polyring.hpp"

namespace cmcspec {

struct CurveSpec {
  int genus = 0;
  std::vector<cplx> eta;
};

// Radial segment between paired branch points. The base cut runs from 0 to ∞.
struct Cut {
  cplx from;
  cplx to;
  double angle = 0.0;
  bool base = false;
};

struct SpectralCurve {
  CurveSpec spec;
  CPoly a;
  std::vector<cplx> branch_points;  // finite ones: 0, η_j, 1/conj(η_j)
  std::vector<Cut> cuts;            // g handle cuts, then the base cut
  double inner_radius = 0.5;        // radius of the detour circle around 0 used by B and γ
  double base_angle = 0.0;

  int genus() const { return spec.genus; }
  cplx lead() const { return a.lead(); }
  cplx y2(cplx lambda) const { return lambda * a(lambda); }
};

struct CurveLimits {
  double min_separation = 1e-6;
  double ray_clearance = 1e-7;
  int positivity_samples = 1024;
};

SpectralCurve build_curve(const CurveSpec& spec, double tol = kDefaultTol, const CurveLimits& lim = {});

// Continues a square root of z(t) in t, bisecting whenever arg z moves by π/2 or more.
class RootTracker {
 public:
  RootTracker(std::function<cplx(double)> z, double t0, cplx root0);
  cplx advance(double t);
  double t() const { return t_; }
  cplx value() const { return root_; }

 private:
  cplx step(double t0, cplx z0, cplx r0, double t1, cplx z1, int depth);
  std::function<cplx(double)> z_;
  double t_;
  cplx z_cur_;
  cplx root_;
};

struct SheetPath {
  std::vector<cplx> points;
  std::vector<cplx> y_values;
  int sheet_seed = 1;
};

SheetPath y_along(const SpectralCurve& curve, const std::vector<cplx>& polyline, int seed_sign,
                  double margin = 1e-6);

enum class CycleKind { A, B, Sym };

// A_j loops around cut j. B_j runs from η_j radially to the detour circle, once around 0,
// and back on the other sheet. Sym(λ₀) runs from (λ₀, -√(λ₀a)) through the same detour
// to (λ₀, +√(λ₀a)).
struct Cycle {
  CycleKind kind = CycleKind::A;
  int index = 0;
  cplx anchor;
};

struct HomologyBasis {
  std::vector<Cycle> A;
  std::vector<Cycle> B;
};

HomologyBasis homology_cycles(const SpectralCurve& curve);
Cycle sym_cycle(const SpectralCurve& curve, cplx lambda0, double margin = 1e-6);

// Polyline lift of a cycle, for inspection and monodromy checks.
SheetPath trace_cycle(const SpectralCurve& curve, const Cycle& cycle, int samples = 64);

}  // namespace cmcspec
