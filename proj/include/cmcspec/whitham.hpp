#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cmcspec/invariants.hpp"

namespace cmcspec {

struct WhithamTangent {
  CPoly a_dot;
  CPoly b1_dot;
  CPoly b2_dot;
  CPoly c1;
  CPoly c2;
  CPoly Q;
  double bezout_residual = 0.0;      // relative
  double derivative_residual = 0.0;  // relative, max over k = 1, 2
  double compatibility_residual = 0.0;
};

struct BezoutFreedom {
  double A = 0.0;
  double B = 0.0;  // used only when gcd(B_a) has degree 1 with root on S¹
};

std::pair<CPoly, CPoly> bezout_solve(const CPoly& a, const CPoly& b1, const CPoly& b2, const CPoly& Q,
                                     double tol = kDefaultTol, std::optional<BezoutFreedom> freedom = std::nullopt);

// Residuals of the Bezout, derivative and compatibility equations, relative to the size of their terms.
void whitham_residuals(const CPoly& a, const CPoly& b1, const CPoly& b2, WhithamTangent& t);

WhithamTangent whitham_tangent(const PencilBasis& basis, const CPoly& Q, double tol = kDefaultTol,
                               std::optional<BezoutFreedom> freedom = std::nullopt);

WhithamTangent rotation_tangent(const PencilBasis& basis);

struct HandleDeformation {
  cplx alpha;
  cplx sqrt_alpha_bar;
  double t = 0.0;
  CPoly a_t;
  CPoly b_t;
  SpectralCurve curve;  // genus g+1
  PencilBasis basis;    // of the new curve
};

// sqrt_choice ±1 picks the square root of conj(α) with nonnegative real part (+1) or its negative.
HandleDeformation attach_handle(const SpectralCurve& curve, const CPoly& b, cplx alpha, int sqrt_choice, double t,
                                const QuadConfig& quad = {}, double tol = kDefaultTol);

struct HandleCheck {
  int deg_f_before = 0;
  int deg_f_after = 0;
  int winding_before = 0;
  int winding_after = 0;
  double rate_at_alpha = 0.0;  // d arg f̃/dθ at α
  std::vector<cplx> new_s1_critical_points;
  HandleDeformation deformation;
};

HandleCheck handle_invariant_check(const PencilBasis& basis, cplx alpha, double t, const QuadConfig& quad = {},
                                   double tol = kDefaultTol);

// Critical points of f = b1/b2: roots of b1'b2 - b1 b2'.
std::vector<cplx> critical_points(const CPoly& b1, const CPoly& b2, double tol = kDefaultTol);

struct FlowState {
  std::vector<cplx> eta;
  cplx z1 = 1.0;  // b1(0) of the transported frame
  cplx z2 = cplx(0.0, 1.0);
};

struct FlowRecord {
  double t = 0.0;
  FlowState state;
  std::vector<cplx> periods1;  // B-periods of the transported frame
  std::vector<cplx> periods2;
  double drift = 0.0;          // max deviation from the initial periods
};

struct FlowResult {
  std::vector<FlowRecord> records;
  bool aborted = false;
  std::string message;
  double max_drift() const;
};

using QSelector = std::function<CPoly(const FlowState&, double)>;

FlowResult flow(const SpectralCurve& curve, const QSelector& Q, double dt, int steps, const QuadConfig& quad = {},
                double tol = kDefaultTol, std::optional<BezoutFreedom> freedom = std::nullopt);

}  // namespace cmcspec
