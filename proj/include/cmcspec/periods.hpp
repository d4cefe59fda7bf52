#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cmcspec/curve.hpp"

namespace cmcspec {

struct QuadConfig {
  int nodes = 64;
  double tol = 1e-10;
  int max_nodes = 16384;
};

// ∫_cycle Θ_b ≈ Σ weights[k]·b(nodes[k]) for every b of degree ≤ max_degree.
struct CycleRule {
  Cycle cycle;
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  int nodes_per_piece = 0;

  cplx apply(const CPoly& b) const;
};

CycleRule cycle_rule(const SpectralCurve& curve, const Cycle& cycle, const QuadConfig& quad, int max_degree);

struct PeriodRules {
  std::vector<CycleRule> A;
  std::vector<CycleRule> B;
};

PeriodRules period_rules(const SpectralCurve& curve, const QuadConfig& quad);

// Checks that b has formal degree g+1 and is ρ-real at tol.
void validate_diff(const SpectralCurve& curve, const CPoly& b, double tol);

std::vector<double> a_periods(const SpectralCurve& curve, const CPoly& b, const QuadConfig& quad = {},
                              double tol = kDefaultTol);
std::vector<double> a_periods(const PeriodRules& rules, const CPoly& b, double tol = kDefaultTol);
std::vector<cplx> b_periods(const SpectralCurve& curve, const CPoly& b, const QuadConfig& quad = {});
std::vector<cplx> b_periods(const PeriodRules& rules, const CPoly& b);
cplx sym_integral(const SpectralCurve& curve, const CPoly& b, cplx lambda0, const QuadConfig& quad = {});

struct PencilBasis {
  SpectralCurve curve;
  CPoly b1;
  CPoly b2;
  double kernel_gap = 0.0;
  std::vector<double> singular_values;
  PeriodRules rules;
};

PencilBasis solve_Ba(const SpectralCurve& curve, const QuadConfig& quad = {}, double tol = kDefaultTol);

// Element Re(z)·b1 + Im(z)·b2 of B_a, the one with value z at 0.
CPoly pencil_element(const PencilBasis& basis, cplx z);

struct DerivedPencil {
  CPoly b0;
  CPoly binf;
  cplx alpha;
  cplx beta;
};

DerivedPencil derived_pencil(const PencilBasis& basis, double tol = kDefaultTol);

// Rows φ(b1), φ(b2): (1/2πi)(∫_{B_1}Θ_b, …, ∫_{B_g}Θ_b, ∫_γ Θ_b).
Eigen::MatrixXd phi_map(const PencilBasis& basis, cplx lambda0, const QuadConfig& quad = {});

double rational_plane_distance(const Eigen::MatrixXd& rows, int max_denominator = 12);

}  // namespace cmcspec
