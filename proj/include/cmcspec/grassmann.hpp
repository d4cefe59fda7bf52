#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cmcspec/invariants.hpp"

namespace cmcspec {

// Graph chart of Gr(2, P^{g+1}_R)°. Column k holds the g middle real coordinates (entries 2.. of
// real_coords) of the element with b(0) = 1 (k = 0) or b(0) = i (k = 1).
struct GrPlane {
  int genus = 0;
  Eigen::MatrixXd M;  // g × 2
};

std::pair<CPoly, CPoly> plane_basis(const GrPlane& plane);

// Span of two ρ-real polynomials of degree g+1, renormalized to b1(0) = 1, b2(0) = i.
GrPlane plane_from_span(const CPoly& p, const CPoly& q);

struct GrClass {
  int gcd_degree = 0;
  std::vector<cplx> gcd_roots;
  std::vector<cplx> s1_roots;
  bool in_R = false;
  bool in_S = false;
};

GrClass gr_classify(const GrPlane& plane, double tol = kDefaultTol);

// Random ρ-real polynomial of degree d with coordinates uniform in [-1, 1].
template <class Rng>
CPoly random_real_poly(int d, Rng& rng);

// Plane whose gcd is exactly the given ρ-real polynomial (generic cofactors from seed).
GrPlane plane_with_gcd(int genus, const CPoly& common, unsigned seed);
// ρ-real linear factor vanishing at e^{iθ} and quadratic factor vanishing at r, 1/conj(r).
CPoly s1_factor(double theta);
CPoly pair_factor(cplx r);

struct StratumProbe {
  int gcd_degree = 0;
  std::vector<cplx> s1_roots;
  int sheets = 0;                 // one per ρ-orbit of gcd roots
  std::vector<int> sheet_dimensions;
  int dimension = 0;              // at radius
  int dimension_fine = 0;         // at radius / 10
  bool singular = false;          // several sheets with distinct normal spaces
  double normal_overlap = 1.0;    // largest cosine between normals of different sheets
};

StratumProbe stratum_dimension_probe(const GrPlane& plane, double radius = 1e-3, double tol = kDefaultTol);

GrPlane B_map(const PencilBasis& basis);
GrPlane B_map(const SpectralCurve& curve, const QuadConfig& quad = {}, double tol = kDefaultTol);

struct ImmersionRank {
  int rank = 0;
  std::vector<double> singular_values;
  std::vector<double> singular_values_half;
};

ImmersionRank immersion_rank(const SpectralCurve& curve, double fd_step = 1e-4, const QuadConfig& quad = {},
                             double tol = kDefaultTol);

}  // namespace cmcspec
