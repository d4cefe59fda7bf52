#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cmcspec/periods.hpp"

namespace cmcspec {

enum class Stratum { V, S, R_only };
std::string stratum_name(Stratum s, int j);

struct InvariantReport {
  int genus = 0;
  int deg_f = 0;
  int gcd_degree = 0;
  std::vector<cplx> gcd_roots;
  std::vector<cplx> s1_roots;  // λ₀ list
  int winding_arg = 0;
  int winding_roots = 0;
  Stratum stratum = Stratum::V;
  std::array<bool, 3> genus0_flags{};  // g = 0, deg f = 1, deg f = n(f̃)
  bool parity_ok = true;
  bool range_ok = true;
  bool corollary_ok = true;

  int winding() const { return winding_arg; }
  std::string label() const { return stratum_name(stratum, winding_arg); }
  bool winding_bounds_ok() const { return parity_ok && range_ok && corollary_ok; }
};

// Pair-level versions operate on any normalized pencil (b1(0) = 1, b2(0) = i).
int deg_f(const CPoly& b1, const CPoly& b2, double tol = kDefaultTol);
int deg_f(const PencilBasis& basis, double tol = kDefaultTol);

cplx f_tilde(const CPoly& b1, const CPoly& b2, cplx lambda);
cplx f_tilde(const PencilBasis& basis, cplx lambda);

// d arg f̃(e^{iθ}) / dθ at λ on S¹.
double f_tilde_rate(const CPoly& b1, const CPoly& b2, cplx lambda);

int winding_arg(const CPoly& b1, const CPoly& b2, int samples = 256, double tol = kDefaultTol);
int winding_arg(const PencilBasis& basis, int samples = 256, double tol = kDefaultTol);
int winding_roots(const CPoly& b1, const CPoly& b2, double tol = kDefaultTol);
int winding_roots(const PencilBasis& basis, double tol = kDefaultTol);

// gcd roots, split into those on S¹ (within tol of the circle) and the rest.
std::vector<cplx> s1_gcd_roots(const CPoly& gcd, double tol);

// Any normalized pair; classify additionally asserts the genus-zero equivalence, which holds for B_a.
InvariantReport classify_pair(int genus, const CPoly& b1, const CPoly& b2, double tol = kDefaultTol);
InvariantReport classify(const PencilBasis& basis, double tol = kDefaultTol);

// Local dimension of {x : F(x) = 0} at x0, by first-order Jacobian rank and second-order
// persistence along the right singular directions.
struct LocalDimension {
  int dimension = 0;
  int jacobian_rank = 0;
  std::vector<double> singular_values;
  std::vector<double> decay_ratios;
  Eigen::MatrixXd normal;  // row space of the Jacobian
};

LocalDimension local_dimension(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                               const Eigen::VectorXd& x0, double h);

struct ConditionProbe {
  int gcd_degree = 0;
  std::vector<cplx> s1_roots;
  bool c_gcd_degree_one = false;   // (C')
  std::vector<int> star_windings;  // distinct V_j met by the perturbation star
  bool b_two_components = false;   // (B')
  int r_dimension = -1;            // (A') estimate, -1 when no S¹ root to track
  int s_dimension = -1;            // (D') estimate of S_{λ₀} at the first S¹ root
  int r_dimension_fine = -1;       // same at fd_step / 10
  int s_dimension_fine = -1;
};

ConditionProbe condition_probe(const SpectralCurve& curve, double tol, double fd_step, const QuadConfig& quad = {});

// Bisects the straight η-segment between curves in different V_j until a common root appears;
// returns the endpoint on R^g.
CurveSpec bisect_to_wall(const CurveSpec& from, const CurveSpec& to, const QuadConfig& quad = {},
                         double tol = kDefaultTol, int iterations = 60);

// Real η-coordinates (Re η_1, Im η_1, ...) and back.
Eigen::VectorXd eta_coords(const CurveSpec& spec);
CurveSpec spec_from_coords(const Eigen::VectorXd& x);

}  // namespace cmcspec
