#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cmcspec/errors.hpp"

namespace cmcspec {

using cplx = std::complex<double>;

// Polynomial with an explicit formal degree; coeffs[i] multiplies λ^i.
class CPoly {
 public:
  CPoly() : c_(1, cplx(0.0)) {}
  explicit CPoly(std::vector<cplx> coeffs);
  CPoly(std::vector<cplx> coeffs, int formal_degree);

  static CPoly zero(int formal_degree) { return CPoly(std::vector<cplx>(formal_degree + 1)); }
  static CPoly from_roots(std::span<const cplx> roots, cplx lead = 1.0);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  int effective_degree(double tol) const;
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](int i) const { return c_[i]; }
  cplx& operator[](int i) { return c_[i]; }
  cplx lead() const { return c_.back(); }

  cplx operator()(cplx x) const;
  CPoly derivative() const;
  CPoly with_degree(int d) const;
  double norm_inf() const;
  double norm2() const;

  CPoly& operator+=(const CPoly& o);
  CPoly& operator-=(const CPoly& o);
  CPoly& operator*=(cplx s);

 private:
  std::vector<cplx> c_;
};

CPoly operator+(CPoly p, const CPoly& q);
CPoly operator-(CPoly p, const CPoly& q);
CPoly operator*(const CPoly& p, const CPoly& q);
CPoly operator*(cplx s, CPoly p);
CPoly operator*(CPoly p, cplx s);

CPoly rho_star(const CPoly& p);
CPoly conj(const CPoly& p);

struct RealityReport {
  bool is_real = false;
  double max_defect = 0.0;
};

RealityReport reality_check(const CPoly& p, double tol);

// Roots with multiplicity; leading coefficients below tol·‖p‖∞ are stripped.
std::vector<cplx> roots(const CPoly& p, double tol = kDefaultTol);

CPoly approx_gcd(const CPoly& p, const CPoly& q, double tol = kDefaultTol);

// Sylvester determinant at effective degrees; equals lead_p^{deg q}·Π q(r_i).
cplx resultant(const CPoly& p, const CPoly& q, double tol = 0.0);

// Quotient and remainder of p by the monic (λ - r).
CPoly deflate(const CPoly& p, cplx r, cplx* remainder = nullptr);

// Real coordinates of a ρ-real polynomial of formal degree d: (Re p0, Im p0, Re p1, Im p1, ...)
// over i < d - i, followed by the real middle coefficient when d is even. Length d + 1.
std::vector<double> real_coords(const CPoly& p);
CPoly from_real_coords(std::span<const double> x, int d);
int real_dim(int d);

}  // namespace cmcspec
