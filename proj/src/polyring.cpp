#include "cmcspec/polyring.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace cmcspec {

namespace {

using CMat = Eigen::MatrixXcd;

// Sylvester-type system whose null vectors (u, v) give u·p + v·q = 0 with deg u ≤ n-k, deg v ≤ m-k.
CMat subresultant(const std::vector<cplx>& p, const std::vector<cplx>& q, int k) {
  const int m = static_cast<int>(p.size()) - 1;
  const int n = static_cast<int>(q.size()) - 1;
  const int rows = m + n - k + 1;
  const int cu = n - k + 1;
  const int cv = m - k + 1;
  CMat S = CMat::Zero(rows, cu + cv);
  for (int j = 0; j < cu; ++j)
    for (int i = 0; i <= m; ++i) S(i + j, j) = p[i];
  for (int j = 0; j < cv; ++j)
    for (int i = 0; i <= n; ++i) S(i + j, cu + j) = q[i];
  return S;
}

std::vector<cplx> trimmed(const CPoly& p, double tol) {
  const int d = p.effective_degree(tol);
  const double s = p.norm_inf();
  std::vector<cplx> c(p.coeffs().begin(), p.coeffs().begin() + d + 1);
  for (auto& x : c) x /= s;
  return c;
}

double vnorm(const std::vector<cplx>& c) {
  double s = 0.0;
  for (auto x : c) s += std::norm(x);
  return std::sqrt(s);
}

cplx newton_polish(const CPoly& p, const CPoly& dp, cplx r, int iters) {
  double best = std::abs(p(r));
  for (int it = 0; it < iters; ++it) {
    const cplx d = dp(r);
    if (std::abs(d) == 0.0) break;
    const cplx next = r - p(r) / d;
    const double v = std::abs(p(next));
    if (!(v < best)) break;
    best = v;
    r = next;
  }
  return r;
}

}  // namespace

CPoly::CPoly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.assign(1, cplx(0.0));
}

CPoly::CPoly(std::vector<cplx> coeffs, int formal_degree) : c_(std::move(coeffs)) {
  if (formal_degree < 0) throw ValidationError("formal degree must be nonnegative");
  if (static_cast<int>(c_.size()) > formal_degree + 1) {
    for (std::size_t i = formal_degree + 1; i < c_.size(); ++i)
      if (c_[i] != cplx(0.0)) throw ValidationError("coefficients exceed the formal degree");
  }
  c_.resize(formal_degree + 1, cplx(0.0));
}

CPoly CPoly::from_roots(std::span<const cplx> roots, cplx lead) {
  std::vector<cplx> c{lead};
  for (cplx r : roots) {
    std::vector<cplx> next(c.size() + 1, cplx(0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c.swap(next);
  }
  return CPoly(std::move(c));
}

int CPoly::effective_degree(double tol) const {
  const double s = norm_inf();
  int d = degree();
  while (d > 0 && std::abs(c_[d]) <= tol * s) --d;
  return d;
}

cplx CPoly::operator()(cplx x) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

CPoly CPoly::derivative() const {
  if (degree() == 0) return CPoly::zero(0);
  std::vector<cplx> d(degree());
  for (int i = 1; i <= degree(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
  return CPoly(std::move(d));
}

CPoly CPoly::with_degree(int d) const {
  std::vector<cplx> c = c_;
  if (static_cast<int>(c.size()) > d + 1) c.resize(d + 1);
  return CPoly(std::move(c), d);
}

double CPoly::norm_inf() const {
  double s = 0.0;
  for (auto x : c_) s = std::max(s, std::abs(x));
  return s;
}

double CPoly::norm2() const { return vnorm(c_); }

CPoly& CPoly::operator+=(const CPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), cplx(0.0));
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

CPoly& CPoly::operator-=(const CPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), cplx(0.0));
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

CPoly& CPoly::operator*=(cplx s) {
  for (auto& x : c_) x *= s;
  return *this;
}

CPoly operator+(CPoly p, const CPoly& q) { return p += q; }
CPoly operator-(CPoly p, const CPoly& q) { return p -= q; }
CPoly operator*(cplx s, CPoly p) { return p *= s; }
CPoly operator*(CPoly p, cplx s) { return p *= s; }

CPoly operator*(const CPoly& p, const CPoly& q) {
  std::vector<cplx> c(p.degree() + q.degree() + 1, cplx(0.0));
  for (int i = 0; i <= p.degree(); ++i)
    for (int j = 0; j <= q.degree(); ++j) c[i + j] += p[i] * q[j];
  return CPoly(std::move(c));
}

CPoly rho_star(const CPoly& p) {
  std::vector<cplx> c(p.coeffs().rbegin(), p.coeffs().rend());
  return CPoly(std::move(c));
}

CPoly conj(const CPoly& p) {
  std::vector<cplx> c = p.coeffs();
  for (auto& x : c) x = std::conj(x);
  return CPoly(std::move(c));
}

RealityReport reality_check(const CPoly& p, double tol) {
  RealityReport r;
  const int d = p.degree();
  for (int i = 0; i <= d; ++i)
    r.max_defect = std::max(r.max_defect, std::abs(p[d - i] - std::conj(p[i])));
  r.is_real = r.max_defect <= tol;
  return r;
}

std::vector<cplx> roots(const CPoly& p, double tol) {
  if (p.norm_inf() == 0.0) throw ValidationError("zero polynomial has no root set");
  const int d = p.effective_degree(tol);
  std::vector<cplx> out;
  if (d == 0) return out;
  const CPoly q = p.with_degree(d);
  if (d == 1) {
    out.push_back(-q[0] / q[1]);
    return out;
  }
  CMat C = CMat::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -q[i] / q[d];
  Eigen::ComplexEigenSolver<CMat> es(C, false);
  if (es.info() != Eigen::Success) throw ResolutionError("companion eigenvalue solve failed");
  const CPoly dq = q.derivative();
  for (int i = 0; i < d; ++i) out.push_back(newton_polish(q, dq, es.eigenvalues()[i], 4));
  return out;
}

CPoly deflate(const CPoly& p, cplx r, cplx* remainder) {
  const int d = p.degree();
  if (d == 0) {
    if (remainder) *remainder = p[0];
    return CPoly::zero(0);
  }
  std::vector<cplx> q(d);
  cplx acc = p[d];
  for (int i = d - 1; i >= 0; --i) {
    q[i] = acc;
    acc = p[i] + acc * r;
  }
  if (remainder) *remainder = acc;
  return CPoly(std::move(q));
}

CPoly approx_gcd(const CPoly& p, const CPoly& q, double tol) {
  const bool pz = p.norm_inf() == 0.0;
  const bool qz = q.norm_inf() == 0.0;
  if (pz && qz) throw ValidationError("gcd of two zero polynomials is undefined");
  auto monic = [&](const CPoly& x) {
    const int d = x.effective_degree(tol);
    CPoly y = x.with_degree(d);
    return (1.0 / y[d]) * y;
  };
  if (qz) return monic(p);
  if (pz) return monic(q);

  const auto pc = trimmed(p, tol);
  const auto qc = trimmed(q, tol);
  const int m = static_cast<int>(pc.size()) - 1;
  const int n = static_cast<int>(qc.size()) - 1;
  if (m == 0 || n == 0) return CPoly(std::vector<cplx>{1.0});

  const double thresh = tol * (vnorm(pc) + vnorm(qc));
  int k = 0;
  for (int cand = std::min(m, n); cand >= 1; --cand) {
    Eigen::JacobiSVD<CMat> svd(subresultant(pc, qc, cand));
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= thresh) {
      k = cand;
      break;
    }
  }
  if (k == 0) return CPoly(std::vector<cplx>{1.0});

  const CPoly P(pc), Q(qc);
  auto rp = roots(P, tol);
  auto rq = roots(Q, tol);
  std::vector<bool> usedp(rp.size()), usedq(rq.size());
  const CPoly dP = P.derivative(), dQ = Q.derivative();
  // The subresultant degree is an upper bound; each common root must also be confirmed by a
  // pair of computed roots agreeing to √tol, which rejects clustered-but-distinct roots.
  std::vector<cplx> common;
  for (int c = 0; c < k; ++c) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < rp.size(); ++i) {
      if (usedp[i]) continue;
      for (std::size_t j = 0; j < rq.size(); ++j) {
        if (usedq[j]) continue;
        const double dist = std::abs(rp[i] - rq[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    cplx r = 0.5 * (rp[bi] + rq[bj]);
    if (best > std::sqrt(tol) * (1.0 + std::abs(r))) break;
    usedp[bi] = usedq[bj] = true;
    if (std::abs(dP(r)) >= std::abs(dQ(r)))
      r = newton_polish(P, dP, r, 6);
    else
      r = newton_polish(Q, dQ, r, 6);
    common.push_back(r);
  }
  return CPoly::from_roots(common);
}

cplx resultant(const CPoly& p, const CPoly& q, double tol) {
  if (p.degree() < 1 || q.degree() < 1) throw ValidationError("resultant needs formal degrees >= 1");
  const int m = p.effective_degree(tol);
  const int n = q.effective_degree(tol);
  if (m == 0) return std::pow(p[0], n);
  if (n == 0) return std::pow(q[0], m);
  const int N = m + n;
  CMat S = CMat::Zero(N, N);
  for (int r = 0; r < n; ++r)
    for (int i = 0; i <= m; ++i) S(r, r + i) = p[m - i];
  for (int r = 0; r < m; ++r)
    for (int i = 0; i <= n; ++i) S(n + r, r + i) = q[n - i];
  return S.partialPivLu().determinant();
}

int real_dim(int d) { return d + 1; }

std::vector<double> real_coords(const CPoly& p) {
  const int d = p.degree();
  std::vector<double> x;
  x.reserve(d + 1);
  for (int i = 0; i < d - i; ++i) {
    x.push_back(p[i].real());
    x.push_back(p[i].imag());
  }
  if (d % 2 == 0) x.push_back(p[d / 2].real());
  return x;
}

CPoly from_real_coords(std::span<const double> x, int d) {
  if (static_cast<int>(x.size()) != d + 1) throw ValidationError("real coordinate count mismatch");
  CPoly p = CPoly::zero(d);
  std::size_t k = 0;
  for (int i = 0; i < d - i; ++i, k += 2) {
    p[i] = cplx(x[k], x[k + 1]);
    p[d - i] = std::conj(p[i]);
  }
  if (d % 2 == 0) p[d / 2] = x[k];
  return p;
}

}  // namespace cmcspec
