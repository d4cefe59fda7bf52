#include "cmcspec/periods.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

namespace cmcspec {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

struct GLRule {
  std::vector<double> x;  // on [0, 1], ascending
  std::vector<double> w;
};

const GLRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GLRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = 0.5 * (1.0 - z);
    r.x[n - 1 - i] = 0.5 * (1.0 + z);
    r.w[i] = r.w[n - 1 - i] = 0.5 * wt;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// expm1(x)/x, continuous at 0.
cplx phi1(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

cplx others_product(const SpectralCurve& c, cplx lam, cplx skip1, cplx skip2) {
  cplx p = c.lead() * lam;
  for (std::size_t k = 1; k < c.branch_points.size(); ++k) {
    const cplx e = c.branch_points[k];
    if (e == skip1 || e == skip2) continue;
    p *= lam - e;
  }
  return p;
}

struct Piece {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
};

// One side of cut j doubled. λ = e^{iθ}e^{sU}, s ∈ (-1, 1), Chebyshev weight absorbs the endpoints.
Piece cut_piece(const SpectralCurve& c, int j, int n) {
  const cplx eta = c.spec.eta[j];
  const cplx mirror = 1.0 / std::conj(eta);
  const double th = std::arg(eta);
  const double U = -std::log(std::abs(eta));
  const cplx rot2 = std::polar(1.0, 2.0 * th);
  auto K = [&](double s) {
    const cplx lam = std::polar(std::exp(s * U), th);
    const cplx E1 = std::exp(-U) * U * phi1((s + 1.0) * U);
    const cplx E2 = std::exp(U) * U * phi1((s - 1.0) * U);
    return rot2 * E1 * E2 * others_product(c, lam, eta, mirror);
  };
  Piece p;
  const double s0 = -std::cos(kPi / (2.0 * n));
  RootTracker tr(K, s0, std::sqrt(K(s0)));
  for (int k = 0; k < n; ++k) {
    const double s = -std::cos((2.0 * k + 1.0) * kPi / (2.0 * n));
    const cplx r = tr.advance(s);
    p.nodes.push_back(std::polar(std::exp(s * U), th));
    p.weights.push_back(2.0 * U * kPi / (kI * static_cast<double>(n) * r));
  }
  return p;
}

// Radial run from η_j to the detour circle, doubled; λ = η e^{-v²D} removes the endpoint singularity.
Piece branch_radial_piece(const SpectralCurve& c, int j, int n, cplx* y_end) {
  const cplx eta = c.spec.eta[j];
  const double D = std::log(std::abs(eta) / c.inner_radius);
  auto W = [&](double v) {
    const cplx lam = eta * std::exp(-v * v * D);
    return -D * eta * phi1(-v * v * D) * others_product(c, lam, eta, cplx(std::nan(""), 0.0));
  };
  const GLRule& gl = gauss_legendre(n);
  RootTracker tr(W, gl.x[0], std::sqrt(W(gl.x[0])));
  Piece p;
  for (int k = 0; k < n; ++k) {
    const double v = gl.x[k];
    const cplx r = tr.advance(v);
    p.nodes.push_back(eta * std::exp(-v * v * D));
    p.weights.push_back(2.0 * (-2.0 * D) * gl.w[k] / r);
  }
  *y_end = tr.advance(1.0);
  return p;
}

Piece sym_radial_piece(const SpectralCurve& c, cplx lambda0, int n, cplx* y_end) {
  const double D = -std::log(c.inner_radius);
  auto Z = [&](double v) { return c.y2(lambda0 * std::exp(-v * D)); };
  const GLRule& gl = gauss_legendre(n);
  RootTracker tr(Z, 0.0, -std::sqrt(Z(0.0)));
  Piece p;
  for (int k = 0; k < n; ++k) {
    const double v = gl.x[k];
    const cplx r = tr.advance(v);
    p.nodes.push_back(lambda0 * std::exp(-v * D));
    p.weights.push_back(2.0 * (-D) * gl.w[k] / r);
  }
  *y_end = tr.advance(1.0);
  return p;
}

// Full counter-clockwise turn of the detour circle starting at angle th with y = y0.
Piece circle_piece(const SpectralCurve& c, double th, cplx y0, int n) {
  const double r0 = c.inner_radius;
  auto Z = [&](double t) { return c.y2(std::polar(r0, th + 2.0 * kPi * t)); };
  const GLRule& gl = gauss_legendre(n);
  RootTracker tr(Z, 0.0, y0);
  Piece p;
  for (int k = 0; k < n; ++k) {
    const double t = gl.x[k];
    const cplx r = tr.advance(t);
    p.nodes.push_back(std::polar(r0, th + 2.0 * kPi * t));
    p.weights.push_back(2.0 * kPi * kI * gl.w[k] / r);
  }
  return p;
}

CycleRule rule_at(const SpectralCurve& c, const Cycle& cy, int n) {
  std::vector<Piece> pieces;
  cplx yend;
  switch (cy.kind) {
    case CycleKind::A:
      pieces.push_back(cut_piece(c, cy.index, n));
      break;
    case CycleKind::B:
      pieces.push_back(branch_radial_piece(c, cy.index, n, &yend));
      pieces.push_back(circle_piece(c, std::arg(cy.anchor), yend, n));
      break;
    case CycleKind::Sym:
      pieces.push_back(sym_radial_piece(c, cy.anchor, n, &yend));
      pieces.push_back(circle_piece(c, std::arg(cy.anchor), yend, n));
      break;
  }
  CycleRule r;
  r.cycle = cy;
  r.nodes_per_piece = n;
  for (auto& p : pieces) {
    r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
    r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
  }
  return r;
}

std::vector<std::pair<cplx, double>> moments(const CycleRule& r, int max_degree) {
  std::vector<std::pair<cplx, double>> m(max_degree + 1, {0.0, 0.0});
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    cplx term = r.weights[k];
    for (int d = 0; d <= max_degree; ++d) {
      m[d].first += term;
      m[d].second += std::abs(term);
      term *= r.nodes[k];
    }
  }
  return m;
}

}  // namespace

cplx CycleRule::apply(const CPoly& b) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * b(nodes[k]);
  return s;
}

CycleRule cycle_rule(const SpectralCurve& curve, const Cycle& cycle, const QuadConfig& quad, int max_degree) {
  int n = std::max(quad.nodes, 2);
  CycleRule coarse = rule_at(curve, cycle, n);
  auto mc = moments(coarse, max_degree);
  while (2 * n <= quad.max_nodes) {
    n *= 2;
    CycleRule fine = rule_at(curve, cycle, n);
    auto mf = moments(fine, max_degree);
    bool ok = true;
    for (int d = 0; d <= max_degree; ++d)
      if (std::abs(mf[d].first - mc[d].first) > quad.tol * std::max(mf[d].second, 1e-300)) ok = false;
    if (ok) return fine;
    coarse = std::move(fine);
    mc = std::move(mf);
  }
  throw ResolutionError("quadrature did not converge within " + std::to_string(quad.max_nodes) + " nodes");
}

PeriodRules period_rules(const SpectralCurve& curve, const QuadConfig& quad) {
  PeriodRules r;
  const auto h = homology_cycles(curve);
  const int deg = curve.genus() + 1;
  for (const auto& c : h.A) r.A.push_back(cycle_rule(curve, c, quad, deg));
  for (const auto& c : h.B) r.B.push_back(cycle_rule(curve, c, quad, deg));
  return r;
}

void validate_diff(const SpectralCurve& curve, const CPoly& b, double tol) {
  if (b.degree() != curve.genus() + 1) throw ValidationError("differential polynomial must have formal degree g+1");
  if (!reality_check(b, tol * std::max(1.0, b.norm_inf())).is_real)
    throw ValidationError("differential polynomial is not ρ-real");
}

std::vector<double> a_periods(const PeriodRules& rules, const CPoly& b, double tol) {
  std::vector<double> out;
  for (const auto& r : rules.A) {
    cplx s = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const cplx t = r.weights[k] * b(r.nodes[k]);
      s += t;
      scale += std::abs(t);
    }
    if (std::abs(s.imag()) > 1e3 * tol * std::max(1.0, scale))
      throw ResolutionError("homology/reality inconsistency: A-period has imaginary part " +
                            std::to_string(s.imag()));
    out.push_back(s.real());
  }
  return out;
}

std::vector<double> a_periods(const SpectralCurve& curve, const CPoly& b, const QuadConfig& quad, double tol) {
  validate_diff(curve, b, tol);
  PeriodRules r;
  for (const auto& c : homology_cycles(curve).A) r.A.push_back(cycle_rule(curve, c, quad, curve.genus() + 1));
  return a_periods(r, b, tol);
}

std::vector<cplx> b_periods(const PeriodRules& rules, const CPoly& b) {
  std::vector<cplx> out;
  for (const auto& r : rules.B) out.push_back(r.apply(b));
  return out;
}

std::vector<cplx> b_periods(const SpectralCurve& curve, const CPoly& b, const QuadConfig& quad) {
  validate_diff(curve, b, kDefaultTol);
  PeriodRules r;
  for (const auto& c : homology_cycles(curve).B) r.B.push_back(cycle_rule(curve, c, quad, curve.genus() + 1));
  return b_periods(r, b);
}

cplx sym_integral(const SpectralCurve& curve, const CPoly& b, cplx lambda0, const QuadConfig& quad) {
  validate_diff(curve, b, kDefaultTol);
  return cycle_rule(curve, sym_cycle(curve, lambda0), quad, curve.genus() + 1).apply(b);
}

PencilBasis solve_Ba(const SpectralCurve& curve, const QuadConfig& quad, double /*tol*/) {
  const int g = curve.genus();
  const int d = g + 1;
  const int n = real_dim(d);
  PencilBasis pb;
  pb.curve = curve;
  pb.rules = period_rules(curve, quad);

  Eigen::MatrixXd K(n, 2);
  if (g == 0) {
    K.setIdentity();
    pb.kernel_gap = std::numeric_limits<double>::infinity();
  } else {
    Eigen::MatrixXd M(2 * g, n);
    for (int k = 0; k < n; ++k) {
      std::vector<double> e(n, 0.0);
      e[k] = 1.0;
      const CPoly p = from_real_coords(e, d);
      for (int j = 0; j < g; ++j) {
        const cplx v = pb.rules.A[j].apply(p);
        M(j, k) = v.real();
        M(g + j, k) = v.imag();
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    pb.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double kept = sv(g - 1);
    const double dropped = sv.size() > g ? sv(g) : 0.0;
    pb.kernel_gap = dropped > 0.0 ? kept / dropped : std::numeric_limits<double>::infinity();
    if (!(pb.kernel_gap > 1e6))
      throw ResolutionError("degenerate period map: kernel gap " + std::to_string(pb.kernel_gap));
    K = svd.matrixV().rightCols(2);
  }

  Eigen::Matrix2d Z = K.topRows(2);
  if (std::abs(Z.determinant()) < 1e-12)
    throw ResolutionError("evaluation at 0 is not injective on the computed kernel");
  const Eigen::MatrixXd N = K * Z.inverse();
  std::vector<double> x1(N.col(0).data(), N.col(0).data() + n);
  std::vector<double> x2(N.col(1).data(), N.col(1).data() + n);
  x1[0] = 1.0;
  x1[1] = 0.0;
  x2[0] = 0.0;
  x2[1] = 1.0;
  pb.b1 = from_real_coords(x1, d);
  pb.b2 = from_real_coords(x2, d);
  return pb;
}

CPoly pencil_element(const PencilBasis& basis, cplx z) { return z.real() * basis.b1 + z.imag() * basis.b2; }

DerivedPencil derived_pencil(const PencilBasis& basis, double tol) {
  const cplx u0 = basis.b1(0.0), v0 = basis.b2(0.0);
  const cplx den = u0 * std::conj(v0) - v0 * std::conj(u0);
  DerivedPencil dp;
  dp.alpha = 2.0 * kI * v0 / den;
  dp.beta = -2.0 * kI * u0 / den;
  dp.b0 = dp.alpha * basis.b1 + dp.beta * basis.b2;
  const int d = basis.b1.degree();
  const cplx top = dp.b0[d];
  if (std::abs(top) <= tol) throw ResolutionError("b₀ degenerate: top coefficient vanishes");
  dp.b0 *= cplx(0.0, -2.0) / top;
  dp.b0[0] = 0.0;
  dp.binf = conj(rho_star(dp.b0));
  return dp;
}

Eigen::MatrixXd phi_map(const PencilBasis& basis, cplx lambda0, const QuadConfig& quad) {
  const int g = basis.curve.genus();
  const CycleRule sym = cycle_rule(basis.curve, sym_cycle(basis.curve, lambda0), quad, g + 1);
  Eigen::MatrixXd out(2, g + 1);
  const CPoly* bs[2] = {&basis.b1, &basis.b2};
  for (int r = 0; r < 2; ++r) {
    std::vector<cplx> vals = b_periods(basis.rules, *bs[r]);
    vals.push_back(sym.apply(*bs[r]));
    for (int k = 0; k <= g; ++k) {
      const cplx v = vals[k] / (2.0 * kPi * kI);
      if (std::abs(v.imag()) > 1e-7 * std::max(1.0, std::abs(v)))
        throw ResolutionError("normalized period is not real: imaginary part " + std::to_string(v.imag()));
      out(r, k) = v.real();
    }
  }
  return out;
}

double rational_plane_distance(const Eigen::MatrixXd& rows, int max_denominator) {
  const int n = static_cast<int>(rows.cols());
  if (n < 2) return 0.0;
  if (max_denominator < 1) throw ValidationError("max_denominator must be positive");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(rows.transpose());
  const Eigen::MatrixXd P = qr.householderQ() * Eigen::MatrixXd::Identity(n, 2);

  // Best-effort beyond ~4e6 candidates: shrink the box.
  int D = max_denominator;
  while (D > 1 && std::pow(2.0 * D + 1.0, n) > 4e6) --D;

  struct Cand {
    double angle;
    Eigen::VectorXd v;
  };
  const std::size_t keep = 64;
  std::vector<Cand> best;
  std::vector<int> v(n, -D);
  auto push = [&](const Eigen::VectorXd& x, double ang) {
    if (best.size() < keep) {
      best.push_back({ang, x});
      std::push_heap(best.begin(), best.end(), [](const Cand& a, const Cand& b) { return a.angle < b.angle; });
    } else if (ang < best.front().angle) {
      std::pop_heap(best.begin(), best.end(), [](const Cand& a, const Cand& b) { return a.angle < b.angle; });
      best.back() = {ang, x};
      std::push_heap(best.begin(), best.end(), [](const Cand& a, const Cand& b) { return a.angle < b.angle; });
    }
  };
  while (true) {
    int first = 0;
    while (first < n && v[first] == 0) ++first;
    if (first < n && v[first] > 0) {
      int gg = 0;
      for (int x : v) gg = std::gcd(gg, std::abs(x));
      if (gg == 1) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = v[i];
        const double sn = std::min(1.0, (x - P * (P.transpose() * x)).norm() / x.norm());
        push(x, std::asin(sn));
      }
    }
    int i = n - 1;
    while (i >= 0 && v[i] == D) v[i--] = -D;
    if (i < 0) break;
    ++v[i];
  }

  double out = kPi / 2.0;
  for (std::size_t i = 0; i < best.size(); ++i)
    for (std::size_t j = i + 1; j < best.size(); ++j) {
      Eigen::MatrixXd B(n, 2);
      B.col(0) = best[i].v;
      B.col(1) = best[j].v;
      Eigen::JacobiSVD<Eigen::MatrixXd> s0(B);
      if (s0.singularValues()(1) < 1e-9 * s0.singularValues()(0)) continue;
      Eigen::HouseholderQR<Eigen::MatrixXd> q2(B);
      const Eigen::MatrixXd Q2 = q2.householderQ() * Eigen::MatrixXd::Identity(n, 2);
      // Largest principal angle: sine is the spectral norm of the residual of Q2 off the row plane.
      Eigen::JacobiSVD<Eigen::MatrixXd> s(Q2 - P * (P.transpose() * Q2));
      out = std::min(out, std::asin(std::min(1.0, s.singularValues()(0))));
    }
  return out;
}

}  // namespace cmcspec
