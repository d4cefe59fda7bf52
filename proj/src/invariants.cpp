#include "cmcspec/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace cmcspec {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

struct Deflated {
  CPoly num;  // b1 + i b2
  CPoly den;  // b1 - i b2
  std::vector<cplx> s1;
  CPoly gcd;
};

Deflated deflate_pair(const CPoly& b1, const CPoly& b2, double tol) {
  Deflated d;
  d.num = b1 + kI * b2;
  d.den = b1 - kI * b2;
  d.gcd = approx_gcd(b1, b2, tol);
  d.s1 = s1_gcd_roots(d.gcd, tol);
  for (cplx r : d.s1) {
    d.num = deflate(d.num, r);
    d.den = deflate(d.den, r);
  }
  return d;
}

// Off-circle gcd roots appear in both polynomials and cancel in the difference.
int count_inside(const CPoly& p, double tol) {
  if (p.norm_inf() == 0.0) throw ResolutionError("f̃ numerator or denominator vanishes identically");
  auto rs = roots(p, tol);
  int inside = 0;
  for (cplx r : rs) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) <= tol) throw ResolutionError("boundary root: stratum boundary case");
    if (m < 1.0) ++inside;
  }
  return inside;
}

}  // namespace

std::string stratum_name(Stratum s, int j) {
  switch (s) {
    case Stratum::V:
      return "V_" + std::to_string(j);
    case Stratum::S:
      return "S";
    case Stratum::R_only:
      return "R_only";
  }
  return "?";
}

std::vector<cplx> s1_gcd_roots(const CPoly& gcd, double tol) {
  std::vector<cplx> out;
  if (gcd.effective_degree(0.0) == 0) return out;
  for (cplx r : roots(gcd, tol))
    if (std::abs(std::abs(r) - 1.0) <= std::max(tol, 1e-12)) out.push_back(r);
  return out;
}

int deg_f(const CPoly& b1, const CPoly& b2, double tol) {
  const int d = std::max(b1.degree(), b2.degree());
  return d - approx_gcd(b1, b2, tol).effective_degree(0.0);
}

int deg_f(const PencilBasis& basis, double tol) { return deg_f(basis.b1, basis.b2, tol); }

cplx f_tilde(const CPoly& b1, const CPoly& b2, cplx lambda) {
  const cplx u = b1(lambda), v = b2(lambda);
  return (u + kI * v) / (u - kI * v);
}

cplx f_tilde(const PencilBasis& basis, cplx lambda) { return f_tilde(basis.b1, basis.b2, lambda); }

double f_tilde_rate(const CPoly& b1, const CPoly& b2, cplx lambda) {
  const CPoly n = b1 + kI * b2, d = b1 - kI * b2;
  const cplx r = lambda * (n.derivative()(lambda) / n(lambda) - d.derivative()(lambda) / d(lambda));
  return r.real();
}

int winding_arg(const CPoly& b1, const CPoly& b2, int samples, double tol) {
  if (samples < 3) throw ValidationError("winding needs at least 3 samples");
  const Deflated d = deflate_pair(b1, b2, tol);
  // |d/dθ p(e^{iθ})| ≤ Σ k|p_k|. A step whose length h satisfies M·h < |p|/2 at its left end keeps
  // arg p inside a cone of half-angle π/6, so the principal increment is the true one.
  auto lipschitz = [](const CPoly& p) {
    double m = 0.0;
    for (int k = 1; k <= p.degree(); ++k) m += k * std::abs(p[k]);
    return m;
  };
  const double Mn = lipschitz(d.num), Md = lipschitz(d.den);
  struct Sample {
    cplx n, m;
  };
  auto at = [&](double th) {
    const cplx l = std::polar(1.0, th);
    return Sample{d.num(l), d.den(l)};
  };
  double total = 0.0;
  std::function<void(double, const Sample&, double, const Sample&, int)> acc =
      [&](double t0, const Sample& s0, double t1, const Sample& s1, int depth) {
        const double h = t1 - t0;
        const bool ok_n = Mn * h < 0.5 * std::min(std::abs(s0.n), std::abs(s1.n));
        const bool ok_d = Md * h < 0.5 * std::min(std::abs(s0.m), std::abs(s1.m));
        if (ok_n && ok_d) {
          total += std::arg(s1.n / s0.n) - std::arg(s1.m / s0.m);
          return;
        }
        if (depth > 48) throw ResolutionError("winding not resolved; refine or deflate gcd");
        const double tm = 0.5 * (t0 + t1);
        const Sample sm = at(tm);
        acc(t0, s0, tm, sm, depth + 1);
        acc(tm, sm, t1, s1, depth + 1);
      };
  Sample prev = at(0.0);
  const Sample first = prev;
  for (int k = 1; k <= samples; ++k) {
    const double th = 2.0 * kPi * k / samples;
    const Sample cur = k == samples ? first : at(th);
    acc(2.0 * kPi * (k - 1) / samples, prev, th, cur, 0);
    prev = cur;
  }
  const double turns = total / (2.0 * kPi);
  const double snapped = std::round(turns);
  if (std::abs(turns - snapped) >= 0.25) throw ResolutionError("winding not resolved; refine or deflate gcd");
  return static_cast<int>(snapped);
}

int winding_arg(const PencilBasis& basis, int samples, double tol) {
  return winding_arg(basis.b1, basis.b2, samples, tol);
}

int winding_roots(const CPoly& b1, const CPoly& b2, double tol) {
  const Deflated d = deflate_pair(b1, b2, tol);
  return count_inside(d.num, tol) - count_inside(d.den, tol);
}

int winding_roots(const PencilBasis& basis, double tol) { return winding_roots(basis.b1, basis.b2, tol); }

InvariantReport classify_pair(int genus, const CPoly& b1, const CPoly& b2, double tol) {
  InvariantReport r;
  r.genus = genus;
  const CPoly G = approx_gcd(b1, b2, tol);
  r.gcd_degree = G.effective_degree(0.0);
  r.deg_f = genus + 1 - r.gcd_degree;
  if (r.gcd_degree > 0) r.gcd_roots = roots(G, tol);
  r.s1_roots = s1_gcd_roots(G, tol);
  r.winding_arg = winding_arg(b1, b2, 256, tol);
  r.winding_roots = winding_roots(b1, b2, tol);
  if (r.winding_arg != r.winding_roots)
    throw InvariantViolation("winding algorithms disagree: argument " + std::to_string(r.winding_arg) +
                             " vs roots " + std::to_string(r.winding_roots));
  if (!r.s1_roots.empty())
    r.stratum = Stratum::S;
  else if (r.gcd_degree > 0)
    r.stratum = Stratum::R_only;
  else
    r.stratum = Stratum::V;

  const int n = r.winding_arg;
  r.genus0_flags = {genus == 0, r.deg_f == 1, r.deg_f == n};
  r.parity_ok = ((n - r.deg_f) % 2) == 0;
  r.range_ok = -r.deg_f < n && n <= r.deg_f;
  r.corollary_ok = genus == 0 || std::abs(n) <= r.deg_f - 2;
  return r;
}

InvariantReport classify(const PencilBasis& basis, double tol) {
  InvariantReport r = classify_pair(basis.curve.genus(), basis.b1, basis.b2, tol);
  const auto& f = r.genus0_flags;
  if (!(f[0] == f[1] && f[1] == f[2])) throw InvariantViolation("genus-zero characterization flags disagree");
  return r;
}

LocalDimension local_dimension(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                               const Eigen::VectorXd& x0, double h) {
  const Eigen::VectorXd F0 = F(x0);
  const int n = static_cast<int>(x0.size());
  const int m = static_cast<int>(F0.size());
  Eigen::MatrixXd J(m, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = h;
    J.col(i) = (F(x0 + e) - F(x0 - e)) / (2.0 * h);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  LocalDimension out;
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-4 * smax && sv(i) > 1e-10) ++out.jacobian_rank;
  out.normal = svd.matrixV().leftCols(out.jacobian_rank).transpose();

  const double floor = 1e-12;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = svd.matrixV().col(i);
    const double e1 = (F(x0 + h * v) - F0).norm();
    const double e2 = (F(x0 + 0.5 * h * v) - F0).norm();
    const double ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::infinity();
    out.decay_ratios.push_back(ratio);
    if (e1 <= floor || ratio > 3.0) ++out.dimension;
  }
  return out;
}

Eigen::VectorXd eta_coords(const CurveSpec& spec) {
  Eigen::VectorXd x(2 * spec.genus);
  for (int j = 0; j < spec.genus; ++j) {
    x(2 * j) = spec.eta[j].real();
    x(2 * j + 1) = spec.eta[j].imag();
  }
  return x;
}

CurveSpec spec_from_coords(const Eigen::VectorXd& x) {
  CurveSpec s;
  s.genus = static_cast<int>(x.size() / 2);
  for (int j = 0; j < s.genus; ++j) s.eta.emplace_back(x(2 * j), x(2 * j + 1));
  return s;
}

ConditionProbe condition_probe(const SpectralCurve& curve, double tol, double fd_step, const QuadConfig& quad) {
  const PencilBasis pb = solve_Ba(curve, quad, kDefaultTol);
  const CPoly G = approx_gcd(pb.b1, pb.b2, tol);
  ConditionProbe out;
  out.gcd_degree = G.effective_degree(0.0);
  if (out.gcd_degree == 0) throw ValidationError("probe undefined off R^g");
  out.s1_roots = s1_gcd_roots(G, tol);
  out.c_gcd_degree_one = out.gcd_degree == 1;

  const Eigen::VectorXd x0 = eta_coords(curve.spec);
  std::set<int> seen;
  for (int i = 0; i < x0.size(); ++i)
    for (double sgn : {-1.0, 1.0}) {
      Eigen::VectorXd x = x0;
      x(i) += sgn * fd_step;
      try {
        const auto rep = classify(solve_Ba(build_curve(spec_from_coords(x)), quad));
        if (rep.stratum == Stratum::V) seen.insert(rep.winding_arg);
      } catch (const ValidationError&) {
      } catch (const ResolutionError&) {
      }
    }
  out.star_windings.assign(seen.begin(), seen.end());
  out.b_two_components = out.star_windings.size() >= 2;

  if (out.s1_roots.empty()) return out;
  const cplx l0 = out.s1_roots.front();
  auto nearest = [&](const CPoly& b) {
    cplx best = 0.0;
    double dist = std::numeric_limits<double>::infinity();
    for (cplx r : roots(b)) {
      if (std::abs(r - l0) < dist) {
        dist = std::abs(r - l0);
        best = r;
      }
    }
    return best;
  };
  auto pencil_at = [&](const Eigen::VectorXd& x) { return solve_Ba(build_curve(spec_from_coords(x)), quad); };
  auto F_R = [&](const Eigen::VectorXd& x) {
    const PencilBasis p = pencil_at(x);
    Eigen::VectorXd r(1);
    r(0) = std::arg(nearest(p.b1) / nearest(p.b2));
    return r;
  };
  auto F_S = [&](const Eigen::VectorXd& x) {
    const PencilBasis p = pencil_at(x);
    const cplx u = p.b1(l0), v = p.b2(l0);
    Eigen::VectorXd r(4);
    r << u.real(), u.imag(), v.real(), v.imag();
    return r;
  };
  out.r_dimension = local_dimension(F_R, x0, fd_step).dimension;
  out.s_dimension = local_dimension(F_S, x0, fd_step).dimension;
  out.r_dimension_fine = local_dimension(F_R, x0, 0.1 * fd_step).dimension;
  out.s_dimension_fine = local_dimension(F_S, x0, 0.1 * fd_step).dimension;
  return out;
}

CurveSpec bisect_to_wall(const CurveSpec& from, const CurveSpec& to, const QuadConfig& quad, double tol,
                         int iterations) {
  if (from.genus != to.genus) throw ValidationError("bisection endpoints differ in genus");
  const Eigen::VectorXd x0 = eta_coords(from), x1 = eta_coords(to);
  auto at = [&](double s) { return spec_from_coords((1.0 - s) * x0 + s * x1); };
  auto report = [&](double s) { return classify(solve_Ba(build_curve(at(s), tol), quad, tol), tol); };
  const InvariantReport r0 = report(0.0), r1 = report(1.0);
  if (r0.gcd_degree > 0) return from;
  if (r1.gcd_degree > 0) return to;
  if (r0.winding_arg == r1.winding_arg) throw ValidationError("bisection endpoints lie in the same V_j");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    InvariantReport rm;
    try {
      rm = report(mid);
    } catch (const ResolutionError&) {
      return at(mid);  // boundary root: already on the wall at tolerance
    }
    if (rm.gcd_degree > 0) return at(mid);
    (rm.winding_arg == r0.winding_arg ? lo : hi) = mid;
  }
  for (double s : {lo, hi})
    if (report(s).gcd_degree > 0) return at(s);
  throw ResolutionError("bisection did not reach a common root");
}

}  // namespace cmcspec
