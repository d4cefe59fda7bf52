#include "cmcspec/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cmcspec {

namespace {

constexpr double kPi = std::numbers::pi;

double seg_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double s = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

std::string fmt(cplx z) {
  std::ostringstream os;
  os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
  return os.str();
}

cplx pick_sign(cplx prev, cplx r) { return std::abs(r - prev) <= std::abs(r + prev) ? r : -r; }

}  // namespace

SpectralCurve build_curve(const CurveSpec& spec, double tol, const CurveLimits& lim) {
  const int g = spec.genus;
  if (g < 0) throw ValidationError("genus must be nonnegative");
  if (static_cast<int>(spec.eta.size()) != g)
    throw ValidationError("eta must list exactly genus roots");
  for (cplx e : spec.eta) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) throw ValidationError("non-finite root");
    if (std::abs(e) == 0.0) throw ValidationError("root at origin violates punctured disc");
    if (std::abs(e) >= 1.0) throw ValidationError("root " + fmt(e) + " on or outside unit circle violates H^g");
  }

  SpectralCurve c;
  c.spec = spec;
  c.branch_points.push_back(0.0);
  for (cplx e : spec.eta) c.branch_points.push_back(e);
  for (cplx e : spec.eta) c.branch_points.push_back(1.0 / std::conj(e));
  for (std::size_t i = 0; i < c.branch_points.size(); ++i)
    for (std::size_t j = i + 1; j < c.branch_points.size(); ++j)
      if (std::abs(c.branch_points[i] - c.branch_points[j]) < lim.min_separation)
        throw ValidationError("coincident roots " + fmt(c.branch_points[i]) + " and " +
                              fmt(c.branch_points[j]) + " violate distinct-root condition");

  CPoly a(std::vector<cplx>{g % 2 == 0 ? 1.0 : -1.0});
  for (cplx e : spec.eta) {
    const cplx u = std::conj(e) / std::abs(e);
    const cplx m = 1.0 / std::conj(e);
    a = a * CPoly(std::vector<cplx>{u * e * m, -u * (e + m), u});
  }
  c.a = a;

  const auto rr = reality_check(conj(a), 1e3 * tol * std::max(1.0, a.norm_inf()));
  {
    // conj(ρ*a) = a is the same coefficient condition as reality_check on a.
    const auto direct = reality_check(a, 1e3 * tol * std::max(1.0, a.norm_inf()));
    if (!rr.is_real || !direct.is_real) throw ValidationError("reality condition on a fails");
  }
  if (std::abs(std::abs(a.lead()) - 1.0) > 1e3 * tol)
    throw ValidationError("leading coefficient of a is not unimodular");

  double scale = 0.0;
  for (auto x : a.coeffs()) scale += std::abs(x);
  for (int k = 0; k < lim.positivity_samples; ++k) {
    const cplx l = std::polar(1.0, 2.0 * kPi * k / lim.positivity_samples);
    const cplx v = a(l) * std::pow(l, -g);
    if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e3 * tol * scale)
      throw ValidationError("positivity of λ^{-g} a on S¹ fails");
  }

  double rmin = 1.0;
  for (cplx e : spec.eta) rmin = std::min(rmin, std::abs(e));
  c.inner_radius = 0.5 * rmin;

  // B and γ run along the ray from the detour circle through η_j to 1/conj(η_j).
  for (int j = 0; j < g; ++j) {
    const cplx e = spec.eta[j];
    const cplx dir = e / std::abs(e);
    const cplx lo = c.inner_radius * dir;
    const cplx hi = 1.0 / std::conj(e);
    for (std::size_t k = 1; k < c.branch_points.size(); ++k) {
      const cplx p = c.branch_points[k];
      if (p == e || p == hi) continue;
      if (seg_distance(p, lo, hi) < lim.ray_clearance)
        throw ValidationError("cut collision: branch point " + fmt(p) + " lies on the cut through " + fmt(e));
    }
    c.cuts.push_back({e, hi, std::arg(e), false});
  }

  double mean = 0.0;
  if (g > 0) {
    cplx s = 0.0;
    for (cplx e : spec.eta) s += e / std::abs(e);
    mean = std::abs(s) > 1e-12 ? std::arg(s) : std::arg(spec.eta[0]) + 0.5;
  }
  double base = mean + kPi;
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool clear = true;
    for (const auto& cut : c.cuts) {
      double d = std::remainder(base - cut.angle, 2.0 * kPi);
      if (std::abs(d) < 1e-3) clear = false;
    }
    if (clear) break;
    base += 0.1;
  }
  c.base_angle = std::remainder(base, 2.0 * kPi);
  c.cuts.push_back({0.0, std::polar(std::numeric_limits<double>::infinity(), c.base_angle), c.base_angle, true});
  return c;
}

RootTracker::RootTracker(std::function<cplx(double)> z, double t0, cplx root0)
    : z_(std::move(z)), t_(t0), z_cur_(z_(t0)), root_(root0) {}

cplx RootTracker::step(double t0, cplx z0, cplx r0, double t1, cplx z1, int depth) {
  if (std::abs(z1) == 0.0) throw ResolutionError("continuation hit a branch point");
  if ((z1 * std::conj(z0)).real() > 0.0) return pick_sign(r0, std::sqrt(z1));
  if (depth > 60) throw ResolutionError("continuation failed to resolve near a branch point");
  const double tm = 0.5 * (t0 + t1);
  const cplx zm = z_(tm);
  const cplx rm = step(t0, z0, r0, tm, zm, depth + 1);
  return step(tm, zm, rm, t1, z1, depth + 1);
}

cplx RootTracker::advance(double t) {
  const cplx z1 = z_(t);
  root_ = step(t_, z_cur_, root_, t, z1, 0);
  t_ = t;
  z_cur_ = z1;
  return root_;
}

SheetPath y_along(const SpectralCurve& curve, const std::vector<cplx>& polyline, int seed_sign, double margin) {
  if (polyline.empty()) throw ValidationError("empty path");
  if (seed_sign != 1 && seed_sign != -1) throw ValidationError("seed_sign must be ±1");
  for (std::size_t k = 0; k < polyline.size(); ++k)
    for (cplx p : curve.branch_points) {
      const double d = k + 1 < polyline.size() ? seg_distance(p, polyline[k], polyline[k + 1])
                                               : std::abs(p - polyline[k]);
      if (d < margin) throw ValidationError("path passes within margin of branch point " + fmt(p));
    }

  SheetPath out;
  out.sheet_seed = seed_sign;
  cplx y = static_cast<double>(seed_sign) * std::sqrt(curve.y2(polyline[0]));
  out.points.push_back(polyline[0]);
  out.y_values.push_back(y);

  // Recursive insertion keeps |Δ arg(λa)| < π/2 between stored neighbours.
  std::function<void(cplx, cplx, cplx, cplx, int)> refine = [&](cplx p0, cplx z0, cplx p1, cplx z1, int depth) {
    if ((z1 * std::conj(z0)).real() > 0.0 &&
        std::abs(std::arg(z1 / z0)) < 0.5 * kPi) {
      y = pick_sign(y, std::sqrt(z1));
      out.points.push_back(p1);
      out.y_values.push_back(y);
      return;
    }
    if (depth > 60) throw ResolutionError("path refinement did not resolve the argument of λa");
    const cplx pm = 0.5 * (p0 + p1);
    const cplx zm = curve.y2(pm);
    refine(p0, z0, pm, zm, depth + 1);
    refine(pm, zm, p1, z1, depth + 1);
  };
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k)
    refine(polyline[k], curve.y2(polyline[k]), polyline[k + 1], curve.y2(polyline[k + 1]), 0);
  return out;
}

HomologyBasis homology_cycles(const SpectralCurve& curve) {
  HomologyBasis h;
  for (int j = 0; j < curve.genus(); ++j) {
    h.A.push_back({CycleKind::A, j, curve.spec.eta[j]});
    h.B.push_back({CycleKind::B, j, curve.spec.eta[j]});
  }
  return h;
}

Cycle sym_cycle(const SpectralCurve& curve, cplx lambda0, double margin) {
  if (std::abs(std::abs(lambda0) - 1.0) > 1e-9) throw ValidationError("Sym point must lie on S¹");
  const cplx lo = curve.inner_radius * lambda0;
  for (std::size_t k = 1; k < curve.branch_points.size(); ++k) {
    const cplx p = curve.branch_points[k];
    if (seg_distance(p, lo, lambda0) < margin)
      throw ValidationError("Sym path at " + fmt(lambda0) + " collides with the cut through " + fmt(p) +
                            "; rotate the cut or move λ₀");
  }
  return {CycleKind::Sym, -1, lambda0};
}

SheetPath trace_cycle(const SpectralCurve& curve, const Cycle& cycle, int samples) {
  std::vector<cplx> poly;
  const double r0 = curve.inner_radius;
  if (cycle.kind == CycleKind::A) {
    // Thin log-polar rectangle around the cut.
    const cplx e = cycle.anchor;
    const double th = std::arg(e);
    const double U = -std::log(std::abs(e));
    const double w = 1e-2;
    for (int k = 0; k <= samples; ++k) poly.push_back(std::exp(cplx(-1.3 * U + 2.6 * U * k / samples, th - w)));
    for (int k = 0; k <= samples; ++k) poly.push_back(std::exp(cplx(1.3 * U - 2.6 * U * k / samples, th + w)));
    poly.push_back(poly.front());
    return y_along(curve, poly, 1);
  }
  const cplx start = cycle.anchor;
  const double th = std::arg(start);
  // Start just off the branch point for B; γ starts on S¹ on the negative sheet.
  const cplx first = cycle.kind == CycleKind::B ? start * (1.0 - 1e-4) : start;
  for (int k = 0; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    poly.push_back(first * std::pow(r0 / std::abs(first), s));
  }
  for (int k = 1; k <= samples; ++k) poly.push_back(std::polar(r0, th + 2.0 * kPi * k / samples));
  for (int k = 1; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    poly.push_back(r0 * std::polar(1.0, th) * std::pow(std::abs(first) / r0, s));
  }
  return y_along(curve, poly, cycle.kind == CycleKind::Sym ? -1 : 1, 1e-6 * r0);
}

}  // namespace cmcspec
