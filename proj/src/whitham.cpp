#include "cmcspec/whitham.hpp"

#include <algorithm>
#include <cmath>

namespace cmcspec {

namespace {

const cplx kI(0.0, 1.0);
const CPoly kLambda(std::vector<cplx>{0.0, 1.0});

// Columns of the real matrix of a real-linear map from real coordinates to complex coefficients.
Eigen::MatrixXd realify(const std::function<std::vector<cplx>(const std::vector<double>&)>& map, int n) {
  std::vector<double> e(n, 0.0);
  e[0] = 1.0;
  const int rows = static_cast<int>(map(e).size());
  Eigen::MatrixXd M(2 * rows, n);
  for (int k = 0; k < n; ++k) {
    std::fill(e.begin(), e.end(), 0.0);
    e[k] = 1.0;
    const auto v = map(e);
    for (int r = 0; r < rows; ++r) {
      M(r, k) = v[r].real();
      M(rows + r, k) = v[r].imag();
    }
  }
  return M;
}

Eigen::VectorXd realify(const std::vector<cplx>& v) {
  const int rows = static_cast<int>(v.size());
  Eigen::VectorXd out(2 * rows);
  for (int r = 0; r < rows; ++r) {
    out(r) = v[r].real();
    out(rows + r) = v[r].imag();
  }
  return out;
}

std::vector<cplx> padded(const CPoly& p, int d) { return p.with_degree(d).coeffs(); }

double rel(const CPoly& residual, std::initializer_list<double> scales) {
  double s = 0.0;
  for (double x : scales) s = std::max(s, x);
  return s > 0.0 ? residual.norm_inf() / s : 0.0;
}

std::vector<double> span_of(const std::vector<double>& x, int offset, int n) {
  return std::vector<double>(x.begin() + offset, x.begin() + offset + n);
}

// Right-hand side of the derivative equation: i(2λac' - ac - λa'c).
CPoly whitham_rhs(const CPoly& a, const CPoly& c) {
  const CPoly da = a.derivative();
  return kI * (2.0 * (kLambda * a * c.derivative()) - a * c - kLambda * da * c);
}

void check_common_root(const CPoly& a, const CPoly& b1, const CPoly& b2, double tol) {
  const CPoly G = approx_gcd(b1, b2, tol);
  if (G.effective_degree(0.0) == 0) return;
  double scale = 0.0;
  for (cplx r : roots(G, tol)) {
    scale = 0.0;
    for (int k = 0; k <= a.degree(); ++k) scale += std::abs(a[k]) * std::pow(std::abs(r), k);
    if (std::abs(a(r)) <= std::sqrt(tol) * scale) throw ValidationError("nonunique tangent: a, b1, b2 share a root");
  }
}

WhithamTangent tangent_for(const CPoly& a, const CPoly& b1, const CPoly& b2, const CPoly& Q, double tol,
                           std::optional<BezoutFreedom> freedom) {
  check_common_root(a, b1, b2, tol);
  WhithamTangent t;
  std::tie(t.c1, t.c2) = bezout_solve(a, b1, b2, Q, tol, freedom);
  t.Q = Q;
  const int da = a.degree();
  const int db = b1.degree();
  const int na = real_dim(da), nb = real_dim(db);
  const int deq = da + db;
  const cplx L = a.lead();

  auto map = [&](const std::vector<double>& x) {
    const CPoly ad = from_real_coords(span_of(x, 0, na), da);
    const CPoly d1 = from_real_coords(span_of(x, na, nb), db);
    const CPoly d2 = from_real_coords(span_of(x, na + nb, nb), db);
    std::vector<cplx> out = padded(2.0 * (a * d1) - ad * b1, deq);
    const auto e2 = padded(2.0 * (a * d2) - ad * b2, deq);
    out.insert(out.end(), e2.begin(), e2.end());
    // Gauge d|lead a|/dt = 0, weighted to the size of the other rows.
    out.push_back(cplx((std::conj(L) * ad[da]).real() * std::max(1.0, a.norm_inf()), 0.0));
    return out;
  };
  Eigen::MatrixXd M = realify(map, na + 2 * nb);
  std::vector<cplx> rhs = padded(whitham_rhs(a, t.c1), deq);
  const auto r2 = padded(whitham_rhs(a, t.c2), deq);
  rhs.insert(rhs.end(), r2.begin(), r2.end());
  rhs.push_back(0.0);
  const Eigen::VectorXd y = realify(rhs);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0)) throw ValidationError("nonunique tangent: Whitham system is singular");
  const Eigen::VectorXd x = svd.solve(y);
  std::vector<double> xs(x.data(), x.data() + x.size());
  t.a_dot = from_real_coords(span_of(xs, 0, na), da);
  t.b1_dot = from_real_coords(span_of(xs, na, nb), db);
  t.b2_dot = from_real_coords(span_of(xs, na + nb, nb), db);
  whitham_residuals(a, b1, b2, t);
  if (t.bezout_residual > 1e-9 || t.derivative_residual > 1e-9 || t.compatibility_residual > 1e-9)
    throw ResolutionError("Whitham residuals exceed 1e-9: bezout " + std::to_string(t.bezout_residual) +
                          ", derivative " + std::to_string(t.derivative_residual) + ", compatibility " +
                          std::to_string(t.compatibility_residual));
  return t;
}

}  // namespace

std::pair<CPoly, CPoly> bezout_solve(const CPoly& a, const CPoly& b1, const CPoly& b2, const CPoly& Q, double tol,
                                     std::optional<BezoutFreedom> freedom) {
  if (Q.degree() != 2) throw ValidationError("Q must have formal degree 2");
  if (!reality_check(Q, tol * std::max(1.0, Q.norm_inf())).is_real) throw ValidationError("Q is not ρ-real");
  const int db = b1.degree();
  const int deq = a.degree() + 2;
  if (deq != 2 * db) throw ValidationError("degree mismatch between a and the pencil");

  const CPoly G = approx_gcd(b1, b2, tol);
  const std::vector<cplx> groots = G.effective_degree(0.0) > 0 ? roots(G, tol) : std::vector<cplx>{};
  if (Q.norm_inf() > 0.0)
    for (cplx r : groots) {
      double scale = 0.0;
      for (int k = 0; k <= 2; ++k) scale += std::abs(Q[k]) * std::pow(std::abs(r), k);
      if (std::abs(Q(r)) > std::sqrt(tol) * scale)
        throw ValidationError("no Whitham direction: Q not divisible by gcd(B_a)");
    }

  const int nb = real_dim(db);
  auto map = [&](const std::vector<double>& x) {
    const CPoly c1 = from_real_coords(span_of(x, 0, nb), db);
    const CPoly c2 = from_real_coords(span_of(x, nb, nb), db);
    return padded(c1 * b2 - c2 * b1, deq);
  };
  const Eigen::MatrixXd M = realify(map, 2 * nb);
  const CPoly Qa = Q * a;
  const Eigen::VectorXd y = realify(padded(Qa, deq));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd x = svd.solve(y);
  std::vector<double> xs(x.data(), x.data() + x.size());
  CPoly c1 = from_real_coords(span_of(xs, 0, nb), db);
  CPoly c2 = from_real_coords(span_of(xs, nb, nb), db);
  const double res = rel(c1 * b2 - c2 * b1 - Qa, {(c1 * b2).norm_inf(), (c2 * b1).norm_inf(), Qa.norm_inf()});
  if (res > 1e-9) throw ValidationError("no Whitham direction: Q not divisible by gcd(B_a)");

  if (freedom) {
    c1 += freedom->A * b1;
    c2 += freedom->A * b2;
    if (freedom->B != 0.0) {
      const auto s1 = s1_gcd_roots(G, tol);
      if (G.effective_degree(0.0) != 1 || s1.size() != 1)
        throw ValidationError("B freedom needs gcd(B_a) of degree 1 on S¹");
      const cplx l0 = s1.front();
      const CPoly lin(std::vector<cplx>{kI * l0, kI});
      c1 += freedom->B * (lin * deflate(b1, l0)).with_degree(db);
      c2 += freedom->B * (lin * deflate(b2, l0)).with_degree(db);
    }
  }
  return {c1, c2};
}

void whitham_residuals(const CPoly& a, const CPoly& b1, const CPoly& b2, WhithamTangent& t) {
  const CPoly Qa = t.Q * a;
  t.bezout_residual = rel(t.c1 * b2 - t.c2 * b1 - Qa,
                          {(t.c1 * b2).norm_inf(), (t.c2 * b1).norm_inf(), Qa.norm_inf(), a.norm_inf() * 1e-300});
  double dres = 0.0;
  const CPoly* bs[2] = {&b1, &b2};
  const CPoly* cs[2] = {&t.c1, &t.c2};
  const CPoly* ds[2] = {&t.b1_dot, &t.b2_dot};
  const CPoly da = a.derivative();
  for (int k = 0; k < 2; ++k) {
    const CPoly lhs = 2.0 * (a * *ds[k]) - t.a_dot * *bs[k];
    const CPoly rhs = whitham_rhs(a, *cs[k]);
    dres = std::max(dres, rel(lhs - rhs, {lhs.norm_inf(), (kLambda * a * cs[k]->derivative()).norm_inf(),
                                          (a * *cs[k]).norm_inf(), (kLambda * da * *cs[k]).norm_inf(),
                                          (t.a_dot * *bs[k]).norm_inf()}));
  }
  t.derivative_residual = dres;
  const CPoly w = kI * (kLambda * (t.c1.derivative() * t.c2 - t.c2.derivative() * t.c1));
  const CPoly m = t.c1 * t.b2_dot - t.c2 * t.b1_dot;
  const CPoly aq = t.a_dot * t.Q;
  t.compatibility_residual =
      rel(2.0 * (w + m) - aq, {2.0 * w.norm_inf(), 2.0 * (t.c1 * t.b2_dot).norm_inf(),
                               2.0 * (t.c2 * t.b1_dot).norm_inf(), aq.norm_inf()});
}

WhithamTangent whitham_tangent(const PencilBasis& basis, const CPoly& Q, double tol,
                               std::optional<BezoutFreedom> freedom) {
  return tangent_for(basis.curve.a, basis.b1, basis.b2, Q, tol, freedom);
}

WhithamTangent rotation_tangent(const PencilBasis& basis) {
  const CPoly& a = basis.curve.a;
  const int g = basis.curve.genus();
  WhithamTangent t;
  t.a_dot = kI * (kLambda * a.derivative()).with_degree(a.degree()) - cplx(0.0, g) * a;
  const cplx mu(0.0, -0.5 * (g + 1));
  t.b1_dot = kI * (kLambda * basis.b1.derivative()).with_degree(basis.b1.degree()) + mu * basis.b1;
  t.b2_dot = kI * (kLambda * basis.b2.derivative()).with_degree(basis.b2.degree()) + mu * basis.b2;
  t.c1 = basis.b1;
  t.c2 = basis.b2;
  t.Q = CPoly::zero(2);
  whitham_residuals(a, basis.b1, basis.b2, t);
  return t;
}

std::vector<cplx> critical_points(const CPoly& b1, const CPoly& b2, double tol) {
  const CPoly W = b1.derivative() * b2 - b1 * b2.derivative();
  if (W.norm_inf() == 0.0) return {};
  return roots(W, tol);
}

HandleDeformation attach_handle(const SpectralCurve& curve, const CPoly& b, cplx alpha, int sqrt_choice, double t,
                                const QuadConfig& quad, double tol) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-12) throw ValidationError("α must lie on S¹");
  if (sqrt_choice != 1 && sqrt_choice != -1) throw ValidationError("sqrt_choice must be ±1");
  if (t == 0.0) throw ValidationError("nodal curve: a_0 has a double root on S¹ and is not in H^{g+1}");
  validate_diff(curve, b, tol);

  HandleDeformation h;
  h.alpha = alpha;
  h.sqrt_alpha_bar = static_cast<double>(sqrt_choice) * std::sqrt(std::conj(alpha));
  h.t = t;
  // Sign chosen so that λ^{-(g+1)} a_t > 0 on S¹; equals the curve built from η ∪ {α e^{-|t|}}.
  const CPoly fac(std::vector<cplx>{alpha, -(std::exp(t) + std::exp(-t)), std::conj(alpha)});
  h.a_t = -1.0 * (fac * curve.a);

  CurveSpec spec = curve.spec;
  spec.genus += 1;
  spec.eta.push_back(alpha * std::exp(-std::abs(t)));
  h.curve = build_curve(spec, tol);
  if ((h.curve.a - h.a_t).norm_inf() > 1e3 * tol * std::max(1.0, h.a_t.norm_inf()))
    throw InvariantViolation("handle polynomial disagrees with the curve built from its roots");
  h.basis = solve_Ba(h.curve, quad, tol);
  h.b_t = pencil_element(h.basis, -kI * alpha * h.sqrt_alpha_bar * b(0.0));
  return h;
}

HandleCheck handle_invariant_check(const PencilBasis& basis, cplx alpha, double t, const QuadConfig& quad,
                                   double tol) {
  const InvariantReport before = classify(basis, tol);
  if (before.gcd_degree != 0) throw ValidationError("handle check needs a curve off R^g");
  const CPoly W = basis.b1.derivative() * basis.b2 - basis.b1 * basis.b2.derivative();
  double wscale = 0.0;
  for (auto c : W.coeffs()) wscale += std::abs(c);
  if (std::abs(W(alpha)) <= 10.0 * tol * wscale) throw ValidationError("α is a critical point of f");

  HandleCheck hc;
  hc.deformation = attach_handle(basis.curve, basis.b1, alpha, 1, t, quad, tol);
  // b1, b2 of the new curve have roots O(t²) apart near α; the gcd pairing threshold √tol must resolve them.
  const double tol_after = std::max(1e-15, std::min(tol, 1e-4 * std::pow(t, 4)));
  const InvariantReport after = classify(hc.deformation.basis, tol_after);
  hc.deg_f_before = before.deg_f;
  hc.deg_f_after = after.deg_f;
  hc.winding_before = before.winding_arg;
  hc.winding_after = after.winding_arg;
  hc.rate_at_alpha = f_tilde_rate(basis.b1, basis.b2, alpha);

  auto on_circle = [](const std::vector<cplx>& rs) {
    std::vector<cplx> out;
    for (cplx r : rs)
      if (std::abs(std::abs(r) - 1.0) < 1e-6) out.push_back(r);
    return out;
  };
  const auto crit0 = on_circle(critical_points(basis.b1, basis.b2, tol));
  double radius = 0.5;
  for (cplx r : crit0) radius = std::min(radius, 0.5 * std::abs(r - alpha));
  for (cplx r : on_circle(critical_points(hc.deformation.basis.b1, hc.deformation.basis.b2, tol)))
    if (std::abs(r - alpha) < radius) hc.new_s1_critical_points.push_back(r);

  auto both = [](int lhs, int rhs) { return std::to_string(lhs) + " vs " + std::to_string(rhs); };
  if (hc.deg_f_after != hc.deg_f_before + 1)
    throw InvariantViolation("degree law deg(f_t) = deg(f) + 1 fails: " + both(hc.deg_f_after, hc.deg_f_before + 1));
  const int jump = hc.rate_at_alpha > 0.0 ? -1 : 1;
  if (hc.winding_after != hc.winding_before + jump)
    throw InvariantViolation("winding jump fails: " + both(hc.winding_after, hc.winding_before + jump));
  if (hc.new_s1_critical_points.size() != 2 ||
      std::abs(hc.new_s1_critical_points[0] - hc.new_s1_critical_points[1]) < 1e-9)
    throw InvariantViolation("expected two simple new S¹ critical points near α, found " +
                             std::to_string(hc.new_s1_critical_points.size()));
  return hc;
}

double FlowResult::max_drift() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.drift);
  return m;
}

namespace {

using StateVec = Eigen::VectorXcd;

StateVec pack(const FlowState& s) {
  StateVec v(s.eta.size() + 2);
  for (std::size_t j = 0; j < s.eta.size(); ++j) v(j) = s.eta[j];
  v(s.eta.size()) = s.z1;
  v(s.eta.size() + 1) = s.z2;
  return v;
}

FlowState unpack(const StateVec& v) {
  FlowState s;
  const int g = static_cast<int>(v.size()) - 2;
  for (int j = 0; j < g; ++j) s.eta.push_back(v(j));
  s.z1 = v(g);
  s.z2 = v(g + 1);
  return s;
}

struct Frame {
  PencilBasis basis;
  CPoly f1, f2;
};

Frame frame_at(const FlowState& s, const QuadConfig& quad, double tol) {
  Frame f{solve_Ba(build_curve({static_cast<int>(s.eta.size()), s.eta}, tol), quad, tol), {}, {}};
  f.f1 = pencil_element(f.basis, s.z1);
  f.f2 = pencil_element(f.basis, s.z2);
  return f;
}

}  // namespace

FlowResult flow(const SpectralCurve& curve, const QSelector& Qsel, double dt, int steps, const QuadConfig& quad,
                double tol, std::optional<BezoutFreedom> freedom) {
  if (!(dt > 0.0) || steps < 0) throw ValidationError("flow needs dt > 0 and steps >= 0");
  FlowState s0{curve.spec.eta, 1.0, kI};

  auto rhs = [&](const StateVec& v, double t) {
    const FlowState s = unpack(v);
    const Frame fr = frame_at(s, quad, tol);
    const WhithamTangent w = tangent_for(fr.basis.curve.a, fr.f1, fr.f2, Qsel(s, t), tol, freedom);
    const CPoly& a = fr.basis.curve.a;
    const CPoly da = a.derivative();
    StateVec out(v.size());
    for (std::size_t j = 0; j < s.eta.size(); ++j) out(j) = -w.a_dot(s.eta[j]) / da(s.eta[j]);
    out(s.eta.size()) = w.b1_dot(0.0);
    out(s.eta.size() + 1) = w.b2_dot(0.0);
    return out;
  };
  auto rk4 = [&](const StateVec& v, double t, double h) {
    const StateVec k1 = rhs(v, t);
    const StateVec k2 = rhs(v + 0.5 * h * k1, t + 0.5 * h);
    const StateVec k3 = rhs(v + 0.5 * h * k2, t + 0.5 * h);
    const StateVec k4 = rhs(v + h * k3, t + h);
    return StateVec(v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  auto record = [&](const FlowState& s, double t, const FlowRecord* first) {
    const Frame fr = frame_at(s, quad, tol);
    FlowRecord r{t, s, b_periods(fr.basis.rules, fr.f1), b_periods(fr.basis.rules, fr.f2), 0.0};
    if (first)
      for (std::size_t j = 0; j < r.periods1.size(); ++j)
        r.drift = std::max({r.drift, std::abs(r.periods1[j] - first->periods1[j]),
                            std::abs(r.periods2[j] - first->periods2[j])});
    return r;
  };

  FlowResult res;
  rhs(pack(s0), 0.0);  // input errors at the start surface directly
  res.records.push_back(record(s0, 0.0, nullptr));
  StateVec v = pack(s0);
  double t = 0.0;
  for (int n = 0; n < steps; ++n) {
    const FlowRecord& prev = res.records.back();
    bool done = false;
    std::string why;
    for (int halvings = 0; halvings <= 8 && !done; ++halvings) {
      const int sub = 1 << halvings;
      const double h = dt / sub;
      try {
        StateVec w = v;
        for (int k = 0; k < sub; ++k) w = rk4(w, t + k * h, h);
        FlowRecord r = record(unpack(w), t + dt, &res.records.front());
        double step_drift = 0.0;
        for (std::size_t j = 0; j < r.periods1.size(); ++j)
          step_drift = std::max({step_drift, std::abs(r.periods1[j] - prev.periods1[j]),
                                 std::abs(r.periods2[j] - prev.periods2[j])});
        if (step_drift > 10.0 * tol) {
          why = "period drift " + std::to_string(step_drift) + " across a step";
          continue;
        }
        v = w;
        t += dt;
        res.records.push_back(std::move(r));
        done = true;
      } catch (const ValidationError& e) {
        why = e.what();
      } catch (const ResolutionError& e) {
        why = e.what();
      }
    }
    if (!done) {
      res.aborted = true;
      res.message = "step " + std::to_string(n) + " rejected after 8 halvings: " + why;
      break;
    }
  }
  return res;
}

}  // namespace cmcspec
