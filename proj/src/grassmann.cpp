#include "cmcspec/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cmcspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd flat(const GrPlane& p) {
  Eigen::VectorXd x(2 * p.genus);
  for (int j = 0; j < p.genus; ++j) {
    x(j) = p.M(j, 0);
    x(p.genus + j) = p.M(j, 1);
  }
  return x;
}

GrPlane unflat(int g, const Eigen::VectorXd& x) {
  GrPlane p{g, Eigen::MatrixXd(g, 2)};
  for (int j = 0; j < g; ++j) {
    p.M(j, 0) = x(j);
    p.M(j, 1) = x(g + j);
  }
  return p;
}

cplx nearest_root(const CPoly& b, cplx target) {
  cplx best = 0.0;
  double dist = std::numeric_limits<double>::infinity();
  for (cplx r : roots(b)) {
    if (std::abs(r - target) < dist) {
      dist = std::abs(r - target);
      best = r;
    }
  }
  return best;
}

// Largest ratio between consecutive singular values; returns the rank at that gap or -1.
int gap_rank(const Eigen::VectorXd& sv, double gap) {
  const int n = static_cast<int>(sv.size());
  if (n == 0 || sv(0) <= 1e-13) return 0;
  if (sv(n - 1) >= sv(0) / gap) return n;
  for (int i = 0; i + 1 < n; ++i)
    if (sv(i + 1) == 0.0 || sv(i) / sv(i + 1) >= gap) return i + 1;
  return -1;
}

}  // namespace

std::pair<CPoly, CPoly> plane_basis(const GrPlane& plane) {
  const int g = plane.genus;
  if (plane.M.rows() != g || plane.M.cols() != 2) throw ValidationError("plane matrix must be g×2");
  std::vector<double> x1{1.0, 0.0}, x2{0.0, 1.0};
  for (int j = 0; j < g; ++j) {
    x1.push_back(plane.M(j, 0));
    x2.push_back(plane.M(j, 1));
  }
  return {from_real_coords(x1, g + 1), from_real_coords(x2, g + 1)};
}

GrPlane plane_from_span(const CPoly& p, const CPoly& q) {
  const int d = p.degree();
  if (q.degree() != d || d < 1) throw ValidationError("span needs two polynomials of equal degree g+1 ≥ 1");
  Eigen::Matrix2d V;
  V << p[0].real(), q[0].real(), p[0].imag(), q[0].imag();
  if (std::abs(V.determinant()) < 1e-12 * std::max(1.0, p.norm_inf() * q.norm_inf()))
    throw ValidationError("plane meets {b(0) = 0}");
  const Eigen::Matrix2d C = V.inverse();
  const CPoly b1 = C(0, 0) * p + C(1, 0) * q;
  const CPoly b2 = C(0, 1) * p + C(1, 1) * q;
  const auto x1 = real_coords(b1), x2 = real_coords(b2);
  GrPlane out{d - 1, Eigen::MatrixXd(d - 1, 2)};
  for (int j = 0; j < d - 1; ++j) {
    out.M(j, 0) = x1[2 + j];
    out.M(j, 1) = x2[2 + j];
  }
  return out;
}

GrClass gr_classify(const GrPlane& plane, double tol) {
  const auto [b1, b2] = plane_basis(plane);
  const CPoly G = approx_gcd(b1, b2, tol);
  GrClass c;
  c.gcd_degree = G.effective_degree(0.0);
  if (c.gcd_degree > 0) {
    c.gcd_roots = roots(G, tol);
    c.s1_roots = s1_gcd_roots(G, tol);
  }
  c.in_R = c.gcd_degree > 0;
  c.in_S = !c.s1_roots.empty();
  return c;
}

template <class Rng>
CPoly random_real_poly(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(d + 1);
  for (auto& v : x) v = u(rng);
  return from_real_coords(x, d);
}
template CPoly random_real_poly<std::mt19937_64>(int, std::mt19937_64&);

CPoly s1_factor(double theta) {
  const cplx c = cplx(0.0, 1.0) * std::polar(1.0, -0.5 * theta);
  return CPoly(std::vector<cplx>{-c * std::polar(1.0, theta), c});
}

CPoly pair_factor(cplx r) {
  if (std::abs(r) == 0.0) throw ValidationError("pair factor needs r ≠ 0");
  return CPoly(std::vector<cplx>{r, -(std::norm(r) + 1.0), std::conj(r)});
}

GrPlane plane_with_gcd(int genus, const CPoly& common, unsigned seed) {
  const int k = common.degree();
  if (k > genus + 1) throw ValidationError("common factor degree exceeds g+1");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const CPoly q1 = random_real_poly(genus + 1 - k, rng);
    const CPoly q2 = random_real_poly(genus + 1 - k, rng);
    try {
      GrPlane p = plane_from_span(common * q1, common * q2);
      if (gr_classify(p).gcd_degree == k) return p;
    } catch (const ValidationError&) {
    }
  }
  throw ResolutionError("could not build a plane with the requested gcd");
}

StratumProbe stratum_dimension_probe(const GrPlane& plane, double radius, double tol) {
  const GrClass cls = gr_classify(plane, tol);
  if (!cls.in_R) throw ValidationError("plane is not on R^g (gcd degree 0)");
  const int g = plane.genus;
  StratumProbe out;
  out.gcd_degree = cls.gcd_degree;
  out.s1_roots = cls.s1_roots;

  // One residual per ρ-orbit: S¹ roots stay on S¹ (angle mismatch), others pair with 1/conj(r).
  struct Orbit {
    cplx root;
    bool on_s1;
  };
  std::vector<Orbit> orbits;
  for (cplx r : cls.s1_roots) orbits.push_back({r, true});
  for (cplx r : cls.gcd_roots) {
    const bool s1 = std::any_of(cls.s1_roots.begin(), cls.s1_roots.end(),
                                [&](cplx s) { return std::abs(s - r) < 1e-6; });
    if (!s1 && std::abs(r) < 1.0) orbits.push_back({r, false});
  }
  out.sheets = static_cast<int>(orbits.size());

  const Eigen::VectorXd x0 = flat(plane);
  std::vector<Eigen::MatrixXd> normals;
  int dim = 0, dim_fine = 0;
  for (const Orbit& o : orbits) {
    // Track two elements of the plane whose root at the orbit is best isolated.
    const auto [q1, q2] = plane_basis(plane);
    auto isolation = [&](double phi) {
      double d = std::numeric_limits<double>::infinity();
      const CPoly b = std::cos(phi) * q1 + std::sin(phi) * q2;
      const auto rs = roots(b);
      const cplx own = nearest_root(b, o.root);
      for (cplx r : rs)
        if (r != own) d = std::min(d, std::abs(r - o.root));
      return d;
    };
    constexpr int kAngles = 36;
    std::vector<double> score(kAngles);
    for (int k = 0; k < kAngles; ++k) score[k] = isolation(kPi * k / kAngles);
    const int k1 = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
    int k2 = -1;
    for (int k = 0; k < kAngles; ++k) {
      const int sep = std::min((k - k1 + kAngles) % kAngles, (k1 - k + kAngles) % kAngles);
      if (sep >= kAngles / 4 && (k2 < 0 || score[k] > score[k2])) k2 = k;
    }
    const double phi1 = kPi * k1 / kAngles, phi2 = kPi * k2 / kAngles;
    auto F = [&](const Eigen::VectorXd& x) {
      const auto [p1, p2] = plane_basis(unflat(g, x));
      const CPoly b1 = std::cos(phi1) * p1 + std::sin(phi1) * p2;
      const CPoly b2 = std::cos(phi2) * p1 + std::sin(phi2) * p2;
      const cplx r1 = nearest_root(b1, o.root), r2 = nearest_root(b2, o.root);
      if (o.on_s1) {
        Eigen::VectorXd v(1);
        v(0) = std::arg(r1 / r2);
        return v;
      }
      Eigen::VectorXd v(2);
      v << (r1 - r2).real(), (r1 - r2).imag();
      return v;
    };
    const LocalDimension ld = local_dimension(F, x0, radius);
    const LocalDimension fine = local_dimension(F, x0, 0.1 * radius);
    out.sheet_dimensions.push_back(ld.dimension);
    dim = std::max(dim, ld.dimension);
    dim_fine = std::max(dim_fine, fine.dimension);
    normals.push_back(ld.normal);
  }
  out.dimension = dim;
  out.dimension_fine = dim_fine;
  out.normal_overlap = 0.0;
  for (std::size_t i = 0; i < normals.size(); ++i)
    for (std::size_t j = i + 1; j < normals.size(); ++j) {
      if (normals[i].rows() == 0 || normals[j].rows() == 0) continue;
      const Eigen::MatrixXd cross = normals[i] * normals[j].transpose();
      out.normal_overlap = std::max(out.normal_overlap, cross.cwiseAbs().maxCoeff());
    }
  if (normals.size() == 1) out.normal_overlap = 1.0;
  out.singular = out.sheets >= 2 && out.normal_overlap < 1.0 - 1e-6;
  return out;
}

GrPlane B_map(const PencilBasis& basis) {
  const int g = basis.curve.genus();
  const auto x1 = real_coords(basis.b1), x2 = real_coords(basis.b2);
  GrPlane p{g, Eigen::MatrixXd(g, 2)};
  for (int j = 0; j < g; ++j) {
    p.M(j, 0) = x1[2 + j];
    p.M(j, 1) = x2[2 + j];
  }
  return p;
}

GrPlane B_map(const SpectralCurve& curve, const QuadConfig& quad, double tol) {
  return B_map(solve_Ba(curve, quad, tol));
}

ImmersionRank immersion_rank(const SpectralCurve& curve, double fd_step, const QuadConfig& quad, double tol) {
  const int g = curve.genus();
  ImmersionRank out;
  if (g == 0) return out;
  const Eigen::VectorXd x0 = eta_coords(curve.spec);
  auto M_at = [&](const Eigen::VectorXd& x) { return flat(B_map(build_curve(spec_from_coords(x), tol), quad, tol)); };
  auto jac = [&](double h) {
    Eigen::MatrixXd J(2 * g, 2 * g);
    for (int i = 0; i < 2 * g; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * g);
      e(i) = h;
      J.col(i) = (M_at(x0 + e) - M_at(x0 - e)) / (2.0 * h);
    }
    return Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
  };
  const Eigen::VectorXd s1 = jac(fd_step), s2 = jac(0.5 * fd_step);
  out.singular_values.assign(s1.data(), s1.data() + s1.size());
  out.singular_values_half.assign(s2.data(), s2.data() + s2.size());
  const int r1 = gap_rank(s1, 1e4), r2 = gap_rank(s2, 1e4);
  if (r1 < 0 || r1 != r2) throw ResolutionError("rank not resolved at fd_step");
  out.rank = r1;
  return out;
}

}  // namespace cmcspec
