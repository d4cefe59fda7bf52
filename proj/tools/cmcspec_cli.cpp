#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cmcspec/io.hpp"

using namespace cmcspec;
using nlohmann::json;

namespace {

struct Options {
  std::string spec, out, format;
  int genus = 1, samples = 100, steps = 100, maxden = 12, workers = 1;
  std::uint64_t seed = 1;
  int quad_nodes = 64;
  double quad_tol = 1e-10, tol = kDefaultTol, t = 1e-2, dt = 1e-3;
  std::optional<double> alpha_angle, bezout_a;
  std::string q = "0,0,0";
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + o.out);
  f << text;
}

void emit(const Options& o, const json& j) { emit(o, j.dump(2) + "\n"); }

struct Loaded {
  SpectralCurve curve;
  QuadConfig quad;
  double tol;
};

Loaded load(const Options& o) {
  if (o.spec.empty()) throw ValidationError("--spec is required");
  const SpecFile f = load_curve_spec(o.spec);
  Loaded l{{}, {o.quad_nodes, o.quad_tol, 16384}, f.tol.value_or(o.tol)};
  if (f.quad_nodes) l.quad.nodes = *f.quad_nodes;
  if (f.quad_tol) l.quad.tol = *f.quad_tol;
  l.curve = build_curve(f.spec, l.tol);
  return l;
}

void cmd_classify(const Options& o) {
  const Loaded l = load(o);
  const PencilBasis pb = solve_Ba(l.curve, l.quad, l.tol);
  const InvariantReport rep = classify(pb, l.tol);
  json j = report_json(rep, l.curve.spec);
  j["b1"] = poly_json(pb.b1);
  j["b2"] = poly_json(pb.b2);
  j["kernel_gap"] = pb.kernel_gap;
  spdlog::info("classified genus {} curve as {}", rep.genus, rep.label());
  emit(o, j);
}

void cmd_scan(const Options& o) {
  if (o.genus < 0 || o.genus > 4) throw ValidationError("--genus must be in 0..4");
  if (o.samples < 0) throw ValidationError("--samples must be non-negative");
  const auto specs = scan_specs(o.genus, o.samples, o.seed);
  const auto rows = run_scan(specs, o.workers, {o.quad_nodes, o.quad_tol, 16384}, o.tol);
  spdlog::info("scanned {} curves of genus {}", rows.size(), o.genus);
  if (o.format == "json")
    emit(o, scan_json(o.genus, rows));
  else
    emit(o, scan_csv(o.genus, rows));
}

void cmd_deform(const Options& o) {
  const Loaded l = load(o);
  const PencilBasis pb = solve_Ba(l.curve, l.quad, l.tol);
  const HandleCheck hc = handle_invariant_check(pb, std::polar(1.0, o.alpha_angle.value_or(0.0)), o.t, l.quad, l.tol);
  json crit = json::array();
  for (cplx z : hc.new_s1_critical_points) crit.push_back(cplx_json(z));
  emit(o, json{{"schema_version", kSchemaVersion},
               {"alpha", cplx_json(hc.deformation.alpha)},
               {"t", hc.deformation.t},
               {"deg_f_before", hc.deg_f_before},
               {"deg_f_after", hc.deg_f_after},
               {"winding_before", hc.winding_before},
               {"winding_after", hc.winding_after},
               {"rate_at_alpha", hc.rate_at_alpha},
               {"new_s1_critical_points", crit},
               {"a_t", poly_json(hc.deformation.a_t)},
               {"b_t", poly_json(hc.deformation.b_t)},
               {"curve", curve_spec_json(hc.deformation.curve.spec)},
               {"stratum_after", classify(hc.deformation.basis, l.tol).label()}});
}

void cmd_flow(const Options& o) {
  const Loaded l = load(o);
  const CPoly Q = parse_q(o.q);
  std::optional<BezoutFreedom> freedom;
  // Q ≡ 0 only admits the rotation orbit; the unit-speed member is the default there.
  const double A = o.bezout_a.value_or(Q.norm_inf() == 0.0 ? 1.0 : 0.0);
  if (A != 0.0) freedom = BezoutFreedom{A, 0.0};
  const FlowResult res = flow(l.curve, [&](const FlowState&, double) { return Q; }, o.dt, o.steps, l.quad, l.tol,
                              freedom);
  if (res.aborted) spdlog::warn("flow aborted: {}", res.message);
  spdlog::info("flow finished {} records, max drift {:.3e}", res.records.size(), res.max_drift());
  if (o.format == "json") {
    json recs = json::array();
    for (const auto& r : res.records)
      recs.push_back({{"t", r.t},
                      {"spec", curve_spec_json({static_cast<int>(r.state.eta.size()), r.state.eta})},
                      {"z1", cplx_json(r.state.z1)},
                      {"z2", cplx_json(r.state.z2)},
                      {"periods1", period_records(r.periods1, "B")},
                      {"periods2", period_records(r.periods2, "B")},
                      {"drift", r.drift}});
    emit(o, json{{"schema_version", kSchemaVersion}, {"aborted", res.aborted}, {"message", res.message},
                 {"records", recs}});
  } else {
    emit(o, flow_csv(res));
  }
  if (res.aborted) throw ResolutionError(res.message);
}

json probe_json(const GrPlane& plane, double tol) {
  const GrClass c = gr_classify(plane, tol);
  json s1 = json::array(), gr = json::array();
  for (cplx z : c.s1_roots) s1.push_back(cplx_json(z));
  for (cplx z : c.gcd_roots) gr.push_back(cplx_json(z));
  json j = {{"plane", plane_json(plane)}, {"gcd_degree", c.gcd_degree}, {"gcd_roots", gr},
            {"in_R", c.in_R},             {"in_S", c.in_S},             {"lambda0", s1}};
  if (c.in_R) {
    const StratumProbe p = stratum_dimension_probe(plane, 1e-3, tol);
    j["probe"] = {{"dimension", p.dimension},   {"dimension_fine", p.dimension_fine},
                  {"sheets", p.sheets},         {"sheet_dimensions", p.sheet_dimensions},
                  {"singular", p.singular},     {"normal_overlap", p.normal_overlap}};
  }
  return j;
}

void cmd_gr(const Options& o) {
  if (o.spec.empty()) throw ValidationError("--spec is required");
  std::ifstream in(o.spec);
  if (!in) throw ValidationError("cannot open " + o.spec);
  const json file = json::parse(in);
  json j = {{"schema_version", kSchemaVersion}};
  if (file.contains("M")) {
    j.update(probe_json(parse_plane(file), o.tol));
  } else {
    const Loaded l = load(o);
    const PencilBasis pb = solve_Ba(l.curve, l.quad, l.tol);
    j.update(probe_json(B_map(pb), l.tol));
    const InvariantReport rep = classify(pb, l.tol);
    j["classify_gcd_degree"] = rep.gcd_degree;
    j["immersion_rank"] = immersion_rank(l.curve, 1e-4, l.quad, l.tol).rank;
  }
  emit(o, j);
}

void cmd_periods(const Options& o) {
  const Loaded l = load(o);
  const PencilBasis pb = solve_Ba(l.curve, l.quad, l.tol);
  const InvariantReport rep = classify(pb, l.tol);
  std::vector<cplx> candidates;
  if (!rep.s1_roots.empty())
    candidates.push_back(rep.s1_roots.front());
  else if (o.alpha_angle)
    candidates.push_back(std::polar(1.0, *o.alpha_angle));
  else
    for (int k = 0; k < 16; ++k) candidates.push_back(std::polar(1.0, 2.0 * 3.14159265358979323846 * (k + 0.5) / 16));
  cplx lambda0 = candidates.front();
  Eigen::MatrixXd phi;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    try {
      lambda0 = candidates[k];
      phi = phi_map(pb, lambda0, l.quad);
      break;
    } catch (const ValidationError& e) {
      if (k + 1 == candidates.size()) throw;
      spdlog::debug("λ₀ = {} rejected: {}", std::arg(candidates[k]), e.what());
    }
  }
  json j = {{"schema_version", kSchemaVersion}, {"spec", curve_spec_json(l.curve.spec)}};
  for (const auto& [name, b] : {std::pair{"b1", &pb.b1}, std::pair{"b2", &pb.b2}}) {
    std::vector<cplx> A;
    for (double v : a_periods(pb.rules, *b, l.tol)) A.emplace_back(v, 0.0);
    j[name] = {{"coeffs", poly_json(*b)},
               {"A", period_records(A, "A")},
               {"B", period_records(b_periods(pb.rules, *b), "B")},
               {"sym", cplx_json(sym_integral(l.curve, *b, lambda0, l.quad))}};
  }
  json rows = json::array();
  for (int r = 0; r < phi.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < phi.cols(); ++c) row.push_back(phi(r, c));
    rows.push_back(row);
  }
  j["lambda0"] = cplx_json(lambda0);
  j["phi"] = rows;
  j["maxden"] = o.maxden;
  j["rational_plane_distance"] = rational_plane_distance(phi, o.maxden);
  emit(o, j);
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("cmcspec");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("SPECTRAL_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));

  CLI::App app{"spectral data toolkit for finite-type CMC planes"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--spec", o.spec, "curve spec (or plane file for gr)");
  app.add_option("--genus", o.genus);
  app.add_option("--samples", o.samples);
  app.add_option("--seed", o.seed);
  app.add_option("--out", o.out);
  app.add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--quad-nodes", o.quad_nodes);
  app.add_option("--quad-tol", o.quad_tol);
  app.add_option("--tol", o.tol);
  app.add_option("--alpha-angle", o.alpha_angle);
  app.add_option("--t", o.t);
  app.add_option("--q", o.q, "Q coefficients c0,c1,c2 (complex as re:im)");
  app.add_option("--dt", o.dt);
  app.add_option("--steps", o.steps);
  app.add_option("--maxden", o.maxden);
  app.add_option("--workers", o.workers);
  app.add_option("--bezout-a", o.bezout_a, "multiple of (b1, b2) added to the Bezout solution");

  app.add_subcommand("classify", "invariants of one curve")->callback([&] { cmd_classify(o); });
  app.add_subcommand("scan", "random moduli scan")->callback([&] { cmd_scan(o); });
  app.add_subcommand("deform", "handle attachment check")->callback([&] { cmd_deform(o); });
  app.add_subcommand("flow", "isoperiodic RK4 flow")->callback([&] { cmd_flow(o); });
  app.add_subcommand("gr", "Grassmannian classification and probes")->callback([&] { cmd_gr(o); });
  app.add_subcommand("periods", "periods and rational-plane proximity")->callback([&] { cmd_periods(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ValidationError& e) {
    spdlog::error("validation: {}", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
