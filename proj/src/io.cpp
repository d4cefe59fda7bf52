#include "cmcspec/io.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace cmcspec {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError("field '" + field + "' must be a number");
  return j.get<double>();
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

SpecFile parse_curve_spec(const json& j) {
  if (!j.is_object()) throw ValidationError("curve spec must be a JSON object");
  if (!j.contains("genus") || !j["genus"].is_number_integer())
    throw ValidationError("field 'genus' must be a non-negative integer");
  SpecFile f;
  f.spec.genus = j["genus"].get<int>();
  if (f.spec.genus < 0) throw ValidationError("field 'genus' must be a non-negative integer");
  const json eta = j.value("eta", json::array());
  if (!eta.is_array()) throw ValidationError("field 'eta' must be a list of [re, im] pairs");
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const std::string name = "eta[" + std::to_string(k) + "]";
    if (!eta[k].is_array() || eta[k].size() != 2) throw ValidationError("field '" + name + "' must be [re, im]");
    f.spec.eta.emplace_back(number(eta[k][0], name), number(eta[k][1], name));
  }
  if (static_cast<int>(f.spec.eta.size()) != f.spec.genus)
    throw ValidationError("field 'eta' must have genus entries");
  if (j.contains("tol")) {
    const json& t = j["tol"];
    if (t.is_number()) {
      f.tol = t.get<double>();
    } else if (t.is_object()) {
      if (t.contains("tol")) f.tol = number(t["tol"], "tol.tol");
      if (t.contains("quad_nodes")) f.quad_nodes = static_cast<int>(number(t["quad_nodes"], "tol.quad_nodes"));
      if (t.contains("quad_tol")) f.quad_tol = number(t["quad_tol"], "tol.quad_tol");
    } else {
      throw ValidationError("field 'tol' must be a number or an object");
    }
  }
  return f;
}

SpecFile load_curve_spec(const std::string& path) { return parse_curve_spec(read_json(path)); }

json curve_spec_json(const CurveSpec& spec) {
  json eta = json::array();
  for (cplx e : spec.eta) eta.push_back({e.real(), e.imag()});
  return {{"genus", spec.genus}, {"eta", eta}};
}

GrPlane parse_plane(const json& j) {
  if (!j.is_object() || !j.contains("genus") || !j["genus"].is_number_integer())
    throw ValidationError("field 'genus' must be a non-negative integer");
  GrPlane p;
  p.genus = j["genus"].get<int>();
  if (p.genus < 0) throw ValidationError("field 'genus' must be a non-negative integer");
  const json M = j.value("M", json::array());
  if (!M.is_array() || static_cast<int>(M.size()) != p.genus)
    throw ValidationError("field 'M' must have genus rows of 2 numbers");
  p.M.resize(p.genus, 2);
  for (int r = 0; r < p.genus; ++r) {
    if (!M[r].is_array() || M[r].size() != 2) throw ValidationError("field 'M' must have genus rows of 2 numbers");
    for (int c = 0; c < 2; ++c) p.M(r, c) = number(M[r][c], "M");
  }
  return p;
}

GrPlane load_plane(const std::string& path) { return parse_plane(read_json(path)); }

json plane_json(const GrPlane& plane) {
  json M = json::array();
  for (int r = 0; r < plane.genus; ++r) M.push_back({plane.M(r, 0), plane.M(r, 1)});
  return {{"genus", plane.genus}, {"M", M}};
}

json cplx_json(cplx z) { return {z.real(), z.imag()}; }

json poly_json(const CPoly& p) {
  json out = json::array();
  for (cplx c : p.coeffs()) out.push_back(cplx_json(c));
  return out;
}

json report_json(const InvariantReport& rep, const CurveSpec& spec) {
  json gr = json::array(), s1 = json::array();
  for (cplx r : rep.gcd_roots) gr.push_back(cplx_json(r));
  for (cplx r : rep.s1_roots) s1.push_back(cplx_json(r));
  return {{"schema_version", kSchemaVersion},
          {"spec", curve_spec_json(spec)},
          {"genus", rep.genus},
          {"deg_f", rep.deg_f},
          {"gcd_degree", rep.gcd_degree},
          {"gcd_roots", gr},
          {"lambda0", s1},
          {"winding", rep.winding_arg},
          {"winding_roots", rep.winding_roots},
          {"stratum", rep.label()},
          {"genus0_flags", rep.genus0_flags},
          {"parity_ok", rep.parity_ok},
          {"range_ok", rep.range_ok},
          {"corollary_ok", rep.corollary_ok}};
}

json period_records(const std::vector<cplx>& values, const std::string& prefix) {
  json out = json::array();
  for (std::size_t k = 0; k < values.size(); ++k)
    out.push_back({{"cycle", prefix + std::to_string(k + 1)}, {"value_re", values[k].real()},
                   {"value_im", values[k].imag()}});
  return out;
}

CPoly parse_q(const std::string& text) {
  std::vector<cplx> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const auto colon = item.find(':');
      if (colon != std::string::npos) {
        c.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
      } else if (!item.empty() && (item.back() == 'j' || item.back() == 'i')) {
        // re+imj: split at the last sign that is not an exponent sign.
        std::size_t cut = std::string::npos;
        for (std::size_t k = item.size() - 1; k > 0; --k)
          if ((item[k] == '+' || item[k] == '-') && item[k - 1] != 'e' && item[k - 1] != 'E') {
            cut = k;
            break;
          }
        if (cut == std::string::npos)
          c.emplace_back(0.0, std::stod(item.substr(0, item.size() - 1)));
        else
          c.emplace_back(std::stod(item.substr(0, cut)), std::stod(item.substr(cut, item.size() - 1 - cut)));
      } else {
        c.emplace_back(std::stod(item), 0.0);
      }
    } catch (const std::logic_error&) {
      throw ValidationError("--q entry '" + item + "' is not a number");
    }
  }
  if (c.size() != 3) throw ValidationError("--q needs three coefficients c0,c1,c2");
  return CPoly(c);
}

std::vector<CurveSpec> scan_specs(int genus, int samples, std::uint64_t seed, double min_sep) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  constexpr double rmin = 0.05, rmax = 0.95;
  std::vector<CurveSpec> out;
  out.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    CurveSpec spec{genus, {}};
    while (static_cast<int>(spec.eta.size()) < genus) {
      const double r = std::sqrt(rmin * rmin + u(rng) * (rmax * rmax - rmin * rmin));
      const cplx e = std::polar(r, 2.0 * 3.14159265358979323846 * u(rng));
      bool ok = true;
      for (cplx f : spec.eta)
        ok = ok && std::abs(e - f) >= min_sep && std::abs(1.0 / std::conj(e) - 1.0 / std::conj(f)) >= min_sep &&
             std::abs(std::arg(e / f)) >= min_sep;
      if (ok) spec.eta.push_back(e);
    }
    out.push_back(std::move(spec));
  }
  return out;
}

ScanRow scan_one(int index, const CurveSpec& spec, const QuadConfig& quad, double tol) {
  ScanRow row;
  row.index = index;
  row.spec = spec;
  try {
    const PencilBasis pb = solve_Ba(build_curve(spec, tol), quad, tol);
    row.kernel_gap = pb.kernel_gap;
    for (const CPoly* b : {&pb.b1, &pb.b2})
      for (cplx p : b_periods(pb.rules, *b)) row.max_re_b_period = std::max(row.max_re_b_period, std::abs(p.real()));
    row.report = classify(pb, tol);
  } catch (const ValidationError& e) {
    row.status = "validation";
    row.message = e.what();
  } catch (const ResolutionError& e) {
    row.status = "resolution";
    row.message = e.what();
  } catch (const InvariantViolation& e) {
    row.status = "invariant";
    row.message = e.what();
  }
  return row;
}

std::vector<ScanRow> run_scan(const std::vector<CurveSpec>& specs, int workers, const QuadConfig& quad, double tol) {
  std::vector<ScanRow> rows(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < specs.size();)
      rows[k] = scan_one(static_cast<int>(k), specs[k], quad, tol);
  };
  const int n = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

std::string scan_csv(int genus, const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "# cmcspec scan csv v" << kSchemaVersion << " genus=" << genus << "\n";
  os << "index";
  for (int j = 1; j <= genus; ++j) os << ",eta" << j << "_re,eta" << j << "_im";
  os << ",deg_f,gcd_degree,winding,winding_roots,stratum,lambda0,kernel_gap,max_re_b_period,bounds_ok,status,message\n";
  std::map<std::string, int> occupancy;
  for (const ScanRow& r : rows) {
    os << r.index;
    for (cplx e : r.spec.eta) os << "," << fmt(e.real()) << "," << fmt(e.imag());
    if (r.report) {
      const auto& rep = *r.report;
      std::string l0;
      for (cplx z : rep.s1_roots) l0 += (l0.empty() ? "" : ";") + fmt(std::arg(z));
      os << "," << rep.deg_f << "," << rep.gcd_degree << "," << rep.winding_arg << "," << rep.winding_roots << ","
         << rep.label() << "," << l0 << "," << fmt(r.kernel_gap) << "," << fmt(r.max_re_b_period) << ","
         << (rep.winding_bounds_ok() ? 1 : 0);
      ++occupancy[rep.label()];
    } else {
      os << ",,,,,,,,,";
      ++occupancy["flagged"];
    }
    std::string msg = r.message;
    for (char& ch : msg)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    os << "," << r.status << "," << msg << "\n";
  }
  os << "# summary";
  for (const auto& [label, count] : occupancy) os << " " << label << "=" << count;
  os << "\n";
  return os.str();
}

json scan_json(int genus, const std::vector<ScanRow>& rows) {
  json out = {{"schema_version", kSchemaVersion}, {"genus", genus}, {"rows", json::array()}};
  std::map<std::string, int> occupancy;
  for (const ScanRow& r : rows) {
    json row = {{"index", r.index}, {"status", r.status}, {"message", r.message}};
    if (r.report) {
      row["report"] = report_json(*r.report, r.spec);
      row["kernel_gap"] = r.kernel_gap;
      row["max_re_b_period"] = r.max_re_b_period;
      ++occupancy[r.report->label()];
    } else {
      row["spec"] = curve_spec_json(r.spec);
      ++occupancy["flagged"];
    }
    out["rows"].push_back(row);
  }
  out["summary"] = occupancy;
  return out;
}

std::string flow_csv(const FlowResult& res) {
  std::ostringstream os;
  os << "# cmcspec flow csv v" << kSchemaVersion << (res.aborted ? " aborted: " + res.message : "") << "\n";
  const int g = res.records.empty() ? 0 : static_cast<int>(res.records.front().state.eta.size());
  os << "step,t";
  for (int j = 1; j <= g; ++j) os << ",eta" << j << "_re,eta" << j << "_im";
  os << ",z1_re,z1_im,z2_re,z2_im";
  for (int k = 1; k <= 2; ++k)
    for (int j = 1; j <= g; ++j) os << ",b" << k << "_B" << j << "_re,b" << k << "_B" << j << "_im";
  os << ",drift\n";
  for (std::size_t n = 0; n < res.records.size(); ++n) {
    const FlowRecord& r = res.records[n];
    os << n << "," << fmt(r.t);
    for (cplx e : r.state.eta) os << "," << fmt(e.real()) << "," << fmt(e.imag());
    os << "," << fmt(r.state.z1.real()) << "," << fmt(r.state.z1.imag()) << "," << fmt(r.state.z2.real()) << ","
       << fmt(r.state.z2.imag());
    for (const auto* P : {&r.periods1, &r.periods2})
      for (cplx p : *P) os << "," << fmt(p.real()) << "," << fmt(p.imag());
    os << "," << fmt(r.drift) << "\n";
  }
  return os.str();
}

}  // namespace cmcspec
