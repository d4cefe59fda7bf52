#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmcspec/grassmann.hpp"
#include "cmcspec/whitham.hpp"

namespace cmcspec {

inline constexpr int kSchemaVersion = 1;

struct SpecFile {
  CurveSpec spec;
  std::optional<double> tol;
  std::optional<int> quad_nodes;
  std::optional<double> quad_tol;
};

// Field errors name the offending field.
SpecFile parse_curve_spec(const nlohmann::json& j);
SpecFile load_curve_spec(const std::string& path);
nlohmann::json curve_spec_json(const CurveSpec& spec);

GrPlane parse_plane(const nlohmann::json& j);
GrPlane load_plane(const std::string& path);
nlohmann::json plane_json(const GrPlane& plane);

nlohmann::json cplx_json(cplx z);
nlohmann::json poly_json(const CPoly& p);
nlohmann::json report_json(const InvariantReport& rep, const CurveSpec& spec);
nlohmann::json period_records(const std::vector<cplx>& values, const std::string& prefix);

// "c0,c1,c2" with each entry either a real number or re:im / re+imj.
CPoly parse_q(const std::string& text);

struct ScanRow {
  int index = 0;
  CurveSpec spec;
  std::optional<InvariantReport> report;
  double kernel_gap = 0.0;
  double max_re_b_period = 0.0;
  std::string status = "ok";  // ok | validation | resolution | invariant
  std::string message;
};

// η uniform in area on 0.05 ≤ |η| ≤ 0.95 with pairwise separation ≥ min_sep (roots and mirrors).
std::vector<CurveSpec> scan_specs(int genus, int samples, std::uint64_t seed, double min_sep = 0.02);
ScanRow scan_one(int index, const CurveSpec& spec, const QuadConfig& quad, double tol);
std::vector<ScanRow> run_scan(const std::vector<CurveSpec>& specs, int workers, const QuadConfig& quad, double tol);
std::string scan_csv(int genus, const std::vector<ScanRow>& rows);
nlohmann::json scan_json(int genus, const std::vector<ScanRow>& rows);

std::string flow_csv(const FlowResult& res);

}  // namespace cmcspec
