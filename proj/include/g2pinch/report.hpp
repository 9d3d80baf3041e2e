#pragma once

#include "g2pinch/families.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace g2pinch {

inline constexpr int kReportSchema = 1;

/// A structure to analyze together with a JSON echo of where it came from.
struct StructureInput {
  LieBracket mu;
  std::optional<AlmostAbelianSpec> spec;
  nlohmann::json echo;
};

/// Accepts {"dim": 7, "brackets": [{"i","j","k","c"}, ...]} (1-based, i < j) or
/// {"almost_abelian": {"complex": [[{"re","im"}, ...], ...]}} / {"almost_abelian": {"real6": [[...]]}}.
/// Malformed input throws ValidationError.
StructureInput parse_structure_json(const nlohmann::json& doc);

StructureInput structure_from_family(const std::string& family, const ParamMap& params);

/// "k=v,k=v"; repeated flags may be merged by the caller.
ParamMap parse_params(const std::string& text);

struct ReportOptions {
  double tol = 1e-9;
  std::uint64_t seed = 12345;
};

/// Full per-structure report. Throws InconsistencyError when dual routes or
/// the closed-structure identities disagree.
nlohmann::json analysis_report(const StructureInput& in, const ReportOptions& options = {});

/// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_number(double v);
std::string csv_number(const std::optional<double>& v);

void write_scan_csv(std::ostream& os, const ScanResult& r);
void write_flow_csv(std::ostream& os, const FlowResult& r);
void write_extremize_csv(std::ostream& os, const ExtremizeResult& r);

nlohmann::json scan_json(const std::string& family, const ScanResult& r, double tol);
nlohmann::json flow_json(const std::string& family, const FlowResult& r, double t_end);
nlohmann::json extremize_json(const std::string& family, const ExtremizeResult& r, Direction dir);

}  // namespace g2pinch
