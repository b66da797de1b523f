#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "monomap/extension.hpp"
#include "monomap/fixed_points.hpp"
#include "monomap/stability.hpp"

namespace monomap {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const MapSpec& map);
Json to_json(const DomainSpec& domain);
Json to_json(const ExtendedMap& ext);
Json to_json(const ExtensionAudit& audit);
Json to_json(const FixedPointReport& report);
Json to_json(const InvarianceResult& inv);
Json to_json(const ChainPair& chains);
Json to_json(const Eq7Report& r);
Json to_json(const Eq8LineFamily& r);
Json to_json(const StabilityCertificate& cert);

/// Top-level document: {"schema_version", "kind", ...body}.
Json document(const std::string& kind, Json body);

std::string certificate_markdown(const StabilityCertificate& cert);

/// chain,iteration,s0..s{d-1},step_norm
std::string chains_csv(const ChainPair& chains);
/// orbit,n,x_n,x_prev  for each kept orbit prefix
std::string orbits_csv(const std::vector<std::vector<double>>& traces);

std::string pieces_svg(const ExtendedMap& ext);
/// Ω, orbit traces as (x_n, x_{n-1}) polylines, equilibria and marked points.
std::string phase_svg(const DomainSpec& domain, const std::vector<std::vector<double>>& traces,
                      const std::vector<double>& equilibria, const std::vector<Point2>& marks);

/// Truncates and writes; ConfigError when the file cannot be opened.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace monomap
