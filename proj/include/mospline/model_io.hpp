#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mospline/curve.hpp"
#include "mospline/surface.hpp"
#include "mospline/tessellate.hpp"

namespace mospline {

struct Metadata {
  std::string name;
  std::string created;
  std::string modified;
  bool operator==(const Metadata&) const = default;
};

/**
 * Unit of persistence and API exchange: one curve or one surface plus
 * metadata. Fields the reader does not know are kept in the `extra_*`
 * objects and written back out unchanged.
 */
struct ModelDocument {
  std::string id;
  Metadata metadata;
  std::variant<CurveDesc, SurfaceDesc> payload;

  nlohmann::json extra = nlohmann::json::object();
  nlohmann::json extra_metadata = nlohmann::json::object();
  nlohmann::json extra_payload = nlohmann::json::object();

  bool is_curve() const { return std::holds_alternative<CurveDesc>(payload); }
  const CurveDesc& curve() const { return std::get<CurveDesc>(payload); }
  const SurfaceDesc& surface() const { return std::get<SurfaceDesc>(payload); }
  std::string kind() const { return is_curve() ? "curve" : "surface"; }

  bool operator==(const ModelDocument&) const = default;
};

/// Parses and validates. Throws ParseError whose path names the offending
/// location ("payload/nodes/3", "id", ...) for malformed JSON, schema
/// violations, and validation errors.
ModelDocument parse_model(std::string_view bytes);
ModelDocument model_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelDocument& doc);

/// Canonical bytes: sorted keys, reals printed with 17 significant digits.
std::string serialize_model(const ModelDocument& doc);

/// Canonical rendering of an arbitrary JSON value (same rules as above).
std::string canonical_json(const nlohmann::json& j);

/// Diagnostics for whichever payload the document carries.
Diagnostics validate_model(const ModelDocument& doc);

/// JSON Schema describing the document format.
const std::string& model_schema();

// Fixtures -----------------------------------------------------------------

using FixtureParams = std::map<std::string, double>;

std::vector<std::string> fixture_names();

/**
 * Built-in models with the node, order and weight choices of the worked
 * examples: star5_linear, star5_cubic, hexagon, weighted_hexagon_03,
 * weighted_hexagon_3, bottle, polygon20 (params a, k), tshape,
 * ring (params s_gap, t_gap), tunnel.
 * Throws InvalidArgument("unknown-fixture") for other names.
 */
ModelDocument make_fixture(std::string_view name, const FixtureParams& params = {});

/// "name" or "name?key=value&key=value".
ModelDocument make_fixture_spec(std::string_view spec);

// Wire formats -------------------------------------------------------------

nlohmann::json to_json(const Diagnostics& diags);
nlohmann::json to_json(const FeatureReport& report);
nlohmann::json to_json(const Polyline& polyline);
nlohmann::json to_json(const QuadMesh& mesh);
nlohmann::json point_to_json(const Vec3& p, int dimension);

}  // namespace mospline
