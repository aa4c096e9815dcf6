#pragma once

#include <string>

#include "json.hpp"
#include "pwhyp/attractor_io.hpp"
#include "pwhyp/cone_verifier.hpp"
#include "pwhyp/curve_engine.hpp"
#include "pwhyp/dimension.hpp"
#include "pwhyp/map_model.hpp"
#include "pwhyp/transversality.hpp"

namespace pwhyp {

using Json = nlohmann::json;

inline constexpr const char* kMapSchema = "pwhyp.map/1";

/// Builds a map from its JSON description. Accepts "preset" (figure,
/// figure_half_lambda, rho_zero, remark) with optional field overrides, or
/// an explicit "kind". Throws ConfigError for malformed input; map
/// validation errors keep their own kind.
MapSpec map_from_json(const Json& j);
Json map_to_json(const MapSpec& spec);
std::string hash_hex(std::uint64_t h);

Json to_json(const Cone& c);
Json to_json(const ConeCertificate& c);
Json to_json(const MultiplicityCertificate& c);
Json to_json(const TransversalityReport& r);
Json to_json(const ConditionTReport& r);
Json to_json(const LyapunovEstimate& e);
Json to_json(const DimensionReport& r);
Json to_json(const EnergyEstimate& e);
Json to_json(const GrowthLog& log);
Json to_json(const MultiplicityEstimate& e);

/// Serializes with two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace pwhyp
