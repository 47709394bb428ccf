#pragma once

// JSON encodings of the model types and reports. Parsers throw DomainError
// on malformed input; encoders are the exact inverse so an emitted config
// parses back to the same model.

#include <json.hpp>

#include "thickobs/constants.hpp"
#include "thickobs/geometry.hpp"
#include "thickobs/observability.hpp"
#include "thickobs/sequences.hpp"

namespace thickobs {

using Json = nlohmann::ordered_json;

WeightModel weight_from_json(const Json& j);
Json to_json(const WeightModel& w);

/// {"family": "power_factorial"|"weight_induced"|"explicit", "params": {...}}
SequenceModel sequence_from_json(const Json& j);
Json to_json(const SequenceModel& m);

RegionModel region_from_json(const Json& j);
Json to_json(const RegionModel& r);

/// constant and power densities only
DensityModel density_from_json(const Json& j);
Json to_json(const DensityModel& d);

MultiIndex multi_index_from_json(const Json& j, int d);
Json to_json(const MultiIndex& a);

GSParams gs_params_from_json(const Json& j);
Json to_json(const GSParams& g);

GramianQuadrature gramian_quadrature_from_json(const Json& j);
Json to_json(const GramianQuadrature& q);

Json to_json(const BangDegree& b);
Json to_json(const QAReport& r);
Json to_json(const HypothesisReport& r);
Json to_json(const ConstantReport& r);
Json to_json(const DissipationFit& f);

/// Encodes non-finite doubles as the strings "inf", "-inf", "nan".
Json json_number(double v);

// Typed field access with DomainError on absence or type mismatch.
const Json& require(const Json& j, const char* key);
double get_double(const Json& j, const char* key);
double get_double(const Json& j, const char* key, double fallback);
int get_int(const Json& j, const char* key);
int get_int(const Json& j, const char* key, int fallback);
std::vector<double> get_doubles(const Json& j, const char* key);

}  // namespace thickobs
