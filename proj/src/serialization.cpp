#include "thickobs/serialization.hpp"

#include <cmath>

#include "thickobs/error.hpp"

namespace thickobs {

const Json& require(const Json& j, const char* key)
{
  if (!j.is_object()) throw DomainError(std::string("expected a JSON object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw DomainError(std::string("missing field '") + key + "'");
  return *it;
}

double get_double(const Json& j, const char* key)
{
  const Json& v = require(j, key);
  if (!v.is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double get_double(const Json& j, const char* key, double fallback)
{
  return j.is_object() && j.contains(key) ? get_double(j, key) : fallback;
}

int get_int(const Json& j, const char* key)
{
  const Json& v = require(j, key);
  if (!v.is_number_integer()) throw DomainError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

int get_int(const Json& j, const char* key, int fallback)
{
  return j.is_object() && j.contains(key) ? get_int(j, key) : fallback;
}

std::vector<double> get_doubles(const Json& j, const char* key)
{
  const Json& v = require(j, key);
  if (!v.is_array()) throw DomainError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw DomainError(std::string("field '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

namespace {

std::string get_string(const Json& j, const char* key)
{
  const Json& v = require(j, key);
  if (!v.is_string()) throw DomainError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Json json_number(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

// ---------------------------------------------------------------------------

WeightModel weight_from_json(const Json& j)
{
  const std::string kind = get_string(j, "kind");
  WeightModel w;
  if (kind == "linear") w = WeightModel::linear();
  else if (kind == "power") w = WeightModel::power(get_double(j, "s"));
  else if (kind == "bertrand") w = WeightModel::bertrand(get_int(j, "k"), get_double(j, "s", 1.0));
  else if (kind == "tabulated") w = WeightModel::tabulated(get_doubles(j, "nodes"), get_doubles(j, "values"));
  else throw DomainError("unknown weight kind '" + kind + "'");
  w.validate();
  return w;
}

Json to_json(const WeightModel& w)
{
  Json j;
  j["kind"] = to_string(w.kind);
  switch (w.kind) {
    case WeightModel::Kind::linear: break;
    case WeightModel::Kind::power: j["s"] = w.s; break;
    case WeightModel::Kind::bertrand:
      j["k"] = w.k;
      j["s"] = w.s;
      break;
    case WeightModel::Kind::tabulated:
      j["nodes"] = w.nodes;
      j["values"] = w.values;
      break;
  }
  return j;
}

SequenceModel sequence_from_json(const Json& j)
{
  const std::string family = get_string(j, "family");
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  const double sigma = get_double(params, "sigma", 1.0);
  SequenceModel m = SequenceModel::constant_one();
  if (family == "power_factorial") {
    m = SequenceModel::power_factorial(get_double(params, "A", 1.0), get_double(params, "s"));
  } else if (family == "constant") {
    m = SequenceModel::constant_one();
  } else if (family == "weight_induced") {
    m = SequenceModel::weight_induced(weight_from_json(require(params, "weight")));
  } else if (family == "explicit") {
    if (params.contains("log_values")) m = SequenceModel::explicit_log(get_doubles(params, "log_values"));
    else m = SequenceModel::explicit_values(get_doubles(params, "values"));
  } else {
    throw DomainError("unknown sequence family '" + family + "'");
  }
  return sigma == 1.0 ? m : m.powered(sigma);
}

Json to_json(const SequenceModel& m)
{
  Json j;
  Json p = Json::object();
  switch (m.family()) {
    case SequenceModel::Family::power_factorial:
      j["family"] = "power_factorial";
      p["A"] = m.A();
      p["s"] = m.s();
      break;
    case SequenceModel::Family::weight_induced:
      j["family"] = "weight_induced";
      p["weight"] = to_json(m.weight());
      break;
    case SequenceModel::Family::explicit_table:
      j["family"] = "explicit";
      p["log_values"] = m.table();
      break;
  }
  if (m.exponent() != 1.0) p["sigma"] = m.exponent();
  j["params"] = p;
  return j;
}

RegionModel region_from_json(const Json& j)
{
  const std::string st = get_string(j, "structure");
  if (st == "complement") return RegionModel::complement(region_from_json(require(j, "inner")));
  if (st == "half_space") return RegionModel::half_space(get_doubles(j, "normal"), get_double(j, "offset"));
  const int dim = get_int(j, "dim");
  if (st == "all_space") return RegionModel::all_space(dim);
  if (st == "empty") return RegionModel::empty(dim);
  if (st == "periodic_1d")
    return RegionModel::periodic_1d(dim, get_double(j, "period", 1.0), get_double(j, "a"), get_double(j, "b"),
                                    get_int(j, "axis", 0));
  if (st == "box_union") {
    const Json& bs = require(j, "boxes");
    if (!bs.is_array()) throw DomainError("field 'boxes' must be an array");
    std::vector<RegionModel::Box> boxes;
    for (const auto& b : bs) boxes.push_back({get_doubles(b, "lo"), get_doubles(b, "hi")});
    return RegionModel::box_union(dim, std::move(boxes));
  }
  throw DomainError("unknown region structure '" + st + "'");
}

Json to_json(const RegionModel& r)
{
  Json j;
  j["structure"] = to_string(r.structure());
  switch (r.structure()) {
    case RegionModel::Structure::complement:
      j["inner"] = to_json(r.inner());
      return j;
    case RegionModel::Structure::half_space:
      j["normal"] = r.normal();
      j["offset"] = r.offset();
      return j;
    default: break;
  }
  j["dim"] = r.dim();
  if (r.structure() == RegionModel::Structure::periodic_1d) {
    j["period"] = r.period();
    j["a"] = r.keep_lo();
    j["b"] = r.keep_hi();
    j["axis"] = r.axis();
  } else if (r.structure() == RegionModel::Structure::box_union) {
    Json bs = Json::array();
    for (const auto& b : r.boxes()) bs.push_back({{"lo", b.lo}, {"hi", b.hi}});
    j["boxes"] = bs;
  }
  return j;
}

DensityModel density_from_json(const Json& j)
{
  const std::string kind = get_string(j, "kind");
  DensityModel d;
  if (kind == "constant") d = DensityModel::constant(get_double(j, "m"));
  else if (kind == "power") d = DensityModel::power(get_double(j, "R"), get_double(j, "delta"));
  else throw DomainError("unsupported density kind '" + kind + "'");
  d.validate();
  return d;
}

Json to_json(const DensityModel& d)
{
  Json j;
  j["kind"] = to_string(d.kind);
  if (d.kind == DensityModel::Kind::constant) {
    j["m"] = d.m;
  } else if (d.kind == DensityModel::Kind::power) {
    j["R"] = d.R;
    j["delta"] = d.delta;
  } else {
    j["descriptor"] = d.descriptor;
  }
  return j;
}

MultiIndex multi_index_from_json(const Json& j, int d)
{
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw DomainError("multi-index must be an array of length " + std::to_string(d));
  std::vector<int> v;
  for (const auto& e : j) {
    if (!e.is_number_integer() || e.get<int>() < 0) throw DomainError("multi-index entries must be non-negative integers");
    v.push_back(e.get<int>());
  }
  return MultiIndex::from(v);
}

Json to_json(const MultiIndex& a)
{
  Json j = Json::array();
  for (int i = 0; i < a.d; ++i) j.push_back(a[i]);
  return j;
}

GSParams gs_params_from_json(const Json& j)
{
  GSParams g;
  g.mu = get_double(j, "mu", g.mu);
  g.nu = get_double(j, "nu", g.nu);
  g.delta = get_double(j, "delta", g.delta);
  g.A = get_double(j, "A", g.A);
  g.C = get_double(j, "C", g.C);
  g.r1 = get_double(j, "r1", g.r1);
  g.r2 = get_double(j, "r2", g.r2);
  g.t0 = get_double(j, "t0", g.t0);
  g.validate();
  return g;
}

Json to_json(const GSParams& g)
{
  return Json{{"mu", g.mu}, {"nu", g.nu}, {"delta", g.delta}, {"A", g.A},
              {"C", g.C},   {"r1", g.r1}, {"r2", g.r2},       {"t0", g.t0}};
}

GramianQuadrature gramian_quadrature_from_json(const Json& j)
{
  GramianQuadrature q;
  q.nodes_per_panel = get_int(j, "nodes_per_panel", q.nodes_per_panel);
  q.max_refinements = get_int(j, "max_refinements", q.max_refinements);
  q.target = get_double(j, "target", q.target);
  q.tolerance = get_double(j, "tolerance", q.tolerance);
  q.validate();
  return q;
}

Json to_json(const GramianQuadrature& q)
{
  return Json{{"nodes_per_panel", q.nodes_per_panel},
              {"max_refinements", q.max_refinements},
              {"target", q.target},
              {"tolerance", q.tolerance}};
}

// ---------------------------------------------------------------------------

Json to_json(const BangDegree& b)
{
  if (b.is_finite()) return b.value;
  return b.to_string();
}

namespace {

Json to_json(const H2Certificate& c)
{
  return Json{{"C_theta", json_number(c.C_theta)}, {"L_theta", json_number(c.L_theta)}, {"offset", json_number(c.offset)}};
}

}  // namespace

Json to_json(const QAReport& r)
{
  Json j;
  j["is_log_convex"] = r.is_log_convex;
  j["verdict"] = to_string(r.verdict);
  j["horizon"] = r.horizon;
  j["certificate"] = r.certificate;
  j["h2_constants"] = r.h2_constants ? to_json(*r.h2_constants) : Json(nullptr);
  Json ps = Json::array();
  for (double v : r.dc_partial_sums) ps.push_back(json_number(v));
  j["dc_partial_sums"] = ps;
  return j;
}

Json to_json(const HypothesisReport& r)
{
  Json j;
  j["s"] = r.s;
  j["h1"] = r.h1;
  j["h1_first_infinite"] = r.h1_first_infinite ? Json(*r.h1_first_infinite) : Json(nullptr);
  j["h2"] = to_string(r.h2);
  j["h2_constants"] = r.h2_constants ? to_json(*r.h2_constants) : Json(nullptr);
  j["h2_reason"] = r.h2_reason;
  j["h3"] = to_json(r.h3);
  return j;
}

Json to_json(const ConstantReport& r)
{
  Json j;
  j["name"] = r.name;
  Json in = Json::object();
  for (const auto& [k, v] : r.inputs) in[k] = v;
  j["inputs"] = in;
  j["log_value"] = json_number(r.log_value);
  j["linear_value"] = r.linear_value ? json_number(*r.linear_value) : Json(nullptr);
  j["regime"] = r.regime;
  j["citations"] = r.citations;
  Json fc = Json::object();
  for (const auto& [k, v] : r.fitted_constants) fc[k] = json_number(v);
  j["fitted_constants"] = fc;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const DissipationFit& f)
{
  Json j;
  j["C"] = json_number(f.C);
  j["logC"] = json_number(f.logC);
  j["r1"] = f.r1 ? json_number(*f.r1) : Json(nullptr);
  j["r2"] = json_number(f.r2);
  j["points"] = f.points;
  double worst = -std::numeric_limits<double>::infinity();
  for (double v : f.residuals) worst = std::max(worst, v);
  j["max_residual"] = json_number(worst);
  return j;
}

}  // namespace thickobs
