#include "thickobs/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "thickobs/csv.hpp"
#include "thickobs/error.hpp"
#include "thickobs/parallel.hpp"

namespace thickobs {
namespace {

namespace fs = std::filesystem;

struct Context
{
  const Json& cfg;
  fs::path out;
  std::uint64_t seed;
};

void write_json(const fs::path& p, const Json& j) { atomic_write(p, j.dump(2) + "\n"); }

std::vector<double> doubles_or(const Json& j, const char* key, std::vector<double> fallback)
{
  return j.contains(key) ? get_doubles(j, key) : fallback;
}

bool get_bool(const Json& j, const char* key, bool fallback)
{
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw DomainError(std::string("field '") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

std::string string_or(const Json& j, const char* key, const std::string& fallback)
{
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw DomainError(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> points_from_json(const Json& j, int d)
{
  if (!j.is_array()) throw DomainError("points must be an array of coordinate arrays");
  std::vector<double> out;
  for (const auto& p : j) {
    if (!p.is_array() || static_cast<int>(p.size()) != d)
      throw DomainError("every point must have " + std::to_string(d) + " coordinates");
    for (const auto& v : p) {
      if (!v.is_number()) throw DomainError("point coordinates must be numbers");
      out.push_back(v.get<double>());
    }
  }
  return out;
}

// log N_{p,q} = (p + q) log A + a log p! + b log q!
LogDoubleSequence double_sequence_from_json(const Json& j)
{
  const double A = get_double(j, "A", 1.0);
  const double a = get_double(j, "p_exponent", 0.0);
  const double b = get_double(j, "q_exponent", 0.0);
  if (!(A > 0.0) || a < 0.0 || b < 0.0) throw DomainError("N_{p,q}: A must be positive and exponents >= 0");
  return [=](int p, int q) {
    return (p + q) * std::log(A) + a * std::lgamma(p + 1.0) + b * std::lgamma(q + 1.0);
  };
}

HermiteExpansion expansion_from_json(const Json& j, std::uint64_t seed)
{
  if (j.contains("csv")) return expansion_from_csv(read_file(require(j, "csv").get<std::string>()));
  const int d = get_int(j, "d");
  const int N = get_int(j, "N");
  if (j.contains("coeffs")) return HermiteExpansion::from_coeffs(d, N, get_doubles(j, "coeffs"));
  return HermiteExpansion::random_unit(d, N, seed, static_cast<std::uint64_t>(get_int(j, "stream", 0)));
}

// ---------------------------------------------------------------------------

void cmd_seq_analyze(const Context& c)
{
  const Json& cfg = c.cfg;
  const auto P = static_cast<std::size_t>(get_int(cfg, "P", 200));
  if (P < 1) throw DomainError("seq-analyze: P must be >= 1");
  Json report;
  report["seed"] = c.seed;
  SequenceModel m = SequenceModel::constant_one();
  if (cfg.contains("weight")) {
    const WeightModel w = weight_from_json(cfg.at("weight"));
    const double s = get_double(cfg, "s", 1.0);
    const HypothesisReport h = check_hypotheses(w, s, P);
    report["weight"] = to_json(w);
    report["hypotheses"] = to_json(h);
    m = SequenceModel::weight_induced(w);
    if (s != 1.0) m = m.powered(s);
  } else {
    m = sequence_from_json(require(cfg, "sequence"));
  }
  report["sequence"] = to_json(m);
  report["describe"] = m.describe();
  const auto convex = is_log_convex(m, std::min<std::size_t>(P, m.max_index().value_or(P)));
  report["is_log_convex"] = convex.ok;
  if (convex.ok) {
    report["qa_report"] = to_json(denjoy_carleman_diagnostic(m, P));
    const auto gp = std::min<std::size_t>(P, m.max_index() ? *m.max_index() - 1 : P);
    if (gp >= 1) {
      const GammaValues g = gamma_Gamma(m, gp);
      report["gamma"] = {{"p", gp}, {"gamma", json_number(g.gamma)}, {"log_Gamma", json_number(g.log_Gamma)}};
    }
  } else {
    report["qa_report"] = nullptr;
    report["first_violation"] = *convex.first_violation;
  }

  const auto ts = doubles_or(cfg, "t_grid", {1.0});
  const auto rs = doubles_or(cfg, "r_grid", {1.0, 2.0, 3.0});
  std::vector<std::string> cells(ts.size() * rs.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    cells[i] = bang_degree(m, ts[i / rs.size()], rs[i % rs.size()]).to_string();
  });
  CsvBuilder csv({"t", "r", "bang"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    csv.cell(ts[i / rs.size()]).cell(rs[i % rs.size()]).cell(cells[i]);
    csv.end_row();
  }
  atomic_write(c.out / "bang.csv", csv.str());
  write_json(c.out / "qa_report.json", report);
}

void cmd_thickness(const Context& c)
{
  const Json& cfg = c.cfg;
  const RegionModel omega = region_from_json(require(cfg, "region"));
  const DensityModel rho = density_from_json(require(cfg, "density"));
  const int d = omega.dim();
  ThicknessProbe probe;
  if (cfg.contains("centers")) {
    probe.centers = points_from_json(cfg.at("centers"), d);
  } else {
    const Json& g = require(cfg, "grid");
    probe.centers = ThicknessProbe::grid(d, get_double(g, "lo"), get_double(g, "hi"), get_int(g, "count"));
  }
  const int samples = get_int(cfg, "samples", 10000);
  if (samples < 1) throw DomainError("thickness: samples must be >= 1");
  probe.samples = static_cast<std::size_t>(samples);
  probe.seed = c.seed;
  const std::string method = string_or(cfg, "method", "automatic");
  if (method == "automatic") probe.method = ThicknessProbe::Method::automatic;
  else if (method == "exact") probe.method = ThicknessProbe::Method::exact;
  else if (method == "monte_carlo") probe.method = ThicknessProbe::Method::monte_carlo;
  else throw DomainError("thickness: unknown method '" + method + "'");
  const std::string sampler = string_or(cfg, "sampler", "pseudo");
  if (sampler == "pseudo") probe.sampler = ThicknessProbe::Sampler::pseudo;
  else if (sampler == "halton") probe.sampler = ThicknessProbe::Sampler::halton;
  else throw DomainError("thickness: unknown sampler '" + sampler + "'");

  const ThicknessResult r = thickness_estimate(omega, rho, probe);
  std::vector<std::string> header = {"center"};
  for (int i = 0; i < d; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("radius");
  header.push_back("ratio");
  CsvBuilder csv(header);
  const auto du = static_cast<std::size_t>(d);
  for (std::size_t k = 0; k < r.ratios.size(); ++k) {
    csv.cell(k);
    for (std::size_t i = 0; i < du; ++i) csv.cell(probe.centers[k * du + i]);
    csv.cell(r.radii[k]).cell(r.ratios[k]);
    csv.end_row();
  }
  atomic_write(c.out / "thickness.csv", csv.str());
  Json s;
  s["seed"] = c.seed;
  s["region"] = omega.describe();
  s["gamma_hat"] = r.gamma_hat;
  s["std_error"] = r.std_error;
  s["exact"] = r.exact;
  s["worst_center"] = r.worst_center;
  s["samples"] = r.samples;
  s["note"] = "probed thickness: minimum over the listed centers only";
  write_json(c.out / "thickness_summary.json", s);
}

void cmd_cover(const Context& c)
{
  const Json& cfg = c.cfg;
  const DensityModel rho = density_from_json(require(cfg, "density"));
  const auto lo = get_doubles(cfg, "lo");
  const auto hi = get_doubles(cfg, "hi");
  const BallCover cover = build_cover(rho, lo, hi, get_double(cfg, "grid_step", 0.0));
  const int per_axis = get_int(cfg, "probe_per_axis", cover.dim == 1 ? 2001 : (cover.dim == 2 ? 201 : 41));
  const OverlapReport rep = verify_overlap(cover, per_axis);
  atomic_write(c.out / "cover.csv", cover_to_csv(cover));
  Json s;
  s["seed"] = c.seed;
  s["balls"] = cover.size();
  s["lipschitz"] = cover.lipschitz;
  s["overlap_bound"] = cover.overlap_bound;
  s["grid_step"] = cover.grid_step;
  s["max_multiplicity"] = rep.max_multiplicity;
  s["witness"] = rep.witness;
  s["within_bound"] = rep.within_bound;
  s["uncovered"] = rep.uncovered;
  s["probe_per_axis"] = per_axis;
  write_json(c.out / "cover_summary.json", s);
  require_overlap(cover, rep);
}

void cmd_classify_balls(const Context& c)
{
  const Json& cfg = c.cfg;
  const HermiteExpansion f = expansion_from_json(require(cfg, "expansion"), c.seed);
  const DensityModel rho = density_from_json(require(cfg, "density"));
  const auto lo = get_doubles(cfg, "lo");
  const auto hi = get_doubles(cfg, "hi");
  const BallCover cover = build_cover(rho, lo, hi, get_double(cfg, "grid_step", 0.0));
  const LogDoubleSequence logN = double_sequence_from_json(cfg.contains("sequence") ? cfg.at("sequence") : Json::object());
  const int P = get_int(cfg, "P", 6);
  const Classification cl = classify_balls(f, cover, rho, get_double(cfg, "eps"), logN, P);
  atomic_write(c.out / "classification.csv", classification_to_csv(cl));
  std::size_t good = 0;
  double total = 0.0;
  for (const auto& l : cl.labels) {
    good += l.good;
    total += l.mass;
  }
  Json s;
  s["seed"] = c.seed;
  s["balls"] = cl.labels.size();
  s["good"] = good;
  s["bad"] = cl.labels.size() - good;
  s["bad_mass"] = cl.bad_mass;
  s["covered_mass"] = total;
  s["norm_squared"] = f.norm_squared();
  s["K0"] = cl.K0;
  s["order"] = cl.order;
  s["vacuous"] = cl.vacuous;
  write_json(c.out / "classification_summary.json", s);
}

Json lr_to_json(const LRSchedule& s)
{
  Json j;
  j["q"] = s.q;
  j["q_min"] = s.q_min;
  j["terms"] = s.tau.size();
  j["tau_sum"] = s.tau_sum;
  j["log_final_constant"] = json_number(s.log_final_constant);
  j["tau"] = s.tau;
  j["T_k"] = s.T_k;
  return j;
}

Json run_calculation(const Json& calc)
{
  const std::string kind = string_or(calc, "kind", "");
  if (kind.empty()) throw DomainError("constants: every calculation needs a 'kind'");
  if (kind == "nsv") {
    const NsvResult r = nsv_constants(sequence_from_json(require(calc, "sequence")), get_double(calc, "t"),
                                      get_double(calc, "gamma"), get_int(calc, "d"), get_double(calc, "diam"));
    Json j;
    j["kind"] = kind;
    j["n_star"] = to_json(r.n_star);
    j["r"] = r.r;
    j["adjusted_r"] = r.adjusted_r;
    j["log_M0"] = r.log_M0;
    j["gamma_2n"] = json_number(r.gamma_2n);
    j["log_Gamma_2n"] = json_number(r.log_Gamma_2n);
    j["linf"] = to_json(r.linf);
    j["l2"] = to_json(r.l2);
    return j;
  }
  if (kind == "general_up") {
    Json j = to_json(general_up_constant(sequence_from_json(require(calc, "diagonal")),
                                         density_from_json(require(calc, "density")), get_double(calc, "gamma"),
                                         get_int(calc, "d"), get_double(calc, "eps"), get_double(calc, "K", 1.0),
                                         get_double(calc, "Kprime", 1.0), get_double(calc, "r", 1.0)));
    j["kind"] = kind;
    return j;
  }
  if (kind == "specific_up") {
    Json j = to_json(specific_up_constant(gs_params_from_json(require(calc, "gs")), get_double(calc, "eps"),
                                          get_double(calc, "K", 1.0)));
    j["kind"] = kind;
    return j;
  }
  if (kind == "shubin") {
    const ShubinIndices s = shubin_indices(get_int(calc, "m"), get_int(calc, "k"), get_double(calc, "s"));
    return Json{{"kind", kind},
                {"nu", s.nu},
                {"mu", s.mu},
                {"delta_star", s.delta_star ? Json(*s.delta_star) : Json(nullptr)}};
  }
  if (kind == "observability_cost") {
    Json j = to_json(observability_cost_bound(gs_params_from_json(require(calc, "gs")), get_double(calc, "T"),
                                              get_double(calc, "K", 1.0)));
    j["kind"] = kind;
    return j;
  }
  if (kind == "lr_schedule") {
    Json j = lr_to_json(lebeau_robbiano_schedule(get_double(calc, "T"), get_double(calc, "q"),
                                                 get_double(calc, "Kprime", 1.0), get_double(calc, "r1"),
                                                 get_double(calc, "s")));
    j["kind"] = kind;
    return j;
  }
  if (kind == "bernstein_theta") {
    Json j = to_json(bernstein_theta_bound(weight_from_json(require(calc, "weight")), get_int(calc, "d"),
                                           get_double(calc, "s"), get_double(calc, "r"), get_int(calc, "beta"),
                                           get_double(calc, "D", 1.0)));
    j["kind"] = kind;
    return j;
  }
  if (kind == "gamma") {
    const auto p = get_int(calc, "p");
    if (p < 1) throw DomainError("gamma: p must be >= 1");
    const GammaValues g = gamma_Gamma(sequence_from_json(require(calc, "sequence")), static_cast<std::size_t>(p));
    return Json{{"kind", kind}, {"p", p}, {"gamma", json_number(g.gamma)}, {"log_Gamma", json_number(g.log_Gamma)}};
  }
  throw DomainError("constants: unknown calculation kind '" + kind + "'");
}

void cmd_constants(const Context& c)
{
  const Json& list = require(c.cfg, "calculations");
  if (!list.is_array()) throw DomainError("constants: 'calculations' must be an array");
  Json out;
  out["seed"] = c.seed;
  Json results = Json::array();
  for (const auto& calc : list) results.push_back(run_calculation(calc));
  out["results"] = results;
  write_json(c.out / "constants.json", out);
}

void cmd_spectral_constant(const Context& c)
{
  const Json& cfg = c.cfg;
  const RegionModel omega = region_from_json(require(cfg, "region"));
  const int d = get_int(cfg, "d", omega.dim());
  std::vector<int> Ns;
  if (cfg.contains("N_list")) {
    for (double v : get_doubles(cfg, "N_list")) Ns.push_back(static_cast<int>(v));
  } else {
    Ns.push_back(get_int(cfg, "N"));
  }
  if (Ns.empty()) throw DomainError("spectral-constant: empty N list");
  std::vector<SpectralConstant> res(Ns.size());
  const GramianQuadrature quad =
      cfg.contains("quadrature") ? gramian_quadrature_from_json(cfg.at("quadrature")) : GramianQuadrature{};
  parallel_for(Ns.size(), [&](std::size_t i) { res[i] = spectral_constant_empirical(omega, d, Ns[i], quad); });

  CsvBuilder csv({"N", "C_N", "lambda_min", "reliable"});
  bool all_reliable = true, monotone = true;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    csv.cell(Ns[i]).cell(res[i].C_N).cell(res[i].lambda_min).cell(res[i].reliable ? "true" : "false");
    csv.end_row();
    all_reliable = all_reliable && res[i].reliable;
    if (i > 0 && Ns[i] > Ns[i - 1] && res[i].C_N < res[i - 1].C_N * (1.0 - 1e-12)) monotone = false;
  }
  atomic_write(c.out / "spectral.csv", csv.str());
  atomic_write(c.out / "minimizer.csv", expansion_to_csv(res.back().minimizer));

  Json s;
  s["seed"] = c.seed;
  s["region"] = omega.describe();
  s["all_reliable"] = all_reliable;
  s["non_decreasing"] = monotone;
  s["quadrature"] = to_json(quad);
  if (all_reliable && Ns.size() >= 2) {
    Eigen::MatrixXd F(static_cast<Eigen::Index>(Ns.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(Ns.size()));
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      F(static_cast<Eigen::Index>(i), 0) = 1.0;
      F(static_cast<Eigen::Index>(i), 1) = std::sqrt(static_cast<double>(Ns[i]));
      y[static_cast<Eigen::Index>(i)] = std::log(res[i].C_N);
    }
    const UpperEnvelope env = fit_upper_envelope(F, y, 0);
    s["envelope"] = {{"form", "log C_N <= kappa + c sqrt(N)"},
                     {"kappa", env.coeffs[0]},
                     {"c", env.coeffs[1]},
                     {"max_residual", env.residuals.maxCoeff()}};
  } else {
    s["envelope"] = nullptr;
  }
  write_json(c.out / "spectral_summary.json", s);
}

std::vector<DissipationOrder> orders_from_json(const Json& cfg, int d)
{
  std::vector<DissipationOrder> orders;
  if (cfg.contains("orders")) {
    for (const auto& o : cfg.at("orders"))
      orders.push_back({multi_index_from_json(require(o, "alpha"), d), multi_index_from_json(require(o, "beta"), d)});
    return orders;
  }
  const int mo = get_int(cfg, "max_order", 2);
  if (mo < 0) throw DomainError("max_order must be >= 0");
  for (const auto& a : enumerate(d, mo))
    for (const auto& b : enumerate(d, mo - a.total())) orders.push_back({a, b});
  return orders;
}

void cmd_dissipation_fit(const Context& c)
{
  const Json& cfg = c.cfg;
  const int d = get_int(cfg, "d", 1);
  const GalerkinOperator G = build_galerkin(get_int(cfg, "m", 1), get_int(cfg, "k", 1), d, get_int(cfg, "N", 30));
  const double s = get_double(cfg, "s", 1.0);
  const auto orders = orders_from_json(cfg, d);
  auto ts = doubles_or(cfg, "t_grid", {0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0});
  const DissipationFit fit = dissipation_exponent_fit(G, s, orders, ts, get_int(cfg, "trials", 8), c.seed);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  CsvBuilder csv({"alpha", "beta", "t", "residual"});
  for (std::size_t io = 0; io < orders.size(); ++io)
    for (std::size_t it = 0; it < ts.size(); ++it) {
      csv.cell(orders[io].alpha.to_string()).cell(orders[io].beta.to_string()).cell(ts[it]).cell(
          fit.residuals[io * ts.size() + it]);
      csv.end_row();
    }
  atomic_write(c.out / "dissipation.csv", csv.str());
  Json j = to_json(fit);
  j["seed"] = c.seed;
  j["form"] = "||x^a d^b e^{-tH^s} g|| <= C^{1+|a|+|b|} t^{-(r1(|a|+|b|) + r2)}";
  write_json(c.out / "dissipation.json", j);
}

void cmd_obs_sweep(const Context& c)
{
  const Json& cfg = c.cfg;
  SweepConfig sc;
  sc.m = get_int(cfg, "m", 1);
  sc.k = get_int(cfg, "k", 1);
  sc.s = get_double(cfg, "s", 1.0);
  sc.d = get_int(cfg, "d", 1);
  sc.N = get_int(cfg, "N", 30);
  sc.region = region_from_json(require(cfg, "region"));
  sc.T_grid = get_doubles(cfg, "T_grid");
  sc.nt = get_int(cfg, "nt", 32);
  sc.seed = c.seed;
  if (cfg.contains("gs")) {
    sc.gs = gs_params_from_json(cfg.at("gs"));
  } else {
    const ShubinIndices si = shubin_indices(sc.m, sc.k, sc.s);
    sc.gs.mu = si.mu;
    sc.gs.nu = si.nu;
    sc.gs.delta = get_double(cfg, "delta", 0.0);
  }
  if (cfg.contains("r1")) sc.r1 = get_double(cfg, "r1");
  sc.dissipation_t_grid = doubles_or(cfg, "dissipation_t_grid", sc.dissipation_t_grid);
  sc.dissipation_max_order = get_int(cfg, "dissipation_max_order", sc.dissipation_max_order);
  sc.dissipation_trials = get_int(cfg, "dissipation_trials", sc.dissipation_trials);
  sc.truncation_check = get_bool(cfg, "truncation_check", sc.truncation_check);
  if (cfg.contains("quadrature")) sc.quadrature = gramian_quadrature_from_json(cfg.at("quadrature"));

  const SweepResult r = cost_vs_bound_sweep(sc);
  atomic_write(c.out / "sweep.csv", sweep_to_csv(r));
  Json s;
  s["seed"] = c.seed;
  s["region"] = sc.region.describe();
  GSParams shown = sc.gs;
  shown.r1 = r.r1;
  s["gs"] = to_json(shown);
  s["quadrature"] = to_json(sc.quadrature);
  s["regime"] = to_string(sc.gs.regime());
  s["bound_available"] = r.bound_available;
  if (!r.bound_available) s["label"] = "no theoretical bound available";
  s["exponent"] = json_number(r.exponent);
  s["K_fitted"] = json_number(r.K);
  s["r1"] = r.r1;
  s["r1_source"] = sc.r1 ? "config" : "dissipation_exponent_fit";
  s["dissipation_fit"] = sc.r1 ? Json(nullptr) : to_json(r.fit);
  s["citation"] = r.citation;
  Json td = Json::array();
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) {
    td.push_back(row.truncation_delta ? json_number(*row.truncation_delta) : Json(nullptr));
    if (r.bound_available) min_margin = std::min(min_margin, row.margin);
  }
  s["truncation_delta_N_plus_10"] = td;
  s["min_margin"] = r.bound_available ? json_number(min_margin) : Json(nullptr);
  s["note"] = "C_T is the Galerkin constant at level N; no convergence in N is claimed";
  write_json(c.out / "sweep_summary.json", s);
}

using Handler = std::function<void(const Context&)>;

const std::map<std::string, Handler>& handlers()
{
  static const std::map<std::string, Handler> h = {
      {"seq-analyze", cmd_seq_analyze},         {"thickness", cmd_thickness},
      {"cover", cmd_cover},                     {"classify-balls", cmd_classify_balls},
      {"constants", cmd_constants},             {"spectral-constant", cmd_spectral_constant},
      {"obs-sweep", cmd_obs_sweep},             {"dissipation-fit", cmd_dissipation_fit},
  };
  return h;
}

void write_error(const RunOptions& o, int code, const char* type, const std::string& msg)
{
  Json e;
  e["subcommand"] = o.subcommand;
  e["exit_code"] = code;
  e["error"] = type;
  e["message"] = msg;
  try {
    fs::create_directories(o.out);
    write_json(o.out / "error.json", e);
  } catch (...) {
  }
}

std::uint64_t resolve_seed(const RunOptions& o)
{
  if (o.seed) return *o.seed;
  if (o.config.is_object() && o.config.contains("seed")) {
    const Json& s = o.config.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw DomainError("field 'seed' must be a non-negative integer");
    return s.get<std::uint64_t>();
  }
  return 1;
}

}  // namespace

const std::vector<std::string>& subcommands()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : handlers()) v.push_back(k);
    return v;
  }();
  return names;
}

Json load_config(const std::filesystem::path& path)
{
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw DomainError("cannot read config '" + path.string() + "': " + e.what());
  }
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("malformed config '" + path.string() + "': " + e.what());
  }
}

int run_command(const RunOptions& opts)
{
  RunOptions o = opts;
  try {
    if (o.config_path) o.config = load_config(*o.config_path);
    const auto it = handlers().find(o.subcommand);
    if (it == handlers().end()) throw DomainError("unknown subcommand '" + o.subcommand + "'");
    if (!o.config.is_object()) throw DomainError("config must be a JSON object");
    if (o.threads < 0) throw DomainError("--threads must be >= 0");
    set_thread_count(o.threads);
    const std::uint64_t seed = resolve_seed(o);
    Json effective = o.config;
    effective["seed"] = seed;
    fs::create_directories(o.out);
    std::error_code ec;
    fs::remove(o.out / "error.json", ec);
    it->second(Context{effective, o.out, seed});
    write_json(o.out / "config.json", effective);
    return kExitOk;
  } catch (const SingularGramianError& e) {
    write_error(o, kExitSingularGramian, "SingularGramianError", e.what());
    return kExitSingularGramian;
  } catch (const UnreliableTruncationError& e) {
    write_error(o, kExitUnreliableTruncation, "UnreliableTruncationError", e.what());
    return kExitUnreliableTruncation;
  } catch (const DomainError& e) {
    write_error(o, kExitDomain, "DomainError", e.what());
    return kExitDomain;
  } catch (const nlohmann::json::exception& e) {
    write_error(o, kExitDomain, "DomainError", std::string("malformed config: ") + e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    write_error(o, kExitInternal, "InternalError", e.what());
    return kExitInternal;
  }
}

}  // namespace thickobs
