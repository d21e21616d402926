#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <mehybrid/errors.hpp>
#include <mehybrid/galerkin.hpp>
#include <mehybrid/polybasis.hpp>

namespace mehybrid::cli {

namespace {

const std::set<std::string> kMethods{"mc", "surrogate", "direct-hybrid", "global-hybrid", "me-gha", "me-lha"};
const std::set<std::string> kSurrogates{"adaptive", "global", "closed-form", "two-element", "cache"};

// Reads fields of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw UsageError("config: '" + label() + "' must be an object");
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    const json& v = j_.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() && !(v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()))
        throw UsageError("config: field '" + path(key) + "' must be an integer");
      if (std::is_unsigned_v<T> && v.get<double>() < 0.0)
        throw UsageError("config: field '" + path(key) + "' must be nonnegative");
      return static_cast<T>(v.get<double>());
    } else {
      try {
        return v.get<T>();
      } catch (const json::exception&) {
        throw UsageError("config: field '" + path(key) + "' has the wrong type");
      }
    }
  }

  const json* object(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return nullptr;
    return &j_.at(key);
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw UsageError("config: unknown field '" + path(k) + "'");
  }

 private:
  std::string label() const { return where_.empty() ? "<root>" : where_; }
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

double default_theta1(const std::string& problem) {
  if (problem == "linear-ode") return 1.0;
  if (problem == "ko3") return 1e-4;
  if (problem == "burgers") return 2.75e-3;
  return 1e-3;
}

double default_alpha(const std::string& problem) { return problem == "burgers" ? 0.8 : 0.5; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json params_to_json(const ProblemParams& p) {
  json out = json::object();
  for (const auto& [k, v] : p) out[k] = v;
  return out;
}

json reference_to_json(const ReferenceValue& r) {
  return {{"value", r.value}, {"provenance", r.provenance}, {"note", r.note}};
}

}  // namespace

json apply_overrides(json doc, const std::vector<std::string>& sets) {
  if (!doc.is_object()) throw UsageError("config: top level must be an object");
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    const std::string raw = s.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw UsageError("--set: empty path component in '" + key + "'");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return doc;
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  Reader root(doc, "");
  const auto problem = root.get<std::string>("problem");
  if (!problem) throw UsageError("config: field 'problem' is required");
  cfg.problem = *problem;

  if (const json* params = root.object("params")) {
    if (!params->is_object()) throw UsageError("config: field 'params' must be an object");
    for (const auto& [k, v] : params->items()) {
      if (!v.is_number()) throw UsageError("config: field 'params." + k + "' must be a number");
      cfg.params[k] = v.get<double>();
    }
  }
  ProblemSpec spec;
  try {
    spec = make_problem(cfg.problem, cfg.params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }

  const auto method = root.get<std::string>("method");
  if (!method) throw UsageError("config: field 'method' is required");
  if (!kMethods.count(*method)) throw UsageError("config: field 'method' has unknown value '" + *method + "'");
  cfg.method = *method;

  cfg.order = root.get<int>("order").value_or(cfg.order);
  if (cfg.order < 0 || cfg.order > 30) throw UsageError("config: field 'order' must lie in [0,30]");

  const bool element_wise = cfg.method == "me-gha" || cfg.method == "me-lha";
  cfg.surrogate = root.get<std::string>("surrogate").value_or(cfg.method == "mc" ? "" : element_wise ? "adaptive" : "global");
  if (cfg.method != "mc" && !kSurrogates.count(cfg.surrogate))
    throw UsageError("config: field 'surrogate' has unknown value '" + cfg.surrogate + "'");
  if ((cfg.surrogate == "closed-form" || cfg.surrogate == "two-element") && cfg.problem != "step")
    throw UsageError("config: surrogate '" + cfg.surrogate + "' exists only for the step problem");

  cfg.quadrature = root.get<int>("quadrature").value_or(0);
  if (cfg.quadrature == 0) cfg.quadrature = cfg.problem == "burgers" ? 21 : cfg.order + 2;
  if (cfg.quadrature < cfg.order + 1) throw UsageError("config: field 'quadrature' must be >= order + 1");

  const double dt = spec.galerkin ? spec.galerkin->dt : 0.01;
  if (const json* refine = root.object("refine")) {
    Reader r(*refine, "refine");
    cfg.theta1 = r.get<double>("theta1");
    if (const auto tol = r.get<double>("tol1")) {
      if (cfg.theta1 && *cfg.theta1 != *tol) throw UsageError("config: 'refine.tol1' and 'refine.theta1' disagree");
      cfg.theta1 = tol;
    }
    cfg.theta2 = r.get<double>("theta2").value_or(cfg.theta2);
    cfg.alpha = r.get<double>("alpha");
    cfg.reduced_order = r.get<int>("reduced_order").value_or(cfg.reduced_order);
    cfg.max_elements = r.get<std::size_t>("max_elements").value_or(cfg.max_elements);
    cfg.check_interval = r.get<double>("check_interval").value_or(cfg.check_interval);
    cfg.restart = r.get<std::string>("restart").value_or(cfg.restart);
    r.finish();
  }
  if (!cfg.theta1) cfg.theta1 = default_theta1(cfg.problem);
  if (!cfg.alpha) cfg.alpha = default_alpha(cfg.problem);
  if (cfg.reduced_order < 0) cfg.reduced_order = std::max((cfg.order - 1) / 2, 0);
  if (cfg.check_interval <= 0.0) cfg.check_interval = 10.0 * dt;
  if (cfg.restart != "project" && cfg.restart != "resolve")
    throw UsageError("config: field 'refine.restart' must be 'project' or 'resolve'");
  if (!(*cfg.theta1 > 0.0)) throw UsageError("config: field 'refine.theta1' must be > 0");
  if (!(cfg.theta2 > 0.0 && cfg.theta2 < 1.0)) throw UsageError("config: field 'refine.theta2' must lie in (0,1)");
  if (!(*cfg.alpha > 0.0 && *cfg.alpha < 1.0)) throw UsageError("config: field 'refine.alpha' must lie in (0,1)");
  if (cfg.reduced_order >= std::max(cfg.order, 1))
    throw UsageError("config: field 'refine.reduced_order' must be below 'order'");
  if (cfg.max_elements < 1) throw UsageError("config: field 'refine.max_elements' must be >= 1");

  const auto m = root.get<std::uint64_t>("m");
  if (!m || *m < 1) throw UsageError("config: field 'm' is required and must be >= 1");
  cfg.m = *m;
  cfg.delta_m = root.get<std::size_t>("delta_m").value_or(std::min<std::uint64_t>(cfg.delta_m, cfg.m));
  if (cfg.delta_m < 1 || cfg.delta_m > cfg.m) throw UsageError("config: field 'delta_m' must satisfy 1 <= delta_m <= m");
  cfg.eta_stop = root.get<double>("eta_stop").value_or(0.0);
  if (!(cfg.eta_stop >= 0.0)) throw UsageError("config: field 'eta_stop' must be >= 0");
  cfg.max_exact = root.get<std::uint64_t>("max_exact");
  const auto seed = root.get<std::uint64_t>("seed");
  if (!seed) throw UsageError("config: field 'seed' is required");
  cfg.seed = *seed;
  cfg.gamma = root.get<double>("gamma");
  if (cfg.method == "direct-hybrid" && !cfg.gamma) throw UsageError("config: field 'gamma' is required for direct-hybrid");
  if (cfg.gamma && !(*cfg.gamma >= 0.0)) throw UsageError("config: field 'gamma' must be >= 0");
  cfg.threads = root.get<unsigned>("threads").value_or(1u);
  if (cfg.threads < 1) throw UsageError("config: field 'threads' must be >= 1");

  cfg.cache = root.get<std::string>("cache").value_or("");
  if (cfg.surrogate == "cache" && cfg.cache.empty())
    throw UsageError("config: field 'cache' is required when surrogate is 'cache'");

  if (const json* out = root.object("output")) {
    Reader r(*out, "output");
    cfg.report_path = r.get<std::string>("report").value_or("");
    cfg.trace_path = r.get<std::string>("trace").value_or("");
    cfg.surrogate_path = r.get<std::string>("surrogate").value_or("");
    cfg.events_path = r.get<std::string>("events").value_or("");
    r.finish();
  }
  root.finish();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
  return {
      {"problem", cfg.problem},
      {"params", params_to_json(cfg.params)},
      {"method", cfg.method},
      {"surrogate", cfg.surrogate.empty() ? json(nullptr) : json(cfg.surrogate)},
      {"order", cfg.order},
      {"quadrature", cfg.quadrature},
      {"refine",
       {{"theta1", opt(cfg.theta1)},
        {"theta2", cfg.theta2},
        {"alpha", opt(cfg.alpha)},
        {"reduced_order", cfg.reduced_order},
        {"max_elements", cfg.max_elements},
        {"check_interval", cfg.check_interval},
        {"restart", cfg.restart}}},
      {"m", cfg.m},
      {"delta_m", cfg.delta_m},
      {"eta_stop", cfg.eta_stop},
      {"max_exact", opt(cfg.max_exact)},
      {"seed", cfg.seed},
      {"gamma", opt(cfg.gamma)},
      {"threads", cfg.threads},
      {"cache", cfg.cache.empty() ? json(nullptr) : json(cfg.cache)},
      {"output",
       {{"report", cfg.report_path}, {"trace", cfg.trace_path}, {"surrogate", cfg.surrogate_path},
        {"events", cfg.events_path}}},
  };
}

SurrogateBuild build_surrogate(const RunConfig& cfg, const ProblemSpec& spec, LimitStateModel& model) {
  SurrogateBuild out;
  if (cfg.surrogate == "closed-form") {
    out.surrogate = MultiElementSurrogate::single(step_global_gpc(cfg.order));
    return out;
  }
  if (cfg.surrogate == "two-element") {
    out.surrogate = step_two_element_surrogate();
    return out;
  }
  if (cfg.surrogate == "cache") {
    SurrogateCache cache;
    try {
      cache = load_surrogate(cfg.cache);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("surrogate cache: ") + e.what());
    }
    if (cache.meta.contains("problem") && cache.meta.at("problem") != spec.name)
      throw UsageError("surrogate cache: built for problem " + cache.meta.at("problem").dump() + ", not '" +
                       spec.name + "'");
    if (cache.surrogate.dimension() != spec.dim) throw UsageError("surrogate cache: dimension mismatch");
    if (const auto problems = cache.surrogate.decomposition().check(); !problems.empty())
      throw UsageError("surrogate cache: illegal mesh: " + problems);
    out.surrogate = std::move(cache.surrogate);
    return out;
  }

  RefinementConfig rc;
  rc.theta1 = cfg.surrogate == "global" ? std::numeric_limits<double>::infinity() : *cfg.theta1;
  rc.theta2 = cfg.theta2;
  rc.alpha = cfg.alpha.value_or(default_alpha(cfg.problem));
  rc.order = cfg.order;
  rc.reduced_order = cfg.reduced_order;
  rc.max_elements = cfg.max_elements;
  rc.check_interval = cfg.check_interval;
  rc.restart = cfg.restart == "resolve" ? RestartPolicy::resolve : RestartPolicy::project;
  if (spec.galerkin) {
    rc.dt = spec.galerkin->dt;
    auto dyn = adapt_dynamic(spec.galerkin->system, rc, spec.galerkin->final_time);
    out.surrogate = surrogate_from_states(dyn, spec.galerkin->var, spec.galerkin->shift);
    out.truncated = dyn.truncated;
    out.events = std::move(dyn.events);
    return out;
  }
  if (cfg.surrogate == "global") {
    const auto before = model.call_count();
    out.surrogate = MultiElementSurrogate::single(build_collocation(model, unit_element(spec.dim), cfg.order, cfg.quadrature));
    out.model_calls = model.call_count() - before;
    return out;
  }
  auto st = adapt_static(model, rc, cfg.order, cfg.quadrature);
  out.surrogate = std::move(st.surrogate);
  out.model_calls = st.model_calls;
  out.truncated = st.truncated;
  out.events = std::move(st.events);
  return out;
}

json RunReport::to_json() const {
  json out{
      {"estimate", estimate_to_json(estimate)},
      {"n_exact", estimate.n_exact},
      {"n_construction", n_construction},
      {"n_exact_total", n_exact_total()},
      {"n_surrogate", estimate.n_surrogate},
      {"elements", elements},
      {"truncated", truncated},
      {"iterations", trace.records.size()},
      {"reference", reference ? reference_to_json(*reference) : json(nullptr)},
      {"relative_error", relative_error ? json(*relative_error) : json(nullptr)},
      {"wall_time_s", wall_time},
      {"config", config},
  };
  return out;
}

RunReport run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemSpec spec;
  try {
    spec = make_problem(cfg.problem, cfg.params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto model = spec.make_model();
  RunReport report;
  report.config = config_to_json(cfg);

  std::optional<SurrogateBuild> build;
  if (cfg.method != "mc") {
    build = build_surrogate(cfg, spec, *model);
    report.n_construction = build->model_calls;
    report.elements = build->surrogate.size();
    report.truncated = build->truncated;
    report.events = build->events;
  }

  const auto samples = sample_uniform(cfg.m, spec.dim, cfg.seed);
  HybridConfig hc;
  hc.delta_m = cfg.delta_m;
  hc.eta_stop = cfg.eta_stop;
  hc.max_exact = cfg.max_exact;
  const Parallelism par{cfg.threads};

  const auto calls_before = model->call_count();
  if (cfg.method == "mc") {
    report.estimate = mc_estimate(*model, samples, par);
  } else if (cfg.method == "surrogate") {
    auto& e = report.estimate;
    e.m = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (build->surrogate.evaluate(samples.point(i)) < 0.0) ++e.failures;
    e.n_surrogate = e.m;
    e.p_f = static_cast<double>(e.failures) / static_cast<double>(e.m);
    e.stddev = mc_stddev(e.p_f, e.m);
  } else if (cfg.method == "direct-hybrid") {
    report.estimate = direct_hybrid(*model, build->surrogate.as_function(), samples, *cfg.gamma);
  } else {
    HybridResult r;
    if (cfg.method == "global-hybrid")
      r = iterative_hybrid(*model, build->surrogate.as_function(), samples, hc, par);
    else if (cfg.method == "me-gha")
      r = me_gha(*model, build->surrogate, samples, hc, par);
    else
      r = me_lha(*model, build->surrogate, samples, hc, par);
    report.estimate = r.estimate;
    report.trace = std::move(r.trace);
  }
  if (model->call_count() - calls_before != report.estimate.n_exact)
    throw std::logic_error("run: exact-call accounting mismatch");

  if (const auto* ref = spec.reference()) {
    report.reference = *ref;
    report.relative_error = relative_error(report.estimate.p_f, ref->value);
  }
  if (build) report.surrogate = std::move(build->surrogate);
  report.wall_time = seconds_since(t0);
  return report;
}

void write_outputs(const RunConfig& cfg, const RunReport& report) {
  if (!cfg.report_path.empty()) write_file(cfg.report_path, report.to_json().dump(2) + "\n");
  if (!cfg.trace_path.empty()) write_file(cfg.trace_path, trace_csv(report.trace));
  if (!cfg.events_path.empty()) write_file(cfg.events_path, events_csv(report.events));
  if (!cfg.surrogate_path.empty() && report.surrogate) {
    const json meta{{"problem", cfg.problem},
                    {"params", params_to_json(cfg.params)},
                    {"kind", cfg.surrogate},
                    {"order", cfg.order},
                    {"n_construction", report.n_construction},
                    {"config", report.config}};
    save_surrogate(cfg.surrogate_path, *report.surrogate, meta);
  }
}

// ---- tables ------------------------------------------------------------------

namespace {

RunConfig table_config(const std::string& problem, const TableOptions& opts) {
  RunConfig c;
  c.problem = problem;
  c.m = opts.m;
  c.seed = opts.seed;
  c.threads = opts.threads;
  c.theta1 = default_theta1(problem);
  c.alpha = default_alpha(problem);
  c.delta_m = 100;
  return c;
}

RunConfig with(RunConfig c, const std::string& method, const std::string& surrogate, int order) {
  c.method = method;
  c.surrogate = surrogate;
  c.order = order;
  c.reduced_order = std::max((order - 1) / 2, 0);
  c.quadrature = c.problem == "burgers" ? 21 : order + 2;
  c.check_interval = 0.1;
  return c;
}

std::optional<double> at(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? std::optional<double>(v[i]) : std::nullopt;
}

std::vector<TableCell> table_step(const TableOptions& opts) {
  std::vector<TableCell> out;
  const std::vector<int> ps{0, 2, 7};
  const std::vector<double> prob{0.833187, 0.773777, 0.756490};
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const std::string col = "p=" + std::to_string(ps[k]);
    auto base = table_config("step", opts);
    base.delta_m = 1000;
    const auto s = run(with(base, "surrogate", "closed-form", ps[k]));
    const auto h = run(with(base, "global-hybrid", "closed-form", ps[k]));
    out.push_back({"Prob(g^p<0)", col, s.estimate.p_f, prob[k]});
    out.push_back({"#", col, static_cast<double>(h.estimate.n_exact), 502000.0});
    out.push_back({"hybrid estimate", col, h.estimate.p_f, std::nullopt});
  }
  return out;
}

std::vector<TableCell> table_ode(const TableOptions& opts) {
  std::vector<TableCell> out;
  const std::vector<int> ps{3, 5, 7};
  const std::vector<double> global{105000, 54700, 31600}, elements{5, 5, 4}, gha{3700, 3700, 900}, lha{4100, 4100, 1200};
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const std::string col = "p=" + std::to_string(ps[k]);
    const auto base = table_config("linear-ode", opts);
    const auto g = run(with(base, "global-hybrid", "global", ps[k]));
    const auto a = run(with(base, "me-gha", "adaptive", ps[k]));
    const auto l = run(with(base, "me-lha", "adaptive", ps[k]));
    out.push_back({"global surrogate #", col, static_cast<double>(g.estimate.n_exact), global[k]});
    out.push_back({"number of elements", col, static_cast<double>(a.elements), elements[k]});
    out.push_back({"ME-GHA #", col, static_cast<double>(a.estimate.n_exact), gha[k]});
    out.push_back({"ME-LHA #", col, static_cast<double>(l.estimate.n_exact), lha[k]});
    out.push_back({"ME-GHA estimate", col, a.estimate.p_f, 0.003541});
    out.push_back({"ME-LHA estimate", col, l.estimate.p_f, 0.003541});
  }
  return out;
}

std::vector<TableCell> table_ko(const TableOptions& opts, bool local) {
  std::vector<TableCell> out;
  const std::vector<int> ps{3, 5, 7};
  const std::vector<double> tols{1e-3, 1e-4, 1e-5};
  const std::vector<std::vector<double>> elements{{22, 38, 58}, {12, 22, 30}, {10, 16, 26}};
  const std::vector<std::vector<double>> counts =
      local ? std::vector<std::vector<double>>{{12245, 4700, 6029}, {3400, 3000, 3400}, {2900, 2200, 2800}}
            : std::vector<std::vector<double>>{{6900, 500, 200}, {3900, 200, 200}, {1400, 2200, 300}};
  const std::vector<std::vector<double>> rel{{0.0006, 0.0016, 0.00015}, {0.00012, 0.0014, 0.00021}, {0.0033, 0.00038, 0.0}};
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = 0; j < tols.size(); ++j) {
      std::ostringstream col;
      col << "TOL_1=" << tols[j];
      auto base = table_config("ko3", opts);
      base.theta1 = tols[j];
      const auto r = run(with(base, local ? "me-lha" : "me-gha", "adaptive", ps[i]));
      const std::string p = "p=" + std::to_string(ps[i]) + " ";
      out.push_back({p + "No. of elements", col.str(), static_cast<double>(r.elements), elements[i][j]});
      out.push_back({p + "#", col.str(), static_cast<double>(r.estimate.n_exact), counts[i][j]});
      out.push_back({p + "relative error", col.str(), r.relative_error.value_or(std::nan("")),
                     local ? std::nullopt : at(rel[i], j)});
    }
  return out;
}

std::vector<TableCell> table_burgers(const TableOptions& opts) {
  std::vector<TableCell> out;
  const std::vector<int> ps{2, 3, 4, 5};
  const std::vector<double> global{101921, 62921, 23421, 3921}, elements{9, 7, 6, 5}, gha{1757, 573, 431, 389},
      lha{2557, 1173, 931, 799};
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const std::string col = "p=" + std::to_string(ps[k]);
    auto base = table_config("burgers", opts);
    // The published probability is P(z < z0), i.e. failure below z0.
    base.params["orientation"] = -1.0;
    const auto g = run(with(base, "global-hybrid", "global", ps[k]));
    const auto a = run(with(base, "me-gha", "adaptive", ps[k]));
    const auto l = run(with(base, "me-lha", "adaptive", ps[k]));
    out.push_back({"global polynomial #", col, static_cast<double>(g.n_exact_total()), global[k]});
    out.push_back({"number of elements", col, static_cast<double>(a.elements), elements[k]});
    out.push_back({"ME-GHA #", col, static_cast<double>(a.n_exact_total()), gha[k]});
    out.push_back({"ME-LHA #", col, static_cast<double>(l.n_exact_total()), lha[k]});
    out.push_back({"ME-GHA estimate", col, a.estimate.p_f, 0.127478});
  }
  return out;
}

}  // namespace

std::vector<TableCell> table(int n, const TableOptions& opts) {
  switch (n) {
    case 1: return table_step(opts);
    case 2: return table_ode(opts);
    case 3: return table_ko(opts, false);
    case 4: return table_ko(opts, true);
    case 5: return table_burgers(opts);
    default: throw UsageError("table: expected a number from 1 to 5");
  }
}

std::string table_csv(const std::vector<TableCell>& cells) {
  std::ostringstream os;
  os.precision(10);
  os << "row,column,computed,published,abs_diff\n";
  for (const auto& c : cells) {
    os << c.row << ',' << c.column << ',' << c.computed << ',';
    if (c.published) os << *c.published << ',' << std::abs(c.computed - *c.published);
    else os << ',';
    os << '\n';
  }
  return os.str();
}

// ---- validate ----------------------------------------------------------------

namespace {

template <class F>
CheckResult check(const std::string& name, F&& body) {
  CheckResult r{name, false, ""};
  try {
    r.detail = body(r.pass);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::vector<CheckResult> validate(const std::optional<std::string>& cache_path) {
  std::vector<CheckResult> out;

  out.push_back(check("orthonormality", [](bool& pass) {
    double worst = 0.0;
    for (std::size_t d : {1u, 2u}) {
      const int N = d == 1 ? 10 : 4;
      const auto idx = multi_index_set(d, N);
      const auto rule = gauss_legendre(N + 1);
      std::vector<double> x(d);
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a; b < idx.size(); ++b) {
          double s = 0.0;
          std::vector<std::size_t> k(d, 0);
          while (true) {
            double w = 1.0;
            for (std::size_t t = 0; t < d; ++t) {
              x[t] = rule.nodes[k[t]];
              w *= rule.weights[k[t]];
            }
            s += w * tensor_basis_eval(idx[a], x) * tensor_basis_eval(idx[b], x);
            std::size_t t = 0;
            while (t < d && ++k[t] == rule.size()) k[t++] = 0;
            if (t == d) break;
          }
          worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    }
    pass = worst < 1e-12;
    return "max |G - I| = " + fmt(worst);
  }));

  out.push_back(check("quadrature exactness", [](bool& pass) {
    double worst = 0.0;
    for (int q = 1; q <= 20; ++q) {
      const auto rule = gauss_legendre(q);
      for (int k = 0; k <= 2 * q - 1; ++k) {
        double s = 0.0;
        for (std::size_t n = 0; n < rule.size(); ++n) s += rule.weights[n] * std::pow(rule.nodes[n], k);
        const double exact = k % 2 == 1 ? 0.0 : 1.0 / (k + 1.0);
        worst = std::max(worst, std::abs(s - exact));
      }
    }
    pass = worst < 1e-13;
    return "max moment error = " + fmt(worst);
  }));

  out.push_back(check("partition of unity", [](bool& pass) {
    auto model = make_problem("step").make_model();
    RefinementConfig rc;
    const auto st = adapt_static(*model, rc, 3, 5);
    const auto ko = make_problem("ko3");
    RefinementConfig kc;
    kc.order = 3;
    kc.reduced_order = 1;
    kc.theta1 = 1e-3;
    const auto dyn = adapt_dynamic(ko.galerkin->system, kc, ko.galerkin->final_time);
    const auto a = st.surrogate.decomposition().check();
    const auto b = dyn.decomposition.check();
    const double err = std::max(std::abs(st.surrogate.decomposition().total_probability() - 1.0),
                                std::abs(dyn.decomposition.total_probability() - 1.0));
    pass = a.empty() && b.empty() && err < 1e-12;
    return std::to_string(st.surrogate.size()) + " static and " + std::to_string(dyn.decomposition.size()) +
           " dynamic elements, |sum J - 1| = " + fmt(err) + (a.empty() ? "" : "; " + a) + (b.empty() ? "" : "; " + b);
  }));

  out.push_back(check("hybrid exhaustion", [](bool& pass) {
    const auto samples = sample_uniform(20000, 1, 7);
    auto model = make_problem("linear-ode").make_model();
    const auto mc = mc_estimate(*model, samples);
    const auto sur = MultiElementSurrogate::single(step_global_gpc(2));
    HybridConfig hc;
    hc.delta_m = samples.size();
    const auto g = me_gha(*model, sur, samples, hc);
    const auto l = me_lha(*model, sur, samples, hc);
    pass = g.estimate.p_f == mc.p_f && l.estimate.p_f == mc.p_f && g.recount() == mc.failures;
    return "mc " + fmt(mc.p_f) + ", gha " + fmt(g.estimate.p_f) + ", lha " + fmt(l.estimate.p_f);
  }));

  out.push_back(check("linear closure", [](bool& pass) {
    PolynomialOdeSystem sys;
    sys.dim = 1;
    sys.num_vars = 1;
    sys.equations = {{PolynomialTerm{-1.0, -1, {0}}}};
    sys.initial = {[](std::span<const double> x) { return 1.0 + x[0] + x[0] * x[0]; }};
    RefinementConfig rc;
    rc.order = 4;
    rc.reduced_order = 2;
    rc.theta1 = 1e-300;
    const auto dyn = adapt_dynamic(sys, rc, 2.0);
    pass = dyn.events.empty() && dyn.decomposition.size() == 1;
    return std::to_string(dyn.events.size()) + " splits";
  }));

  out.push_back(check("ko invariants", [](bool& pass) {
    double worst_product = 0.0, worst_energy = 0.0, worst_sym = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const double xi = -1.0 + 0.2 * k;
      const auto y = ko_final_state(xi);
      const auto ym = ko_final_state(-xi);
      worst_product = std::max(worst_product, std::abs(y[0] * y[1] - 0.1 * xi));
      worst_energy = std::max(worst_energy, std::abs(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - 1.0 - 0.01 * xi * xi));
      worst_sym = std::max(worst_sym, std::abs(y[0] - ym[0]));
    }
    pass = worst_product < 1e-8 && worst_energy < 1e-8 && worst_sym < 1e-10;
    return "|d(y1 y2)| = " + fmt(worst_product) + ", |d energy| = " + fmt(worst_energy) + ", symmetry " + fmt(worst_sym);
  }));

  out.push_back(check("burgers residuals", [](bool& pass) {
    const auto s = sample_uniform(200, 2, 11);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto p = s.point(i);
      const double delta = 0.05 * (p[0] + 1.0);
      const double nu = 0.02 + 0.04 * (p[1] + 1.0);
      worst = std::max(worst, burgers_transition(delta, nu).residual);
    }
    const bool zero = burgers_transition_z(0.0, 0.05) == 0.0;
    pass = worst < 1e-12 && zero;
    return "max residual = " + fmt(worst) + (zero ? ", z(0) = 0" : ", z(0) != 0");
  }));

  if (cache_path) {
    out.push_back(check("cache partition", [&](bool& pass) {
      const auto cache = load_surrogate(*cache_path);
      const auto problems = cache.surrogate.decomposition().check();
      pass = problems.empty();
      return pass ? std::to_string(cache.surrogate.size()) + " elements" : problems;
    }));
  }
  return out;
}

}  // namespace mehybrid::cli
