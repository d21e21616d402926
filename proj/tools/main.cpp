#include <iostream>

#include <CLI11.hpp>

#include <mehybrid/errors.hpp>

#include "cli.hpp"

using namespace mehybrid;
using namespace mehybrid::cli;

namespace {

json read_config(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
}

int cmd_estimate(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = parse_config(apply_overrides(read_config(config_path), sets));
  const auto report = run(cfg);
  write_outputs(cfg, report);
  std::cout << report.to_json().dump(2) << '\n';
  return kExitOk;
}

int cmd_table(int n, const TableOptions& opts, const std::string& out) {
  const auto csv = table_csv(table(n, opts));
  if (out.empty())
    std::cout << csv;
  else
    write_file(out, csv);
  return kExitOk;
}

int cmd_validate(const std::string& cache) {
  const auto results = validate(cache.empty() ? std::nullopt : std::optional<std::string>(cache));
  std::size_t passed = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  " << r.detail << '\n';
    passed += r.pass ? 1 : 0;
  }
  std::cout << passed << '/' << results.size() << " checks passed\n";
  return passed == results.size() ? kExitOk : kExitNumerical;
}

int cmd_refine(const std::string& problem, int order, const std::string& cache, const std::string& events,
               const std::vector<std::string>& sets) {
  json doc{{"problem", problem}, {"method", "me-gha"}, {"surrogate", "adaptive"}, {"order", order},
           {"m", 1},             {"delta_m", 1},       {"seed", 0}};
  auto cfg = parse_config(apply_overrides(doc, sets));
  if (cfg.surrogate != "adaptive" && cfg.surrogate != "global")
    throw UsageError("refine: surrogate must be 'adaptive' or 'global'");
  const auto spec = make_problem(cfg.problem, cfg.params);
  auto model = spec.make_model();
  const auto build = build_surrogate(cfg, spec, *model);
  const json meta{{"problem", cfg.problem},
                  {"params", config_to_json(cfg).at("params")},
                  {"kind", cfg.surrogate},
                  {"order", cfg.order},
                  {"n_construction", build.model_calls},
                  {"config", config_to_json(cfg)}};
  save_surrogate(cache, build.surrogate, meta);
  if (!events.empty()) write_file(events, events_csv(build.events));
  std::cout << json{{"problem", cfg.problem},
                    {"elements", build.surrogate.size()},
                    {"n_construction", build.model_calls},
                    {"truncated", build.truncated},
                    {"splits", build.events.size()},
                    {"cache", cache}}
                   .dump(2)
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-element surrogates and hybrid failure-probability estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  auto* estimate = app.add_subcommand("estimate", "Run one estimation from a JSON config");
  estimate->add_option("--config", config_path, "JSON run configuration")->required();
  estimate->add_option("--set", sets, "Override a config field, e.g. --set refine.theta1=1e-4");

  int table_n = 0;
  TableOptions table_opts;
  std::string table_out;
  auto* tab = app.add_subcommand("table", "Recompute one of the benchmark tables as CSV");
  tab->add_option("n", table_n, "Table number (1-5)")->required()->check(CLI::Range(1, 5));
  tab->add_option("--m", table_opts.m, "Samples per run");
  tab->add_option("--seed", table_opts.seed, "Sample seed");
  tab->add_option("--threads", table_opts.threads, "Threads for exact evaluations");
  tab->add_option("--out", table_out, "Write the CSV here instead of stdout");

  std::string validate_cache;
  auto* val = app.add_subcommand("validate", "Run the fast invariant checks");
  val->add_option("--cache", validate_cache, "Also check the mesh of this surrogate cache");

  std::string refine_problem, refine_cache, refine_events;
  int refine_order = 3;
  std::vector<std::string> refine_sets;
  auto* ref = app.add_subcommand("refine", "Build an adaptive surrogate and store it");
  ref->add_option("--problem", refine_problem, "Problem name")->required();
  ref->add_option("--cache", refine_cache, "Output surrogate cache (JSON)")->required();
  ref->add_option("--order", refine_order, "Polynomial order");
  ref->add_option("--events", refine_events, "Write the refinement events as CSV");
  ref->add_option("--set", refine_sets, "Override a config field, e.g. --set refine.theta1=1e-4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*estimate) return cmd_estimate(config_path, sets);
    if (*tab) return cmd_table(table_n, table_opts, table_out);
    if (*val) return cmd_validate(validate_cache);
    if (*ref) return cmd_refine(refine_problem, refine_order, refine_cache, refine_events, refine_sets);
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
