#include "hetnet_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>

#include "hetnet/diagnostics.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet_cli/version.hpp"

namespace hetnet::cli {
namespace {

namespace fs = std::filesystem;

fs::path output_path(const ExperimentConfig& cfg, RunMetadata& meta, const std::string& name) {
  meta.outputs.push_back(name);
  return fs::path(cfg.out_dir) / name;
}

const std::vector<double>& require_grid(const std::vector<double>& grid, const char* key) {
  if (grid.empty()) throw ConfigError(key, "required by this command");
  return grid;
}

std::vector<int> analytic_dofs(const ExperimentConfig& cfg) {
  return cfg.analysis.in_dof.empty() ? std::vector<int>{cfg.network.in_dof} : cfg.analysis.in_dof;
}

void put_estimate(CsvWriter& csv, const CoverageEstimate& e) {
  csv.cell(e.covered).cell(e.trials).cell(e.value).cell(e.ci.lower).cell(e.ci.upper);
}

Json diagnostics_json(const SimulationDiagnostics& d) {
  return Json{{"window_guard_fraction", d.window_guard_fraction},
              {"disc_boundary_fraction", d.disc_boundary_fraction},
              {"max_nulled_gain", d.max_nulled_gain}};
}

std::string scheme_label(const SchemeSpec& s) {
  return s.variant == SchemeSpec::Variant::IN ? "in(U=" + std::to_string(s.in_dof) + ")"
                                              : "abs(eta=" + format_number(s.abs_fraction) + ")";
}

}  // namespace

void run_analytic(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out) {
  const auto& tau = require_grid(cfg.analysis.tau, "analysis.tau");
  const std::vector<int> dofs = analytic_dofs(cfg);
  const CoverageAnalyzer analyzer(cfg.network, cfg.analysis.numerics);

  CsvWriter csv(output_path(cfg, meta, "analytic.csv"),
                {"tau", "model", "in_dof", "total", "macro", "pico_unoffloaded", "offloaded_in",
                 "offloaded_non_in", "weight_macro", "weight_pico_unoffloaded",
                 "weight_offloaded_in", "weight_offloaded_non_in", "truncated_mass"});
  for (LoadModel model : cfg.analysis.load_models) {
    std::vector<RatePieces> pieces(tau.size());
    parallel_for(tau.size(), cfg.analysis.threads,
                 [&](std::size_t i) { pieces[i] = analyzer.pieces(tau[i], model); });
    for (std::size_t i = 0; i < tau.size(); ++i) {
      for (int U : dofs) {
        const CoverageBreakdown b = analyzer.assemble(pieces[i], U);
        csv.cell(tau[i]).cell(to_string(model)).cell(U).cell(b.total);
        for (UserClass k : kUserClasses) csv.cell(b.coverage(k));
        for (UserClass k : kUserClasses) csv.cell(b.weight(k));
        csv.cell(b.truncated_mass);
        csv.end_row();
      }
    }
  }
  csv.close();
  const AssociationProbabilities& a = analyzer.association().probabilities();
  meta.summary = Json{{"association",
                       {{"macro", a.macro}, {"pico_unoffloaded", a.pico_unoffloaded},
                        {"offloaded", a.offloaded}}},
                      {"tau_points", tau.size()},
                      {"in_dof", dofs}};
  out << "analytic: " << tau.size() << " tau values x " << dofs.size() << " U values x "
      << cfg.analysis.load_models.size() << " load models\n";
}

void run_simulate(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out) {
  const auto& tau = require_grid(cfg.analysis.tau, "analysis.tau");
  const SchemeSpec& scheme = cfg.simulation.scheme;
  const TrialSet set = simulate_trials(cfg.network, cfg.simulation.options);
  const CoverageReport rep = coverage_report(set, scheme, tau);

  CsvWriter csv(output_path(cfg, meta, "simulate.csv"),
                {"tau", "class", "covered", "trials", "coverage", "ci_lower", "ci_upper"});
  for (std::size_t i = 0; i < tau.size(); ++i) {
    csv.cell(tau[i]).cell("total");
    put_estimate(csv, rep.total[i]);
    csv.end_row();
    for (UserClass k : kUserClasses) {
      csv.cell(tau[i]).cell(to_string(k));
      put_estimate(csv, rep.per_class[index(k)][i]);
      csv.end_row();
    }
    csv.cell(tau[i]).cell("offloaded");
    put_estimate(csv, rep.offloaded[i]);
    csv.end_row();
  }
  csv.close();

  if (cfg.simulation.dump_realizations) {
    std::ofstream dump(output_path(cfg, meta, "simulate_realizations.csv"), std::ios::binary);
    write_realization_dump(dump, set, scheme);
    if (!dump) throw std::runtime_error("cannot write simulate_realizations.csv");
  }

  Json counts = Json::object();
  for (UserClass k : kUserClasses) counts[std::string(to_string(k))] = rep.class_counts[index(k)];
  meta.summary = Json{{"scheme", scheme_label(scheme)},
                      {"trials", rep.trials},
                      {"fidelity", to_string(rep.fidelity)},
                      {"class_counts", counts},
                      {"diagnostics", diagnostics_json(rep.diagnostics)}};
  out << "simulate: " << rep.trials << " trials, scheme " << scheme_label(scheme) << ", "
      << tau.size() << " tau values\n";
}

void run_optimize_u(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out) {
  const auto& tau = require_grid(cfg.analysis.tau, "analysis.tau");
  const Engine engine = cfg.optimize.engine;
  std::vector<OptimizationResult> results(tau.size());
  if (engine == Engine::MonteCarlo) {
    const TrialSet set = simulate_trials(cfg.network, cfg.simulation.options);
    for (std::size_t i = 0; i < tau.size(); ++i) results[i] = optimal_in_dof(tau[i], set);
  } else {
    const CoverageAnalyzer analyzer(cfg.network, cfg.analysis.numerics);
    const LoadModel model = engine == Engine::AnalyticExact ? LoadModel::Exact : LoadModel::MeanLoad;
    parallel_for(tau.size(), cfg.analysis.threads,
                 [&](std::size_t i) { results[i] = optimal_in_dof(tau[i], analyzer, model); });
  }

  CsvWriter best(output_path(cfg, meta, "optimize-u.csv"), {"tau", "engine", "u_star", "objective"});
  CsvWriter trace(output_path(cfg, meta, "optimize-u_trace.csv"),
                  {"tau", "engine", "in_dof", "objective"});
  Json optima = Json::array();
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const OptimizationResult& r = results[i];
    const int u_star = static_cast<int>(r.argmax);
    best.cell(tau[i]).cell(to_string(engine)).cell(u_star).cell(r.value);
    best.end_row();
    for (std::size_t j = 0; j < r.grid.size(); ++j) {
      trace.cell(tau[i]).cell(to_string(engine)).cell(static_cast<int>(r.grid[j])).cell(r.trace[j]);
      trace.end_row();
    }
    optima.push_back(u_star);
  }
  best.close();
  trace.close();
  meta.summary = Json{{"engine", to_string(engine)}, {"tau", tau}, {"u_star", optima}};
  out << "optimize-u (" << to_string(engine) << "):";
  for (std::size_t i = 0; i < tau.size(); ++i)
    out << ' ' << format_number(tau[i]) << "->" << optima[i].get<int>();
  out << '\n';
}

void run_optimize_abs(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out) {
  const auto& tau = require_grid(cfg.analysis.tau, "analysis.tau");
  const TrialSet set = simulate_trials(cfg.network, cfg.simulation.options);

  CsvWriter best(output_path(cfg, meta, "optimize-abs.csv"),
                 {"tau", "eta_star", "objective", "unimodal"});
  CsvWriter trace(output_path(cfg, meta, "optimize-abs_trace.csv"), {"tau", "eta", "objective"});
  Json optima = Json::array();
  for (double t : tau) {
    const OptimizationResult r = optimal_abs_fraction(t, set, cfg.optimize.abs_iterations);
    best.cell(t).cell(r.argmax).cell(r.value).cell(r.unimodal ? "true" : "false");
    best.end_row();
    for (std::size_t j = 0; j < r.grid.size(); ++j) {
      trace.cell(t).cell(r.grid[j]).cell(r.trace[j]);
      trace.end_row();
    }
    optima.push_back(r.argmax);
  }
  best.close();
  trace.close();
  meta.summary = Json{{"tau", tau},
                      {"eta_star", optima},
                      {"trials", set.size()},
                      {"diagnostics", diagnostics_json(set.diagnostics())}};
  out << "optimize-abs:";
  for (std::size_t i = 0; i < tau.size(); ++i)
    out << ' ' << format_number(tau[i]) << "->" << format_number(optima[i].get<double>());
  out << '\n';
}

void run_sweep_bias(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out) {
  const auto& bias = require_grid(cfg.sweep.bias_db, "sweep.bias_db");
  const BiasSweep sweep =
      bias_sweep(cfg.sweep.tau, cfg.network, bias, cfg.simulation.options, cfg.sweep.schemes);

  CsvWriter csv(output_path(cfg, meta, "sweep-bias.csv"),
                {"bias_db", "scheme", "parameter", "total", "total_ci_lower", "total_ci_upper",
                 "macro", "pico_unoffloaded", "offloaded", "offloaded_ci_lower",
                 "offloaded_ci_upper", "offloaded_trials", "trials", "best"});
  for (const SweepPoint& p : sweep.points) {
    const bool is_best = &sweep.best(p.scheme) == &p;
    csv.cell(p.bias_db).cell(to_string(p.scheme)).cell(p.parameter);
    csv.cell(p.total.value).cell(p.total.ci.lower).cell(p.total.ci.upper);
    csv.cell(p.macro.value).cell(p.pico_unoffloaded.value);
    csv.cell(p.offloaded.value).cell(p.offloaded.ci.lower).cell(p.offloaded.ci.upper);
    csv.cell(p.offloaded.trials).cell(p.total.trials).cell(is_best ? "true" : "false");
    csv.end_row();
  }
  csv.close();

  Json best = Json::object();
  out << "sweep-bias at tau = " << format_number(sweep.tau) << '\n';
  for (SweepScheme s : sweep.schemes) {
    const SweepPoint& p = sweep.best(s);
    best[std::string(to_string(s))] = Json{{"bias_db", p.bias_db},
                                           {"parameter", p.parameter},
                                           {"total", p.total.value},
                                           {"offloaded", p.offloaded.value}};
    out << "  " << std::left << std::setw(4) << to_string(s) << " B* = " << format_number(p.bias_db)
        << " dB, parameter " << format_number(p.parameter) << ", coverage "
        << format_number(p.total.value) << ", offloaded " << format_number(p.offloaded.value)
        << '\n';
  }
  meta.summary = Json{{"tau", sweep.tau}, {"best", best}};
}

void run_validate(const ExperimentConfig& cfg, RunMetadata& meta, std::ostream& out) {
  const auto& tau = cfg.validate.tau.empty() ? require_grid(cfg.analysis.tau, "validate.tau")
                                             : cfg.validate.tau;
  const int U = cfg.network.in_dof;
  const CoverageAnalyzer analyzer(cfg.network, cfg.analysis.numerics);
  std::vector<double> exact(tau.size()), mla(tau.size());
  parallel_for(tau.size(), cfg.analysis.threads, [&](std::size_t i) {
    exact[i] = analyzer.assemble(analyzer.pieces(tau[i], LoadModel::Exact), U).total;
    mla[i] = analyzer.assemble(analyzer.pieces(tau[i], LoadModel::MeanLoad), U).total;
  });
  const TrialSet set = simulate_trials(cfg.network, cfg.simulation.options);
  const CoverageReport rep = coverage_report(set, SchemeSpec::in(U), tau);

  CsvWriter csv(output_path(cfg, meta, "validate.csv"),
                {"tau", "exact", "mla", "monte_carlo", "mc_ci_lower", "mc_ci_upper",
                 "dev_exact_mc", "dev_mla_exact"});
  double max_exact_mc = 0.0, max_mla_exact = 0.0, max_mla_mc = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const CoverageEstimate& mc = rep.total[i];
    const double d1 = std::abs(exact[i] - mc.value);
    const double d2 = std::abs(mla[i] - exact[i]);
    max_exact_mc = std::max(max_exact_mc, d1);
    max_mla_exact = std::max(max_mla_exact, d2);
    max_mla_mc = std::max(max_mla_mc, std::abs(mla[i] - mc.value));
    csv.cell(tau[i]).cell(exact[i]).cell(mla[i]).cell(mc.value).cell(mc.ci.lower).cell(mc.ci.upper);
    csv.cell(d1).cell(d2);
    csv.end_row();
  }
  csv.close();

  const bool pass = max_exact_mc <= cfg.validate.tolerance;
  meta.summary = Json{{"in_dof", U},
                      {"trials", rep.trials},
                      {"max_abs_exact_vs_mc", max_exact_mc},
                      {"max_abs_mla_vs_exact", max_mla_exact},
                      {"max_abs_mla_vs_mc", max_mla_mc},
                      {"tolerance", cfg.validate.tolerance},
                      {"pass", pass},
                      {"diagnostics", diagnostics_json(rep.diagnostics)}};
  out << "max |exact - mc| = " << format_number(max_exact_mc) << '\n'
      << "max |mla - exact| = " << format_number(max_mla_exact) << '\n'
      << "max |mla - mc| = " << format_number(max_mla_mc) << '\n'
      << (pass ? "PASS" : "FAIL") << " (tolerance " << format_number(cfg.validate.tolerance)
      << ", " << rep.trials << " trials)\n";
  if (!pass)
    throw ValidationFailure("max |exact - mc| = " + format_number(max_exact_mc) +
                            " exceeds tolerance " + format_number(cfg.validate.tolerance));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate coverage analysis and simulation for two-tier networks with interference nulling",
               "hetnet"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::string fidelity, out_dir;
  app.add_option("-c,--config", config_path, "JSON configuration file")->required();
  app.add_option("--set", overrides, "Override a config value, e.g. network.bias_db=10")
      ->take_all()
      ->allow_extra_args(false);
  CLI::Option* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials")
                                ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Random seed");
  CLI::Option* fidelity_opt =
      app.add_option("--fidelity", fidelity, "Channel model")->check(CLI::IsMember({"fast", "full"}));
  CLI::Option* out_opt = app.add_option("--out-dir", out_dir, "Directory for CSV and JSON output");

  using Handler = void (*)(const ExperimentConfig&, RunMetadata&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"analytic", "Rate coverage curves from the exact and mean-load analyses", run_analytic},
      {"simulate", "Monte Carlo coverage report", run_simulate},
      {"optimize-u", "Optimal number of nulled users per tau", run_optimize_u},
      {"optimize-abs", "Optimal almost-blank-subframe fraction per tau", run_optimize_abs},
      {"sweep-bias", "Coverage of IN, U = 0 and ABS across bias values", run_sweep_bias},
      {"validate", "Analytic versus Monte Carlo cross-check", run_validate},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string command;
  Handler handler = nullptr;
  for (const auto& [name, help, fn] : commands)
    if (app.got_subcommand(name)) command = name, handler = fn;

  std::vector<std::string> warnings;
  std::mutex warnings_mutex;
  const WarningHandler previous = set_warning_handler([&](std::string_view msg) {
    std::lock_guard lock(warnings_mutex);
    warnings.emplace_back(msg);
    err << "warning: " << msg << '\n';
  });
  struct Restore {
    WarningHandler h;
    ~Restore() { set_warning_handler(std::move(h)); }
  } restore{previous};

  try {
    Json doc = load_config_file(config_path);
    for (const std::string& o : overrides) apply_override(doc, o);
    if (*trials_opt) apply_override(doc, "simulation.trials=" + std::to_string(trials));
    if (*seed_opt) apply_override(doc, "simulation.seed=" + std::to_string(seed));
    if (*fidelity_opt) doc["simulation"]["fidelity"] = fidelity;
    if (*out_opt) doc["output"]["dir"] = out_dir;
    const ExperimentConfig cfg = parse_config(doc);
    fs::create_directories(cfg.out_dir);

    RunMetadata meta;
    meta.command = command;
    meta.seed = cfg.simulation.options.seed;
    const auto start = std::chrono::steady_clock::now();
    int code = kExitOk;
    try {
      handler(cfg, meta, out);
    } catch (const ValidationFailure& e) {
      err << "error: " << e.what() << '\n';
      code = kExitValidation;
    }
    meta.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
      std::lock_guard lock(warnings_mutex);
      meta.warnings = warnings;
    }
    out << "wrote " << write_sidecar(cfg, meta).string() << '\n';
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericAccuracyError& e) {
    err << "numeric accuracy error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InsufficientWindowError& e) {
    err << "simulation window error: " << e.what() << '\n';
    return kExitWindow;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace hetnet::cli
