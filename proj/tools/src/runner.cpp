#include "effdyn/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "effdyn/cv_search.hpp"
#include "effdyn/effective.hpp"
#include "effdyn/error.hpp"
#include "effdyn/io_util.hpp"
#include "effdyn/kl_objective.hpp"
#include "effdyn/langevin_marginal.hpp"
#include "effdyn/model_io.hpp"
#include "effdyn/parallel.hpp"
#include "effdyn/spectral.hpp"
#include "effdyn/tpt.hpp"
#include "suite.hpp"

#ifndef EFFDYN_VERSION
#define EFFDYN_VERSION "0.0.0"
#endif

namespace effdyn::cli {
namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Lazily built model shared by the subcommands of one run.
class Context {
 public:
  Context(const RunConfig& config, std::size_t threads)
      : config(config), threads(threads), seeds(derive_seeds(config.seed)) {}

  const TransitionModel& model() {
    if (!model_) model_ = build_model(config, threads);
    return *model_;
  }
  std::size_t spectrum_m() {
    const std::size_t n = model().size();
    if (n < 2) throw InputError("the model has a single state");
    return std::min(config.spectrum_m.value_or(3), n - 1);
  }
  const SetPair& sets() const {
    if (!config.sets) throw ConfigError("sets: required by this subcommand");
    return *config.sets;
  }
  CVAssignment cv() {
    if (!config.cv) throw ConfigError("cv: required by this subcommand");
    return config.cv->build(model());
  }

  const RunConfig& config;
  std::size_t threads;
  Seeds seeds;

 private:
  std::optional<TransitionModel> model_;
};

void put_model(Artifacts& a, const std::string& stem, const TransitionModel& model) {
  const auto encoded = encode_model(model, stem + ".bin");
  a.files[stem + ".json"] = dump_json(encoded.header);
  a.files[stem + ".bin"] = encoded.matrix_bytes;
}

Artifacts cmd_build_operator(Context& ctx) {
  Artifacts a;
  const auto& model = ctx.model();
  put_model(a, "model", model);
  a.files["mu.csv"] = mu_csv(model);
  json summary;
  summary["n"] = model.size();
  summary["lag"] = model.lag();
  summary["source"] = to_string(model.source());
  summary["detailed_balance_residual"] = detailed_balance_residual(model);
  summary["reversible"] = is_reversible(model);
  if (summary["reversible"].get<bool>()) {
    const auto nn = nonnegativity_check(model);
    summary["min_eigenvalue"] = nn.min_eigenvalue;
    summary["nonnegative"] = nn.nonnegative;
  }
  a.files["operator.json"] = dump_json(summary);
  a.add("operator.row_sum", (model.P().rowwise().sum().array() - 1.0).abs().maxCoeff(), tolerance::kRowSum);
  a.add("operator.stationarity", (model.P().transpose() * model.mu() - model.mu()).cwiseAbs().maxCoeff(),
        tolerance::kStationarity);
  return a;
}

Artifacts cmd_spectrum(Context& ctx) {
  Artifacts a;
  const auto& model = ctx.model();
  const bool reversible = is_reversible(model);
  const auto rev = reversible ? model : reversible_part(model);
  const auto spec = solve_spectrum(rev, ctx.spectrum_m());
  auto j = spectrum_json(spec, model.lag());
  j["used_reversible_part"] = !reversible;
  if (!reversible) a.notes.push_back("spectrum is that of the reversible part");
  a.files["spectrum.csv"] = spectrum_csv(spec, model.lag());
  a.files["spectrum.json"] = dump_json(j);
  a.add("spectrum.eigen_equation", eigen_residual(rev, spec), 1e-10);
  return a;
}

TPTResult tpt(Context& ctx, bool count) {
  const auto& model = ctx.model();
  auto r = analyze_tpt(model, ctx.sets());
  if (count && ctx.config.counting_steps > 0) {
    const auto chain = simulate_chain(model, ctx.sets().A.front(), ctx.config.counting_steps, ctx.seeds.chain);
    r.k_count = rate_count(chain, ctx.sets(), ctx.config.counting_steps);
  }
  return r;
}

Artifacts cmd_committor(Context& ctx) {
  Artifacts a;
  const auto r = tpt(ctx, false);
  a.files["committor.csv"] = committor_csv(r);
  a.files["tpt.json"] = dump_json(tpt_json(r));
  return a;
}

Artifacts cmd_rates(Context& ctx) {
  Artifacts a;
  const auto r = tpt(ctx, true);
  a.files["rates.csv"] = tpt_rates_csv(r);
  a.files["tpt.json"] = dump_json(tpt_json(r));
  a.add("rates.flux_agreement", std::max(std::abs(r.k_flux_A - r.k_energy), std::abs(r.k_flux_B - r.k_energy)),
        1e-10);
  if (r.k_count) {
    if (!r.k_count->visited_A) a.notes.push_back("the sampled chain never visited A; counted rate is zero");
    a.add("rates.counted_vs_exact", std::abs(r.k_count->rate - r.k_energy), 4.0 * r.k_count->std_error);
  }
  return a;
}

Artifacts cmd_effective(Context& ctx) {
  Artifacts a;
  const auto& model = ctx.model();
  const auto eff = build_effective(model, ctx.cv());
  put_model(a, "effective_model", eff.reduced);
  a.files["effective.json"] = dump_json(effective_json(eff));
  a.files["effective_mu.csv"] = mu_csv(eff.reduced);
  const auto& red = eff.reduced;
  a.add("effective.mu_invariance", (red.P().transpose() * red.mu() - red.mu()).cwiseAbs().maxCoeff(), 1e-12);
  a.add("effective.adjoint_routes", effective_adjoint_route_gap(model, eff.cv), 1e-12);
  return a;
}

Artifacts cmd_compare(Context& ctx) {
  Artifacts a;
  const auto& model = ctx.model();
  const auto cv = ctx.cv();
  const auto cmp = eigen_comparison(model, cv, ctx.spectrum_m());
  a.files["eigen_comparison.csv"] = eigen_comparison_csv(cmp);
  a.files["eigen_comparison.json"] = dump_json(eigen_comparison_json(cmp));
  a.add_flag("compare.eigen_ordering", cmp.ordered);
  a.add("compare.error_identity", cmp.max_residual, 1e-8);
  if (cmp.used_reversible_part) a.notes.push_back("eigenvalue comparison used the reversible part");
  if (ctx.config.reduced_sets) {
    const auto rates = rate_comparison(model, cv, *ctx.config.reduced_sets);
    a.files["rate_comparison.json"] = dump_json(rate_comparison_json(rates));
    a.add("compare.rate_identity", rates.identity_residual, 1e-10);
  }
  json kl;
  kl["kl_score"] = kl_score(model, cv);
  kl["mutual_information_full"] = mutual_information(model);
  kl["mutual_information_reduced"] = mutual_information(build_effective(model, cv).reduced);
  a.files["kl.json"] = dump_json(kl);
  return a;
}

Artifacts cmd_optimize_cv(Context& ctx) {
  Artifacts a;
  if (!ctx.config.family) throw ConfigError("family: required by optimize-cv");
  const auto& model = ctx.model();
  ScanConfig sc;
  sc.objective = ctx.config.objective;
  sc.weights = ObjectiveWeights(ctx.config.weights);
  sc.rates = ctx.config.family->rates;
  sc.threads = ctx.threads;
  const auto family = ctx.config.family->build(ctx.config.grid->dim());
  const auto result = scan(model, family, sc);
  a.files["scan.csv"] = scan_csv(result);
  a.files["scan.json"] = dump_json(scan_json(result));
  return a;
}

Artifacts cmd_langevin_check(Context& ctx) {
  Artifacts a;
  if (!ctx.config.langevin) throw ConfigError("langevin: required by langevin-check");
  const auto& l = *ctx.config.langevin;
  SimConfig sim;
  sim.beta = l.beta;
  sim.dt = l.dt;
  sim.gamma = l.gamma;
  sim.seed = ctx.seeds.langevin;
  sim.n_steps = l.n_steps;
  sim.guard_radius = l.grid.guard_radius();
  const auto model = marginal_model(l.potential, sim, l.lag, l.grid, l.replicas, ctx.threads);
  const Vector reference = gibbs_reference(l.potential, l.beta, model);
  const auto report = detailed_balance_report(model, reference);
  a.files["detailed_balance.json"] = dump_json(detailed_balance_json(report));
  std::string occ = "state,cell,empirical,gibbs\n";
  for (std::size_t s = 0; s < model.size(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    occ += std::to_string(s) + ',' + std::to_string(model.states()->labels[s]) + ',' +
           io::format_double(model.mu()(i)) + ',' + io::format_double(reference(i)) + '\n';
  }
  a.files["occupation.csv"] = occ;
  a.add("langevin.detailed_balance", report.residual, 5.0 * report.std_error + 1e-6);
  return a;
}

Artifacts dispatch(const std::string& command, Context& ctx);
Artifacts finish_checks(Artifacts& a);

Artifacts cmd_verify_all(Context& ctx) {
  Artifacts a;
  if (!ctx.config.has_system()) {
    if (ctx.config.langevin) a.merge(cmd_langevin_check(ctx), "langevin-check/");
    a.merge(fixture_suite(), "");
    return finish_checks(a);
  }
  const auto& model = ctx.model();
  std::vector<std::string> parts{"build-operator", "spectrum"};
  if (ctx.config.sets) parts.insert(parts.end(), {"committor", "rates"});
  if (ctx.config.cv) parts.insert(parts.end(), {"effective", "compare"});
  if (ctx.config.family) parts.push_back("optimize-cv");
  if (ctx.config.langevin) parts.push_back("langevin-check");
  for (const auto& part : parts) a.merge(dispatch(part, ctx), part + "/");
  a.merge(invariant_suite(model, ctx.config, ctx.seeds), "");
  a.merge(fixture_suite(), "");
  return finish_checks(a);
}

Artifacts finish_checks(Artifacts& a) {
  json checks = json::array();
  for (const auto& c : a.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  a.files["checks.json"] = dump_json({{"all_pass", a.all_pass()}, {"checks", checks}, {"notes", a.notes}});
  a.files["checks.csv"] = checks_csv(a.checks);
  return a;
}

Artifacts dispatch(const std::string& command, Context& ctx) {
  if (command == "build-operator") return cmd_build_operator(ctx);
  if (command == "spectrum") return cmd_spectrum(ctx);
  if (command == "committor") return cmd_committor(ctx);
  if (command == "rates") return cmd_rates(ctx);
  if (command == "effective") return cmd_effective(ctx);
  if (command == "compare") return cmd_compare(ctx);
  if (command == "optimize-cv") return cmd_optimize_cv(ctx);
  if (command == "langevin-check") return cmd_langevin_check(ctx);
  if (command == "verify-all") return cmd_verify_all(ctx);
  throw ConfigError("unknown subcommand '" + command + "'");
}

void write_all(const std::filesystem::path& out, const Artifacts& a, const std::string& manifest_text) {
  for (const auto& [name, bytes] : a.files) {
    const auto path = out / name;
    std::filesystem::create_directories(path.parent_path());
    io::write_file_atomic(path, bytes);
  }
  io::write_file_atomic(out / "manifest.json", manifest_text);
}

}  // namespace

void Artifacts::add(std::string name, double value, double tolerance) {
  checks.push_back({std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance});
}

void Artifacts::add_flag(std::string name, bool pass) {
  checks.push_back({std::move(name), pass ? 0.0 : 1.0, 0.0, pass});
}

bool Artifacts::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void Artifacts::merge(const Artifacts& other, const std::string& prefix) {
  for (const auto& [name, bytes] : other.files) files[prefix + name] = bytes;
  for (auto c : other.checks) {
    c.name = prefix + c.name;
    checks.push_back(std::move(c));
  }
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"build-operator", "spectrum",    "committor",
                                              "rates",          "effective",   "compare",
                                              "optimize-cv",    "langevin-check", "verify-all"};
  return names;
}

std::string usage() {
  std::string u = "usage: effdyn <subcommand> --config <path> [--out <dir>] [--seed <u64>] "
                  "[--threads <n>] [--strict]\n\nsubcommands:\n";
  for (const auto& s : subcommands()) u += "  " + s + "\n";
  u += "\nexit codes: 0 ok, 2 invalid input, 3 invariant failure, 64 usage\n";
  return u;
}

std::string checks_csv(const std::vector<Check>& checks) {
  std::string out = "name,value,tolerance,pass\n";
  for (const auto& c : checks) {
    out += c.name + ',' + io::format_double(c.value) + ',' + io::format_double(c.tolerance) + ',' +
           (c.pass ? "1" : "0") + '\n';
  }
  return out;
}

Artifacts execute(const std::string& command, const RunConfig& config, std::size_t threads) {
  Context ctx(config, threads);
  return dispatch(command, ctx);
}

std::string manifest(const std::string& command, const RunConfig& config, const Artifacts& artifacts) {
  const auto seeds = derive_seeds(config.seed);
  json m;
  m["tool"] = "effdyn";
  m["version"] = EFFDYN_VERSION;
  m["subcommand"] = command;
  m["config"] = config.name;
  m["config_fnv1a64"] = hex64(io::fnv1a64(config.text));
  m["seeds"] = {{"base", config.seed},
                {"operator", seeds.operator_sim},
                {"chain", seeds.chain},
                {"langevin", seeds.langevin},
                {"probes", seeds.probes}};
  m["libraries"] = {
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  json files = json::array();
  for (const auto& [name, bytes] : artifacts.files) {
    files.push_back({{"path", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(io::fnv1a64(bytes))}});
  }
  m["artifacts"] = files;
  m["all_checks_pass"] = artifacts.all_pass();
  return dump_json(m);
}

int run(const Options& options, std::ostream& log) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    log << "effdyn: unknown subcommand '" << options.command << "'\n" << usage();
    return kExitUsage;
  }
  try {
    auto config = load_config(options.config);
    if (options.seed) config.seed = *options.seed;
    const auto artifacts = execute(options.command, config, resolve_threads(options.threads));
    write_all(options.out, artifacts, manifest(options.command, config, artifacts));

    for (const auto& note : artifacts.notes) log << "note: " << note << '\n';
    std::size_t failed = 0;
    for (const auto& c : artifacts.checks) {
      if (c.pass) continue;
      ++failed;
      log << "check failed: " << c.name << " = " << c.value << " (tolerance " << c.tolerance << ")\n";
    }
    if (failed == 0) return kExitOk;
    // verify-all exists to judge invariants; other subcommands only fail under --strict.
    return options.command == "verify-all" || options.strict ? kExitInvariant : kExitOk;
  } catch (const InvariantFailure& e) {
    log << "invariant failure: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const SimulationBlowup& e) {
    log << "simulation blowup at step " << e.step() << ": " << e.what() << '\n';
    return kExitInvariant;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Effective dynamics and collective-variable analysis of Markov chains"};
  app.set_help_flag("-h,--help", "Print this help and exit");
  Options options;
  std::string command;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  app.add_option("subcommand", command, "One of: build-operator, spectrum, committor, rates, effective, "
                                        "compare, optimize-cv, langevin-check, verify-all")
      ->required();
  app.add_option("--config", options.config, "JSON configuration file")->required();
  app.add_option("--out", options.out, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Overrides the config seed");
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads (default: EFFDYN_THREADS, else all cores)")
          ->check(CLI::PositiveNumber);
  app.add_flag("--strict", options.strict, "Exit 3 when any tolerance check fails");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << '\n' << usage();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // A bad subcommand name is a usage error even when other flags are missing.
    if (!command.empty() &&
        std::find(subcommands().begin(), subcommands().end(), command) == subcommands().end()) {
      std::cerr << "effdyn: unknown subcommand '" << command << "'\n" << usage();
      return kExitUsage;
    }
    std::cerr << "effdyn: " << e.what() << '\n' << usage();
    return command.empty() ? kExitUsage : kExitValidation;
  }
  options.command = command;
  if (*seed_opt) options.seed = seed;
  if (*threads_opt) options.threads = threads;
  return run(options, std::cerr);
}

}  // namespace effdyn::cli
