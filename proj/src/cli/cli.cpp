#include "mincond/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "cli/output.hpp"
#include "mincond/designs.hpp"
#include "mincond/errors.hpp"
#include "mincond/search.hpp"
#include "mincond/simulate.hpp"

namespace mincond::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string output;
  std::string format;  // empty: command default
};

// What a command produced, before it is written anywhere.
struct CommandOutput {
  std::string body;
  std::string default_name;
  json config = json::object();  // resolved flags, replayable
  json metadata = json::object();
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string resolve_format(const GlobalOptions& g, std::string_view fallback) {
  return g.format.empty() ? std::string(fallback) : g.format;
}

std::string render(const Table& table, const std::string& format) {
  if (format == "json") return to_json(table).dump(2) + "\n";
  return to_csv(table);
}

Scheme require_scheme(const std::string& name) {
  const auto scheme = parse_scheme(name);
  if (!scheme) {
    throw UsageError("unknown scheme '" + name +
                     "'; expected optimal, theorem_even_a, theorem_even_b, theorem_small_odd, "
                     "theorem_large_odd, baseline_semicircle or baseline_circle");
  }
  return *scheme;
}

AngleSet build_design(int n, Scheme scheme) {
  if (!applies(scheme, n)) {
    throw UsageError(std::string(to_string(scheme)) + " does not apply to n = " +
                     std::to_string(n) + ": requires " + std::string(applicability(scheme)));
  }
  return make_design({n, scheme});
}

std::string_view optimal_scheme_name(int n) {
  if (n % 2 == 0) return to_string(Scheme::TheoremEvenB);
  if (n <= 5) return to_string(Scheme::TheoremSmallOdd);
  return to_string(Scheme::TheoremLargeOdd);
}

json subset_json(const SubsetSelection& s) {
  json arr = json::array();
  for (std::size_t i : s.indices()) arr.push_back(i);
  return arr;
}

std::string join_numbers(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += format_number(values[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// design

struct DesignOptions {
  int n = 0;
  std::string scheme = "optimal";
};

CommandOutput cmd_design(const DesignOptions& o, const GlobalOptions& g) {
  const Scheme scheme = require_scheme(o.scheme);
  const AngleSet design = build_design(o.n, scheme);

  Table t{{"index", "angle_rad", "angle_rad_raw", "x", "y"}, {}};
  for (std::size_t i = 0; i < design.size(); ++i) {
    const double raw = design.raw()[i];
    t.add_row({i, design[i], raw, std::cos(raw), std::sin(raw)});
  }
  const std::string format = resolve_format(g, "csv");
  CommandOutput out;
  out.body = render(t, format);
  out.default_name = "design_n" + std::to_string(o.n) + "_" + o.scheme + "." + format;
  out.config = {{"n", o.n}, {"scheme", o.scheme}};
  return out;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string angles_file;
  std::optional<int> n;
  std::string scheme = "optimal";
  int k = 3;
};

CommandOutput cmd_evaluate(const EvaluateOptions& o, const GlobalOptions& g) {
  if (o.angles_file.empty() == !o.n.has_value()) {
    throw UsageError("evaluate needs exactly one of --angles FILE or --n N [--scheme S]");
  }
  AngleSet angles;
  CommandOutput out;
  if (!o.angles_file.empty()) {
    angles = AngleSet(read_angle_csv(o.angles_file));
    out.config = {{"angles", o.angles_file}, {"k", o.k}};
  } else {
    angles = build_design(*o.n, require_scheme(o.scheme));
    out.config = {{"n", *o.n}, {"scheme", o.scheme}, {"k", o.k}};
  }
  if (o.k < 1 || static_cast<std::size_t>(o.k) > angles.size()) {
    throw UsageError("k = " + std::to_string(o.k) + " must satisfy 1 <= k <= n = " +
                     std::to_string(angles.size()));
  }
  const WorstCaseReport r = worst_subset(angles, static_cast<std::size_t>(o.k));
  const SigmaMinResult sm = worst_sigma_min(angles, static_cast<std::size_t>(o.k));

  const std::string format = resolve_format(g, "json");
  if (format == "json") {
    json report = {
        {"n", angles.size()},
        {"k", o.k},
        {"worst_subset", subset_json(r.worst_subset)},
        {"pair_cosine_sum", r.objective},
        {"lambda_min", r.summary.lambda_min},
        {"lambda_max", r.summary.lambda_max},
        {"gram_condition", number_or_sentinel(r.summary.gram_condition)},
        {"matrix_condition", number_or_sentinel(r.summary.matrix_condition)},
        {"sigma_min", sm.sigma_min},
        {"sigma_min_subset", subset_json(sm.subset)},
        {"subsets_evaluated", r.subsets_evaluated},
    };
    out.body = report.dump(2) + "\n";
  } else {
    Table t{{"n", "k", "worst_subset", "pair_cosine_sum", "lambda_min", "lambda_max",
             "gram_condition", "matrix_condition", "sigma_min", "subsets_evaluated"},
            {}};
    t.add_row({angles.size(), o.k, r.worst_subset.to_string(), r.objective, r.summary.lambda_min,
               r.summary.lambda_max, r.summary.gram_condition, r.summary.matrix_condition,
               sm.sigma_min, r.subsets_evaluated});
    out.body = to_csv(t);
  }
  out.default_name = "evaluate." + format;
  return out;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  int n_min = 3;
  int n_max = 15;
  int grid = 180;
  int grid_max_n = 5;
  int refine_iterations = 200;
};

CommandOutput cmd_verify(const VerifyOptions& o, const GlobalOptions& g) {
  if (o.n_min < 3 || o.n_max < o.n_min) throw UsageError("verify needs 3 <= n-min <= n-max");
  constexpr std::size_t k = 3;
  Table t{{"n", "theorem_scheme", "theorem_objective", "theorem_gram_condition",
           "semicircle_objective", "semicircle_gram_condition", "circle_objective",
           "circle_gram_condition", "grid_objective", "grid_gram_condition",
           "grid_minus_theorem", "circle_matches_theorem", "theorem_below_semicircle"},
          {}};
  for (int n = o.n_min; n <= o.n_max; ++n) {
    const WorstCaseReport th = worst_subset(design_optimal(n), k);
    const WorstCaseReport semi = worst_subset(baseline_semicircle(n), k);
    const WorstCaseReport circ = worst_subset(baseline_circle(n), k);
    json grid_obj, grid_cond, grid_gap;
    if (n <= o.grid_max_n) {
      MinimaxSearchConfig cfg;
      cfg.n = n;
      cfg.k = static_cast<int>(k);
      cfg.grid_points_per_angle = o.grid;
      cfg.refine_iterations = o.refine_iterations;
      cfg.seed = g.seed;
      const MinimaxSearchResult res = minimax_grid_search(cfg);
      grid_obj = res.report.objective;
      grid_cond = res.report.summary.gram_condition;
      grid_gap = res.report.objective - th.objective;
    }
    t.add_row({n, optimal_scheme_name(n), th.objective, th.summary.gram_condition,
               semi.objective, semi.summary.gram_condition, circ.objective,
               circ.summary.gram_condition, grid_obj, grid_cond, grid_gap,
               std::abs(circ.objective - th.objective) <= 1e-12,
               th.objective < semi.objective});
  }
  const std::string format = resolve_format(g, "csv");
  CommandOutput out;
  out.body = render(t, format);
  out.default_name = "verify." + format;
  out.config = {{"n-min", o.n_min},
                {"n-max", o.n_max},
                {"grid", o.grid},
                {"grid-max-n", o.grid_max_n},
                {"refine-iterations", o.refine_iterations}};
  return out;
}

// ---------------------------------------------------------------------------
// simulate-estimation

struct EstimationOptions {
  int n_min = 3;
  int n_max = 15;
  int trials = 2000;
  double noise_std = 1.0;
  std::vector<double> signal{9.0, 9.0};
};

CommandOutput cmd_simulate_estimation(const EstimationOptions& o, const GlobalOptions& g) {
  if (o.n_min < 3 || o.n_max < o.n_min) {
    throw UsageError("simulate-estimation needs 3 <= n-min <= n-max");
  }
  if (o.signal.size() != 2) throw UsageError("--signal takes two values, e.g. 9,9");
  if (o.trials < 1 || !(o.noise_std > 0.0)) {
    throw UsageError("--trials must be >= 1 and --noise-std > 0");
  }
  Table t{{"n", "design", "scheme", "worst_subset", "gram_condition", "mse", "std_error",
           "expected_mse", "status"},
          {}};
  for (int n = o.n_min; n <= o.n_max; ++n) {
    const std::pair<std::string, Scheme> designs[] = {
        {"optimal", Scheme::OptimalAuto}, {"semicircle", Scheme::BaselineSemicircle}};
    for (const auto& [label, scheme] : designs) {
      const std::string scheme_name = scheme == Scheme::OptimalAuto
                                          ? std::string(optimal_scheme_name(n))
                                          : std::string(to_string(scheme));
      EstimationScenario sc;
      sc.angles = make_design({n, scheme});
      sc.signal = {o.signal[0], o.signal[1]};
      sc.noise_std = o.noise_std;
      sc.trials = o.trials;
      sc.seed = g.seed;
      const WorstCaseReport worst = worst_subset(sc.angles, sc.k);
      try {
        const MseEstimate m = simulate_subset_mse(sc, worst.worst_subset);
        t.add_row({n, label, scheme_name, worst.worst_subset.to_string(),
                   worst.summary.gram_condition, m.mse, m.std_error, m.expected_mse, "ok"});
      } catch (const SingularityError& e) {
        t.add_row({n, label, scheme_name, worst.worst_subset.to_string(),
                   worst.summary.gram_condition, nullptr, nullptr, nullptr,
                   std::string("singular: ") + e.what()});
      }
    }
  }
  const std::string format = resolve_format(g, "csv");
  CommandOutput out;
  out.body = render(t, format);
  out.default_name = "estimation." + format;
  out.config = {{"n-min", o.n_min},
                {"n-max", o.n_max},
                {"trials", o.trials},
                {"noise-std", format_number(o.noise_std)},
                {"signal", join_numbers(o.signal)}};
  out.metadata = {{"rng_algorithm", kRngAlgorithm}};
  return out;
}

// ---------------------------------------------------------------------------
// simulate-monitoring

struct MonitoringOptions {
  int n = 10;
  std::vector<double> snr{10, 15, 20, 25, 30, 35, 40};
  int trials = 2000;
  double amplitude = 1.0;
  double path_loss = 2.0;
  double radius = 1.0;
  std::string fim_scale = "natural";
  int locator_grid = 101;
};

CommandOutput cmd_simulate_monitoring(const MonitoringOptions& o, const GlobalOptions& g) {
  if (o.n < 3) throw UsageError("simulate-monitoring needs n >= 3");
  if (o.snr.empty()) throw UsageError("--snr needs at least one value");
  if (o.trials < 1) throw UsageError("--trials must be >= 1");
  Table t{{"design", "snr_db", "shadow_std", "worst_subset", "fim_condition", "mse", "std_error",
           "mse_db", "mse_db_se", "boundary_hits", "trials", "status"},
          {}};
  const std::pair<std::string, Scheme> designs[] = {{"optimal", Scheme::OptimalAuto},
                                                    {"semicircle", Scheme::BaselineSemicircle}};
  for (const auto& [label, scheme] : designs) {
    RssScenario sc;
    sc.sensor_radius = o.radius;
    sc.sensors = place_on_circle(make_design({o.n, scheme}), o.radius);
    sc.amplitude = o.amplitude;
    sc.path_loss = o.path_loss;
    sc.trials = o.trials;
    sc.seed = g.seed;
    sc.fim_scale = o.fim_scale == "base10" ? FimScale::Base10 : FimScale::NaturalLog;
    sc.locator_grid = o.locator_grid;
    try {
      const auto points = simulate_monitoring(sc, o.snr, o.trials);
      RssScenario unit = sc;
      unit.fim_scale = FimScale::Unit;
      for (const MonitoringPoint& p : points) {
        t.add_row({label, p.snr_db, p.shadow_std, p.subset.to_string(),
                   fim(unit, p.subset).condition(), p.mse, p.std_error, p.mse_db, p.mse_db_se,
                   p.boundary_hits, p.trials, "ok"});
      }
    } catch (const DegenerateGeometryError& e) {
      for (double snr : o.snr) {
        t.add_row({label, snr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                   nullptr, o.trials, std::string("degenerate: ") + e.what()});
      }
    }
  }
  const std::string format = resolve_format(g, "csv");
  CommandOutput out;
  out.body = render(t, format);
  out.default_name = "monitoring_n" + std::to_string(o.n) + "." + format;
  out.config = {{"n", o.n},
                {"snr", join_numbers(o.snr)},
                {"trials", o.trials},
                {"amplitude", format_number(o.amplitude)},
                {"path-loss", format_number(o.path_loss)},
                {"radius", format_number(o.radius)},
                {"fim-scale", o.fim_scale},
                {"locator-grid", o.locator_grid}};
  out.metadata = {{"rng_algorithm", kRngAlgorithm},
                  {"snr_convention", kSnrConvention},
                  {"worst_subset_rule", "sensor triple with the largest FIM condition number"},
                  {"locator", "grid over disc of radius 2*radius about the source, then compass "
                              "search from the 4 best grid-local minima"}};
  return out;
}

// ---------------------------------------------------------------------------

fs::path resolve_output(const GlobalOptions& g, const CommandOutput& produced) {
  if (!g.output.empty()) return g.output;
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    return fs::path(dir) / produced.default_name;
  }
  return {};
}

void emit(const std::string& command, const GlobalOptions& g, const CommandOutput& produced,
          std::ostream& out, std::ostream& err) {
  const fs::path path = resolve_output(g, produced);
  if (path.empty()) {
    out << produced.body;
    return;
  }
  json config = produced.config;
  config["seed"] = g.seed;
  config["format"] = g.format.empty() ? json(nullptr) : json(g.format);
  json manifest = {{"command", command},
                   {"config", config},
                   {"seed", g.seed},
                   {"tool_version", kToolVersion},
                   {"timestamp", utc_timestamp()},
                   {"output", path.string()}};
  for (const auto& [key, value] : produced.metadata.items()) manifest[key] = value;

  write_atomically(path, produced.body);
  fs::path manifest_path = path;
  manifest_path += ".manifest.json";
  write_atomically(manifest_path, manifest.dump(2) + "\n");
  err << "wrote " << path.string() << " (manifest " << manifest_path.string() << ")\n";
}

std::vector<std::string> args_from_manifest(const json& manifest, const std::string& output) {
  if (!manifest.contains("command") || !manifest.contains("config")) {
    throw ParseError("manifest lacks command or config", 0);
  }
  std::vector<std::string> args{manifest.at("command").get<std::string>()};
  for (const auto& [key, value] : manifest.at("config").items()) {
    if (value.is_null()) continue;
    args.push_back("--" + key);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  args.push_back("--output");
  args.push_back(output);
  return args;
}

int run_replay(const std::string& manifest_path, const std::string& output_override,
               std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open manifest " + manifest_path, 0);
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0);
  }
  const std::string output =
      output_override.empty() ? manifest.value("output", std::string()) : output_override;
  if (output.empty()) throw UsageError("replay needs --output or a manifest with an output path");
  return run(args_from_manifest(manifest, output), out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax condition-number sensor designs: construction, verification and "
               "simulation"};
  app.name("mincond");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--output", g.output,
                 std::string("Output file (default: stdout, or $") + kOutputDirEnv + ")");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  DesignOptions design_o;
  auto* design = app.add_subcommand("design", "Write the angle table of a design");
  design->add_option("--n", design_o.n, "Number of columns")->required();
  design->add_option("--scheme", design_o.scheme, "Design scheme")->capture_default_str();

  EvaluateOptions eval_o;
  auto* evaluate = app.add_subcommand("evaluate", "Worst-case 3-column selection of a design");
  evaluate->add_option("--angles", eval_o.angles_file, "CSV file with an angle_rad column");
  evaluate->add_option("--n", eval_o.n, "Number of columns (with --scheme)");
  evaluate->add_option("--scheme", eval_o.scheme, "Design scheme")->capture_default_str();
  evaluate->add_option("--k", eval_o.k, "Columns per selection")->capture_default_str();

  VerifyOptions verify_o;
  auto* verify = app.add_subcommand("verify", "Compare designs, baselines and grid search");
  verify->add_option("--n-min", verify_o.n_min)->capture_default_str();
  verify->add_option("--n-max", verify_o.n_max)->capture_default_str();
  verify->add_option("--grid", verify_o.grid, "Grid points per angle")->capture_default_str();
  verify->add_option("--grid-max-n", verify_o.grid_max_n, "Largest n given a grid search")
      ->capture_default_str();
  verify->add_option("--refine-iterations", verify_o.refine_iterations)->capture_default_str();

  EstimationOptions est_o;
  auto* est = app.add_subcommand("simulate-estimation", "Worst-case least-squares MSE vs n");
  est->add_option("--n-min", est_o.n_min)->capture_default_str();
  est->add_option("--n-max", est_o.n_max)->capture_default_str();
  est->add_option("--trials", est_o.trials)->capture_default_str();
  est->add_option("--noise-std", est_o.noise_std)->capture_default_str();
  est->add_option("--signal", est_o.signal, "Signal x as two comma-separated values")
      ->delimiter(',')
      ->expected(2);

  MonitoringOptions mon_o;
  auto* mon = app.add_subcommand("simulate-monitoring", "RSS source monitoring MSE vs SNR");
  mon->add_option("--n", mon_o.n)->capture_default_str();
  mon->add_option("--snr", mon_o.snr, "SNR grid in dB, comma separated")->delimiter(',');
  mon->add_option("--trials", mon_o.trials)->capture_default_str();
  mon->add_option("--amplitude", mon_o.amplitude)->capture_default_str();
  mon->add_option("--path-loss", mon_o.path_loss)->capture_default_str();
  mon->add_option("--radius", mon_o.radius)->capture_default_str();
  mon->add_option("--fim-scale", mon_o.fim_scale)
      ->check(CLI::IsMember({"natural", "base10"}))
      ->capture_default_str();
  mon->add_option("--locator-grid", mon_o.locator_grid)->capture_default_str();

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("manifest", manifest_path, "Manifest JSON written next to an output")
      ->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (replay->parsed()) return run_replay(manifest_path, g.output, out, err);

    CommandOutput produced;
    std::string command;
    if (design->parsed()) {
      command = "design";
      produced = cmd_design(design_o, g);
    } else if (evaluate->parsed()) {
      command = "evaluate";
      produced = cmd_evaluate(eval_o, g);
    } else if (verify->parsed()) {
      command = "verify";
      produced = cmd_verify(verify_o, g);
    } else if (est->parsed()) {
      command = "simulate-estimation";
      produced = cmd_simulate_estimation(est_o, g);
    } else {
      command = "simulate-monitoring";
      produced = cmd_simulate_monitoring(mon_o, g);
    }
    emit(command, g, produced, out, err);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error";
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace mincond::cli
