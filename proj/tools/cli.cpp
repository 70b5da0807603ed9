#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cojump/config.hpp"
#include "cojump/csv_io.hpp"
#include "cojump/experiments.hpp"
#include "cojump/ingest.hpp"
#include "cojump/manifest.hpp"
#include "cojump/simulate.hpp"

namespace cojump::cli {
namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag, bad flag value)\n"
    "  3  configuration error (unreadable file, unknown key, invalid model)\n"
    "  4  input data error (unreadable or malformed CSV, empty tick overlap)\n"
    "  5  invariant or domain violation during a run\n"
    "  6  --strict and at least one acceptance check failed\n"
    "Errors print one line to stderr: error code=<N> kind=<kind> message=\"...\"\n"
    "Prices are ingested as log-prices unless --raw is given.";

// Flags that edit the effective configuration.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<double> beta;
  std::optional<double> coeff;
  std::optional<double> gamma;
  std::optional<double> alpha1;
  std::optional<double> alpha2;

  void attach(CLI::App& app) {
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--n", n, "number of grid steps (experiments: single-rung ladder)");
    app.add_option("--beta", beta, "threshold exponent beta in r_h = c h^beta");
    app.add_option("--coeff", coeff, "threshold coefficient c in r_h = c h^beta");
    app.add_option("--gamma", gamma, "Levy copula mixing weight");
    app.add_option("--alpha1", alpha1, "activity index of the component-1 small jumps");
    app.add_option("--alpha2", alpha2, "activity index of the component-2 small jumps");
  }

  void apply(RunConfig& c, bool ladder) const {
    try {
      if (seed) c.simulation.seed = *seed;
      if (n) {
        c.simulation.steps = *n;
        if (ladder) c.n_ladder = {*n};
      }
      if (beta || coeff) {
        c.threshold = ThresholdRule(coeff.value_or(c.threshold.coeff()),
                                    beta.value_or(c.threshold.beta()));
      }
      if (gamma) c.model.copula = CopulaSpec(*gamma);
      const std::array<std::optional<double>, 2> alphas = {alpha1, alpha2};
      for (int q = 0; q < 2; ++q) {
        if (!alphas[q]) continue;
        auto& ia = c.model.ia_jumps[q];
        if (!ia) throw ConfigError(fmt::format("--alpha{} given but [ia{}] is absent", q + 1, q + 1));
        ia = InfiniteActivityJumpSpec(ia->scale(), *alphas[q], ia->negative());
      }
      c.model.validate();
      c.simulation.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

std::string command_line(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? " " : "") + args[i];
  return out;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return s;
}

void finish(const RunConfig& config, const std::string& command,
            std::vector<std::string> outputs, std::ostream& out) {
  RunManifest m;
  m.config_hash = hash_hex(config_hash(config));
  m.seed = config.simulation.seed;
  m.tool_version = std::string(tool_version());
  m.timestamp = utc_timestamp();
  m.command = command;
  m.outputs = std::move(outputs);
  const auto path = write_manifest(m);
  for (const auto& o : m.outputs) out << "wrote " << o << "\n";
  out << "wrote " << path.string() << "\n";
}

std::string with_suffix(const std::string& base, const std::string& suffix) {
  return base + suffix;
}

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Threshold estimation of diffusion covariation and co-jumps"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  const std::string command = command_line(args);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate one path pair to CSV");
  std::string sim_config;
  std::string sim_output = "paths.csv";
  std::uint64_t sim_path_index = 0;
  bool sim_truth = false;
  Overrides sim_over;
  sim->add_option("--config", sim_config, "model config (INI)")->required();
  sim->add_option("--output", sim_output, "paths CSV to write")->capture_default_str();
  sim->add_option("--path-index", sim_path_index, "replication index within the seed");
  sim->add_flag("--truth", sim_truth, "add ground-truth columns d1,d2,j1a,j1b,j2a,j2b");
  sim_over.attach(*sim);

  // estimate
  auto* est = app.add_subcommand("estimate", "threshold estimators on a paths or increments CSV");
  std::string est_input;
  std::string est_config;
  std::string est_output = "report.csv";
  std::string est_format = "csv";
  std::optional<double> est_threshold;
  std::optional<double> est_threshold1;
  std::optional<double> est_threshold2;
  std::optional<double> est_truth;
  std::optional<int> est_r;
  std::optional<int> est_l;
  Overrides est_over;
  est->add_option("--input", est_input, "paths CSV or increments CSV")->required();
  est->add_option("--config", est_config, "config supplying [threshold]");
  est->add_option("--output", est_output, "report file")->capture_default_str();
  est->add_option("--format", est_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  est->add_option("--threshold", est_threshold, "absolute r_h, overrides c and beta");
  est->add_option("--threshold1", est_threshold1, "per-component level for component 1");
  est->add_option("--threshold2", est_threshold2, "per-component level for component 2");
  est->add_option("--truth", est_truth, "true integrated covariation for NB(h)");
  est->add_option("--r", est_r, "power of dx1 for an extra v_{r,l}");
  est->add_option("--l", est_l, "power of dx2 for an extra v_{r,l}");
  est_over.attach(*est);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiment from a plan config");
  std::string exp_plan;
  std::string exp_output = "experiment";
  std::optional<std::size_t> exp_reps;
  bool exp_deterministic = true;
  bool exp_strict = false;
  Overrides exp_over;
  exp->add_option("--plan,--config", exp_plan, "experiment plan (INI)")->required();
  exp->add_option("--output", exp_output, "output prefix")->capture_default_str();
  exp->add_option("--replications", exp_reps, "replications per rung");
  auto* det_flag = exp->add_flag("--deterministic,!--parallel", exp_deterministic,
                "run replications serially (the default unless the plan sets parallel); "
                "--parallel uses worker threads with identical results");
  exp->add_flag("--strict", exp_strict, "exit 6 when a non-exploratory check fails");
  exp_over.attach(*exp);

  // ingest
  auto* ing = app.add_subcommand("ingest", "align two tick series onto an equally spaced grid");
  std::string ing_a;
  std::string ing_b;
  std::size_t ing_n = 0;
  bool ing_raw = false;
  double ing_unit = 1.0;
  std::string ing_output = "increments.csv";
  ing->add_option("--a", ing_a, "ticks CSV (time,price) of component 1")->required();
  ing->add_option("--b", ing_b, "ticks CSV (time,price) of component 2")->required();
  ing->add_option("--n", ing_n, "grid steps over the overlap")->required();
  ing->add_flag("--raw", ing_raw, "use price levels instead of log-prices");
  ing->add_option("--time-unit", ing_unit, "factor converting timestamp units to h units");
  ing->add_option("--output", ing_output, "increments CSV to write")->capture_default_str();

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << fmt::format("error code={} kind=usage message=\"{}\"\n", int{kUsage}, one_line(e.what()));
    return kUsage;
  }

  auto fail = [&](ExitCode code, const char* kind, const std::string& message) {
    err << fmt::format("error code={} kind={} message=\"{}\"\n", int{code}, kind, one_line(message));
    return code;
  };

  try {
    if (sim->parsed()) {
      RunConfig config = load_config(sim_config);
      sim_over.apply(config, false);
      SimConfig sc = config.simulation;
      sc.path_index = sim_path_index;
      const PathPair path = assemble_paths(config.model, sc);
      PathTable table = PathTable::from_path(path, sim_truth);
      table.meta["spec_hash"] = hash_hex(config_hash(config));
      write_file_atomic(sim_output, paths_to_csv(table));
      const std::string cfg = with_suffix(sim_output, ".config.ini");
      write_file_atomic(cfg, canonical_text(config));
      finish(config, command, {sim_output, cfg}, out);
      return kOk;
    }

    if (est->parsed()) {
      RunConfig config = config_or_default(est_config);
      est_over.apply(config, false);
      const std::string text = read_text_file(est_input);
      std::optional<IncrementPair> inc;
      std::optional<double> truth = est_truth;
      if (text.find("dx1,dx2") != std::string::npos && text.find("time,x1,x2") == std::string::npos) {
        inc = increments_from_csv(text);
      } else {
        const PathTable table = paths_from_csv(text);
        inc = table.increments();
        if (!truth) {
          if (const auto it = table.meta.find("integrated_cov"); it != table.meta.end()) {
            truth = parse_number(it->second);
          }
        }
      }
      TruncationLevels levels = TruncationLevels::from_rule(config.threshold, inc->step());
      if (est_threshold) levels = TruncationLevels::shared(*est_threshold);
      if (est_threshold1 || est_threshold2) {
        if (!est_threshold1 || !est_threshold2) {
          throw ConfigError("--threshold1 and --threshold2 must be given together");
        }
        levels = {*est_threshold1, *est_threshold2};
      }
      EstimatorReport report = estimate_all(*inc, levels, truth);
      if (est_r || est_l) {
        const int r = est_r.value_or(1);
        const int l = est_l.value_or(1);
        report.extra = ExtraMoment{r, l, threshold_stat(*inc, r, l, levels)};
      }
      write_file_atomic(est_output,
                        est_format == "json" ? report_to_json(report) : report_to_csv(report));
      finish(config, command, {est_output}, out);
      return kOk;
    }

    if (exp->parsed()) {
      RunConfig config = load_config(exp_plan);
      exp_over.apply(config, true);
      if (exp_reps) config.replications = *exp_reps;
      if (det_flag->count() > 0) config.parallel = !exp_deterministic;
      const ExperimentReport report = run_experiment(config.plan());
      const std::string rungs = exp_output + ".rungs.csv";
      const std::string fits = exp_output + ".fits.csv";
      const std::string summary = exp_output + ".summary.txt";
      const std::string cfg = exp_output + ".config.ini";
      write_file_atomic(rungs, rungs_to_csv(report));
      write_file_atomic(fits, fits_to_csv(report));
      const std::string text = experiment_summary(report);
      write_file_atomic(summary, text);
      write_file_atomic(cfg, canonical_text(config));
      out << text;
      finish(config, command, {rungs, fits, summary, cfg}, out);
      if (exp_strict && !report.all_passed()) {
        return fail(kStrictFailure, "strict", "at least one acceptance check failed");
      }
      return kOk;
    }

    if (ing->parsed()) {
      const TickSeries a = ticks_from_csv(read_text_file(ing_a));
      const TickSeries b = ticks_from_csv(read_text_file(ing_b));
      AlignOptions options;
      options.scale = ing_raw ? PriceScale::Raw : PriceScale::Log;
      options.time_unit = ing_unit;
      const IncrementPair inc = ingest_and_align(a, b, ing_n, options);
      write_file_atomic(ing_output, increments_to_csv(inc));
      RunConfig config;
      config.simulation.steps = ing_n;
      finish(config, command, {ing_output}, out);
      return kOk;
    }
  } catch (const ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const DataError& e) {
    return fail(kData, "data", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kData, "io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInvariant, "invariant", e.what());
  } catch (const std::domain_error& e) {
    return fail(kInvariant, "domain", e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, "internal", e.what());
  }
  return fail(kUsage, "usage", "no subcommand");
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cojump::cli
