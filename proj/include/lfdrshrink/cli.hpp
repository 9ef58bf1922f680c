#pragma once

// Command-line front end: `analyze` and `simulate` subcommands.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric/fit error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lfdrshrink/io.hpp"
#include "lfdrshrink/simulation.hpp"

namespace lfdrshrink {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

namespace detail {

inline char parse_delimiter(const std::string& spec) {
  if (spec == "tab" || spec == "\\t") return '\t';
  if (spec == "comma") return ',';
  if (spec == "space") return ' ';
  if (spec.size() == 1) return spec[0];
  throw DomainError("unrecognized delimiter '" + spec + "'");
}

inline std::vector<std::pair<std::string, std::string>> parse_pairs(const std::vector<std::string>& cols) {
  if (cols.size() % 2 != 0) {
    throw DomainError("--paired takes treatment,control column pairs; got an odd count");
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < cols.size(); i += 2) out.emplace_back(cols[i], cols[i + 1]);
  return out;
}

// Writes to `path`, or to `fallback` when path is empty or "-".
template <typename Writer>
void write_output(const std::string& path, std::ostream& fallback, Writer&& writer) {
  if (path.empty() || path == "-") {
    writer(fallback);
    return;
  }
  auto out = open_for_writing(path);
  writer(out);
}

}  // namespace detail

struct AnalyzeArgs {
  std::string input;
  double theta0 = 0.0;
  double level = 0.95;
  int bins = LindseyOptions{}.bins;
  int degree = LindseyOptions{}.degree;
  std::string output = "-";
  std::string plots_dir;
  std::string delimiter;
  std::vector<std::string> paired;
};

struct SimulateArgs {
  SimConfig cfg;
  std::string track = "first_feature";
  std::string output = "-";
  std::string plots_dir;
};

inline int run_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  ReadOptions ro;
  ro.delimiter = args.delimiter.empty() ? delimiter_for_path(args.input)
                                        : detail::parse_delimiter(args.delimiter);
  ro.paired_columns = detail::parse_pairs(args.paired);
  validate_level(args.level);

  const InputMatrix matrix = read_matrix(std::filesystem::path(args.input), ro);
  AnalyzeOptions ao;
  ao.theta0 = args.theta0;
  ao.level = args.level;
  ao.lindsey.bins = args.bins;
  ao.lindsey.degree = args.degree;
  const AnalysisResult res = analyze(matrix, ao);

  const bool to_stdout = args.output.empty() || args.output == "-";
  detail::write_output(args.output, out, [&](std::ostream& os) { emit_report(res.rows, os, ro.delimiter); });
  emit_fit_diagnostics(res, to_stdout ? err : out);
  if (!args.plots_dir.empty()) write_analysis_plot_data(res, args.plots_dir);
  return kExitOk;
}

inline int run_simulate(SimulateArgs args, std::ostream& out) {
  if (args.track == "first_feature") {
    args.cfg.track = TrackMode::first_feature;
  } else if (args.track == "all_features") {
    args.cfg.track = TrackMode::all_features;
  } else {
    throw DomainError("--track must be first_feature or all_features");
  }
  args.cfg.validate();
  const CoverageReport rep = run_study(args.cfg);
  detail::write_output(args.output, out, [&](std::ostream& os) { emit_coverage_report(rep, args.cfg, os); });
  if (!args.plots_dir.empty()) write_simulation_plot_data(rep, args.plots_dir);
  return kExitOk;
}

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Empirical-Bayes shrunken point and interval estimates from local false discovery rates"};
  app.name("lfdrshrink");
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate lfdr-shrunken medians and intervals for a matrix of paired differences");
  analyze_cmd->add_option("--input", aa.input, "Delimiter-separated file: header row, feature id column, replicate differences")->required();
  analyze_cmd->add_option("--theta0", aa.theta0, "Null parameter value")->capture_default_str();
  analyze_cmd->add_option("--level", aa.level, "Confidence level of the intervals")->capture_default_str();
  analyze_cmd->add_option("--bins", aa.bins, "Histogram bins for the mixture density fit")->capture_default_str();
  analyze_cmd->add_option("--degree", aa.degree, "Log-density polynomial degree")->capture_default_str();
  analyze_cmd->add_option("--output", aa.output, "Output table path, '-' for stdout")->capture_default_str();
  analyze_cmd->add_option("--plots-dir", aa.plots_dir, "Directory for plot-data tables");
  analyze_cmd->add_option("--delimiter", aa.delimiter, "Field delimiter: tab, comma, space or one character (default: by extension)");
  analyze_cmd->add_option("--paired", aa.paired, "Treatment,control column name pairs; rows become treatment - control")->delimiter(',');

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the Monte-Carlo coverage study");
  simulate_cmd->add_option("--m", sa.cfg.m, "Features per experiment")->capture_default_str();
  simulate_cmd->add_option("--n", sa.cfg.n, "Observations per feature")->capture_default_str();
  simulate_cmd->add_option("--pi0", sa.cfg.pi0, "Probability a feature is null")->capture_default_str();
  simulate_cmd->add_option("--effect", sa.cfg.effect, "|theta| for non-null features")->capture_default_str();
  simulate_cmd->add_option("--sigma-null", sa.cfg.sigma_null, "Noise sd for null features")->capture_default_str();
  simulate_cmd->add_option("--sigma-alt", sa.cfg.sigma_alt, "Noise sd for non-null features")->capture_default_str();
  simulate_cmd->add_option("--experiments", sa.cfg.n_experiments, "Number of simulated experiments")->capture_default_str();
  simulate_cmd->add_option("--seed", sa.cfg.seed, "Random seed")->capture_default_str();
  simulate_cmd->add_option("--level", sa.cfg.level, "Confidence level of the intervals")->capture_default_str();
  simulate_cmd->add_option("--track", sa.track, "first_feature or all_features")->capture_default_str();
  simulate_cmd->add_option("--bins", sa.cfg.lindsey.bins, "Histogram bins for the mixture density fit")->capture_default_str();
  simulate_cmd->add_option("--degree", sa.cfg.lindsey.degree, "Log-density polynomial degree")->capture_default_str();
  simulate_cmd->add_option("--threads", sa.cfg.threads, std::string("Worker threads (0: $") + kThreadsEnvVar + " or hardware)")->capture_default_str();
  simulate_cmd->add_option("--output", sa.output, "Report path, '-' for stdout")->capture_default_str();
  simulate_cmd->add_option("--plots-dir", sa.plots_dir, "Directory for plot-data tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    CLI::App* sub = analyze_cmd->parsed() ? analyze_cmd : simulate_cmd->parsed() ? simulate_cmd : &app;
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (analyze_cmd->parsed()) return run_analyze(aa, out, err);
    return run_simulate(sa, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace lfdrshrink
