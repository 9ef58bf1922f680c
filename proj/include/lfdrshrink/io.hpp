#pragma once

// Delimiter-separated input of paired-difference matrices, the analyze
// pipeline over such a matrix, and the tabular / plot-data writers.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lfdrshrink/error.hpp"
#include "lfdrshrink/pipeline.hpp"
#include "lfdrshrink/simulation.hpp"

namespace lfdrshrink {

struct InputMatrix {
  std::vector<std::string> feature_ids;
  std::vector<std::vector<double>> rows;

  std::size_t m() const noexcept { return rows.size(); }
  std::size_t n() const noexcept { return rows.empty() ? 0 : rows.front().size(); }
};

struct ReadOptions {
  char delimiter = '\t';
  // (treatment column, control column); when non-empty each row becomes the
  // per-pair differences treatment - control.
  std::vector<std::pair<std::string, std::string>> paired_columns;
};

/// ',' for .csv files, tab otherwise.
inline char delimiter_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? ',' : '\t';
}

/// Formats with 12 significant digits.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("non-numeric cell '" + std::string(cell) + "'", line, column);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite cell", line, column);
  return value;
}

}  // namespace detail

/// Reads a header row, then one row per feature: first column is the feature
/// id, remaining columns are replicate differences (or, in paired mode, the
/// named treatment/control columns).
inline InputMatrix read_matrix(std::istream& in, const ReadOptions& opts = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    for (auto cell : detail::split(line, opts.delimiter)) header.emplace_back(detail::trim(cell));
    break;
  }
  if (header.empty()) throw ParseError("missing header row", line_no == 0 ? 1 : line_no);
  const std::size_t header_line = line_no;
  const std::size_t width = header.size();

  std::vector<std::pair<std::size_t, std::size_t>> pair_index;
  for (const auto& [treat, ctrl] : opts.paired_columns) {
    auto find = [&](const std::string& name) {
      const auto it = std::find(header.begin() + 1, header.end(), name);
      if (it == header.end()) throw ParseError("unknown column '" + name + "'", header_line);
      return static_cast<std::size_t>(it - header.begin());
    };
    pair_index.emplace_back(find(treat), find(ctrl));
  }
  const std::size_t n = pair_index.empty() ? width - 1 : pair_index.size();
  if (n < 2) {
    throw ParseError("at least two replicate columns are required, got " + std::to_string(n),
                     header_line);
  }

  InputMatrix out;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, opts.delimiter);
    if (cells.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    std::string id(detail::trim(cells[0]));
    if (id.empty()) throw ParseError("empty feature id", line_no, 1);
    if (!seen.insert(id).second) throw ParseError("duplicate feature id '" + id + "'", line_no, 1);

    std::vector<double> row;
    row.reserve(n);
    if (pair_index.empty()) {
      for (std::size_t c = 1; c < width; ++c) row.push_back(detail::parse_cell(cells[c], line_no, c + 1));
    } else {
      for (const auto& [t, c] : pair_index) {
        row.push_back(detail::parse_cell(cells[t], line_no, t + 1) -
                      detail::parse_cell(cells[c], line_no, c + 1));
      }
    }
    out.feature_ids.push_back(std::move(id));
    out.rows.push_back(std::move(row));
  }
  if (out.rows.empty()) throw ParseError("no data rows", line_no);
  return out;
}

inline InputMatrix read_matrix(const std::filesystem::path& path, ReadOptions opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_matrix(in, opts);
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  double theta0 = 0.0;
  double level = 0.95;
  LindseyOptions lindsey;
};

struct AnalysisRow {
  std::string feature_id;
  double mean = 0.0;
  double t = 0.0;
  double z = 0.0;
  double lfdr = 0.0;
  double median_conditional = 0.0;
  double median_marginal = 0.0;
  double ci_lo_conditional = 0.0;
  double ci_hi_conditional = 0.0;
  double ci_lo_marginal = 0.0;
  double ci_hi_marginal = 0.0;
  double conf_below = 0.0;
  double conf_at_null = 0.0;
  double conf_above = 0.0;
  std::size_t rank = 0;
  // Not part of the table: P^x(theta < theta0), used for the confidence-level plot.
  double conditional_conf_below = 0.0;
};

inline constexpr std::string_view kAnalysisColumns[] = {
    "feature_id",        "mean",           "t",
    "z",                 "lfdr",           "median_conditional",
    "median_marginal",   "ci_lo_conditional", "ci_hi_conditional",
    "ci_lo_marginal",    "ci_hi_marginal", "conf_below",
    "conf_at_null",      "conf_above",     "rank"};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;  // input order
  MixtureFit fit;
  std::size_t n = 0;
};

inline AnalysisResult analyze(const InputMatrix& matrix, const AnalyzeOptions& opts = {}) {
  std::vector<TSummary> summaries;
  summaries.reserve(matrix.m());
  for (std::size_t i = 0; i < matrix.m(); ++i) {
    summaries.push_back(summarize(PairedSample{matrix.feature_ids[i], matrix.rows[i]}));
  }
  PipelineOptions po;
  po.theta0 = opts.theta0;
  po.level = opts.level;
  po.lindsey = opts.lindsey;
  PipelineResult pr = run_pipeline(summaries, po);

  AnalysisResult out;
  out.fit = std::move(*pr.fit);
  out.n = matrix.n();
  out.rows.reserve(matrix.m());
  std::vector<double> medians;
  std::vector<double> lfdrs;
  for (std::size_t i = 0; i < matrix.m(); ++i) {
    const FeatureEstimate& fe = pr.features[i];
    AnalysisRow r;
    r.feature_id = matrix.feature_ids[i];
    r.mean = fe.summary.mean;
    r.t = fe.t_null;
    r.z = fe.z;
    r.lfdr = fe.lfdr;
    r.median_conditional = fe.median_conditional;
    r.median_marginal = fe.median_marginal;
    r.ci_lo_conditional = fe.conditional_ci.lower;
    r.ci_hi_conditional = fe.conditional_ci.upper;
    r.ci_lo_marginal = fe.marginal_ci.lower;
    r.ci_hi_marginal = fe.marginal_ci.upper;
    r.conf_below = fe.levels.below;
    r.conf_at_null = fe.levels.at_null;
    r.conf_above = fe.levels.above;
    r.conditional_conf_below =
        conditional_cdf(ConditionalPosterior::from_summary(fe.summary), opts.theta0);
    medians.push_back(r.median_marginal);
    lfdrs.push_back(r.lfdr);
    out.rows.push_back(std::move(r));
  }
  const auto ranks = rank_by_shrunken_estimate(medians, lfdrs, opts.theta0);
  for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].rank = ranks[i];
  return out;
}

// ---------------------------------------------------------------------------
// writers

inline std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void check_stream(const std::ostream& out, const std::string& what) {
  if (!out) throw IoError("write failed: " + what);
}

/// One row per feature, columns in kAnalysisColumns order.
inline void emit_report(std::span<const AnalysisRow> rows, std::ostream& out, char delim = '\t') {
  for (std::size_t c = 0; c < std::size(kAnalysisColumns); ++c) {
    if (c > 0) out << delim;
    out << kAnalysisColumns[c];
  }
  out << '\n';
  for (const AnalysisRow& r : rows) {
    out << r.feature_id;
    for (double v : {r.mean, r.t, r.z, r.lfdr, r.median_conditional, r.median_marginal,
                     r.ci_lo_conditional, r.ci_hi_conditional, r.ci_lo_marginal, r.ci_hi_marginal,
                     r.conf_below, r.conf_at_null, r.conf_above}) {
      out << delim << format_number(v);
    }
    out << delim << r.rank << '\n';
  }
  check_stream(out, "analysis report");
}

inline void emit_report(std::span<const AnalysisRow> rows, const std::filesystem::path& path,
                        char delim = '\t') {
  auto out = open_for_writing(path);
  emit_report(rows, out, delim);
}

inline void emit_fit_diagnostics(const AnalysisResult& res, std::ostream& out) {
  const MixtureFit& fit = res.fit;
  out << "key\tvalue\n";
  out << "m\t" << res.rows.size() << '\n';
  out << "n\t" << res.n << '\n';
  out << "pi0_hat\t" << format_number(fit.pi0_hat) << '\n';
  out << "bins\t" << fit.bin_counts.size() << '\n';
  out << "degree\t" << (fit.basis_coefficients.size() - 1) << '\n';
  out << "z_lo\t" << format_number(fit.z_lo) << '\n';
  out << "z_hi\t" << format_number(fit.z_hi) << '\n';
  out << "irls_iterations\t" << fit.iterations << '\n';
  out << "deviance\t" << format_number(fit.deviance) << '\n';
  check_stream(out, "fit diagnostics");
}

struct Histogram {
  std::vector<double> edges;
  std::vector<std::vector<std::size_t>> counts;  // one count vector per series
};

/// Equal-width bins spanning all series; the last bin is closed on the right.
inline Histogram make_histogram(std::span<const std::span<const double>> series, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto s : series) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  } else if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  const double width = (hi - lo) / static_cast<double>(bins);
  h.edges.resize(bins + 1);
  for (std::size_t j = 0; j <= bins; ++j) h.edges[j] = lo + width * static_cast<double>(j);
  h.edges.back() = hi;
  for (auto s : series) {
    std::vector<std::size_t> counts(bins, 0);
    for (double v : s) {
      const auto j = static_cast<std::size_t>((v - lo) / width);
      counts[std::min(j, bins - 1)] += 1;
    }
    h.counts.push_back(std::move(counts));
  }
  return h;
}

inline void write_histogram(const Histogram& h, std::span<const std::string_view> names, std::ostream& out) {
  out << "bin_lo\tbin_hi";
  for (auto name : names) out << '\t' << name;
  out << '\n';
  for (std::size_t j = 0; j + 1 < h.edges.size(); ++j) {
    out << format_number(h.edges[j]) << '\t' << format_number(h.edges[j + 1]);
    for (const auto& c : h.counts) out << '\t' << c[j];
    out << '\n';
  }
  check_stream(out, "histogram");
}

/// Plot-ready tables for an analysis: median vs lfdr, interval widths,
/// observed confidence levels, and the fitted z density.
inline void write_analysis_plot_data(const AnalysisResult& res, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  {
    auto out = open_for_writing(dir / "median_vs_lfdr.tsv");
    out << "feature_id\tlfdr\tmedian_conditional\tmedian_marginal\n";
    for (const auto& r : res.rows) {
      out << r.feature_id << '\t' << format_number(r.lfdr) << '\t'
          << format_number(r.median_conditional) << '\t' << format_number(r.median_marginal) << '\n';
    }
    check_stream(out, "median_vs_lfdr.tsv");
  }
  {
    auto out = open_for_writing(dir / "width_scatter.tsv");
    out << "feature_id\twidth_conditional\twidth_marginal\n";
    for (const auto& r : res.rows) {
      out << r.feature_id << '\t' << format_number(r.ci_hi_conditional - r.ci_lo_conditional) << '\t'
          << format_number(r.ci_hi_marginal - r.ci_lo_marginal) << '\n';
    }
    check_stream(out, "width_scatter.tsv");
  }
  {
    auto out = open_for_writing(dir / "confidence_levels.tsv");
    out << "feature_id\tconditional_below\tmarginal_below\tmarginal_above\n";
    for (const auto& r : res.rows) {
      out << r.feature_id << '\t' << format_number(r.conditional_conf_below) << '\t'
          << format_number(r.conf_below) << '\t' << format_number(r.conf_above) << '\n';
    }
    check_stream(out, "confidence_levels.tsv");
  }
  {
    auto out = open_for_writing(dir / "fit_density.tsv");
    out << "z\tcount\tfitted_density\tnull_density\n";
    const auto mids = res.fit.bin_midpoints();
    for (std::size_t j = 0; j < mids.size(); ++j) {
      out << format_number(mids[j]) << '\t' << res.fit.bin_counts[j] << '\t'
          << format_number(res.fit.density(mids[j])) << '\t'
          << format_number(res.fit.pi0_hat * normal_pdf(mids[j])) << '\n';
    }
    check_stream(out, "fit_density.tsv");
  }
}

// ---------------------------------------------------------------------------
// simulation output

inline void emit_coverage_report(const CoverageReport& rep, const SimConfig& cfg, std::ostream& out) {
  out << "key\tvalue\n";
  out << "m\t" << cfg.m << '\n';
  out << "n\t" << cfg.n << '\n';
  out << "pi0\t" << format_number(cfg.pi0) << '\n';
  out << "effect\t" << format_number(cfg.effect) << '\n';
  out << "sigma_null\t" << format_number(cfg.sigma_null) << '\n';
  out << "sigma_alt\t" << format_number(cfg.sigma_alt) << '\n';
  out << "experiments\t" << cfg.n_experiments << '\n';
  out << "seed\t" << cfg.seed << '\n';
  out << "level\t" << format_number(cfg.level) << '\n';
  out << "track\t" << to_string(cfg.track) << '\n';
  out << "lfdr_bins\t" << cfg.lindsey.bins << '\n';
  out << "lfdr_degree\t" << cfg.lindsey.degree << '\n';
  out << "n_tracked\t" << rep.n_tracked << '\n';
  out << "n_features_total\t" << rep.n_features_total << '\n';
  out << "marginal_coverage\t" << format_number(rep.marginal_coverage) << '\n';
  out << "conditional_coverage\t" << format_number(rep.conditional_coverage) << '\n';
  out << "mean_width_marginal\t" << format_number(rep.mean_width_marginal) << '\n';
  out << "mean_width_conditional\t" << format_number(rep.mean_width_conditional) << '\n';
  out << "mean_abs_error_marginal\t" << format_number(rep.mean_abs_error_marginal) << '\n';
  out << "mean_abs_error_conditional\t" << format_number(rep.mean_abs_error_conditional) << '\n';
  out << "mean_pi0_hat\t" << format_number(rep.mean_pi0_hat) << '\n';
  out << "nesting_violations\t" << rep.nesting_violations << '\n';
  check_stream(out, "coverage report");
}

inline void write_simulation_plot_data(const CoverageReport& rep, const std::filesystem::path& dir,
                                       std::size_t histogram_bins = 60) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  {
    auto out = open_for_writing(dir / "width_scatter.tsv");
    out << "width_conditional\twidth_marginal\n";
    for (std::size_t i = 0; i < rep.n_tracked; ++i) {
      out << format_number(rep.widths_conditional[i]) << '\t' << format_number(rep.widths_marginal[i])
          << '\n';
    }
    check_stream(out, "width_scatter.tsv");
  }
  {
    const std::span<const double> series[] = {rep.median_errors_marginal, rep.median_errors_conditional};
    const Histogram h = make_histogram(series, histogram_bins);
    constexpr std::string_view names[] = {"count_marginal", "count_conditional"};
    auto out = open_for_writing(dir / "median_error_histogram.tsv");
    write_histogram(h, names, out);
  }
}

}  // namespace lfdrshrink
