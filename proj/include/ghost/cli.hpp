#pragma once

// Subcommand bodies for the ghost command-line tool. Argument parsing lives
// in tools/; these functions take parsed options and return the exit code:
// 0 success, 1 heuristic-negative (check only), 2 usage or data error.

#include "ghost/dataset.hpp"
#include "ghost/experiment.hpp"
#include "ghost/heuristic.hpp"
#include "ghost/sampling.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>

namespace ghost::cli {

inline constexpr int kOk = 0;
inline constexpr int kHeuristicNegative = 1;
inline constexpr int kUsageError = 2;

inline int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.data.empty()) {
    err << "run: at least one --data file is required\n";
    return kUsageError;
  }
  if (cfg.repeats < 1) {
    err << "run: --repeats must be at least 1\n";
    return kUsageError;
  }
  try {
    cfg.ghost.validate();
  } catch (const DataError& e) {
    err << "run: " << e.what() << '\n';
    return kUsageError;
  }
  for (const auto& p : cfg.data) {
    std::ifstream probe(p);
    if (!probe) {
      err << "run: cannot read data file: " << p.string() << '\n';
      return kUsageError;
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    err << "run: cannot create output directory " << cfg.out_dir.string() << ": " << ec.message() << '\n';
    return kUsageError;
  }

  bool failed = false;
  std::vector<std::pair<std::string, std::vector<RepeatRow>>> results;
  for (const auto& p : cfg.data) {
    const std::string name = p.stem().string();
    try {
      const Dataset d = load_csv(p);
      results.emplace_back(name, run_repeats(d, name, cfg));
      out << name << ": " << cfg.repeats << " repeats done\n";
    } catch (const std::exception& e) {
      err << "run: dataset " << name << " failed: " << e.what() << '\n';
      failed = true;
    }
  }

  const auto csv_path = cfg.out_dir / "results.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  write_results_header(csv);
  for (const auto& [name, rows] : results) {
    for (const auto& r : rows) write_result_row(r, csv);
  }
  std::ofstream md(cfg.out_dir / "report.md", std::ios::binary);
  md << "# GHOST results\n\nMedians over " << cfg.repeats << " repeats (test fraction "
     << format_percent(100.0 * cfg.test_fraction) << "%).\n\n";
  write_median_report(results, md);
  out << "results: " << csv_path.string() << '\n';
  return failed ? kUsageError : kOk;
}

struct CheckOptions {
  std::filesystem::path data;
  std::optional<int> bottleneck;
  HeuristicConfig heuristic;
};

inline int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.bottleneck && *opt.bottleneck < 1) {
    err << "check: --bottleneck must be a positive integer\n";
    return kUsageError;
  }
  try {
    const Dataset d = load_csv(opt.data);
    HeuristicConfig hc = opt.heuristic;
    hc.bottleneck = opt.bottleneck.value_or(default_bottleneck(d.cols()));
    const HeuristicVerdict v = complexity_check(d, hc);

    out << "layers: " << v.spec.input_dim;
    for (int h : v.spec.hidden_sizes) out << '-' << h;
    out << '-' << v.spec.input_dim << '\n';
    for (std::size_t i = 0; i < v.attempt_losses.size(); ++i) {
      out << "attempt " << i + 1 << ": mse " << std::setprecision(6) << v.attempt_losses[i] << '\n';
    }
    out << "min loss: " << v.min_loss << " (threshold " << v.threshold << ")\n";
    out << (v.recommended ? "feedforward recommended" : "feedforward not recommended") << '\n';
    return v.recommended ? kOk : kHeuristicNegative;
  } catch (const std::exception& e) {
    err << "check: " << e.what() << '\n';
    return kUsageError;
  }
}

inline int cmd_stats(const std::filesystem::path& ours, const std::filesystem::path& baseline,
                     const std::optional<std::filesystem::path>& out_path, std::ostream& out, std::ostream& err) {
  try {
    const auto a = read_results_csv(ours);
    const auto b = read_results_csv(baseline);
    const Comparison c = compare_results(a, b);
    if (out_path) {
      std::ofstream f(*out_path, std::ios::binary);
      if (!f) throw DataError("cannot write " + out_path->string());
      write_comparison_markdown(c, a, b, f);
    } else {
      write_comparison_markdown(c, a, b, out);
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "stats: " << e.what() << '\n';
    return kUsageError;
  }
}

struct SampleOptions {
  std::filesystem::path data;
  std::filesystem::path out;
  bool two_sample = false;
  bool apply_smote = true;
  bool normalize = false;
  FuzzyConfig fuzzy;
  SmoteConfig smote;
  Seed seed = 0;
};

inline int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    Dataset d = load_csv(opt.data);
    if (opt.normalize) d = minmax_fit_transform(d).first;
    Dataset r = fuzzy_sample(d, opt.fuzzy);
    if (opt.two_sample) r = fuzzy_sample(r, opt.fuzzy);
    if (opt.apply_smote) r = smote(r, opt.smote, opt.seed);
    write_csv(r, opt.out);
    out << "wrote " << r.rows() << " rows (" << r.count(0) << " class 0, " << r.count(1) << " class 1) to "
        << opt.out.string() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "sample: " << e.what() << '\n';
    return kUsageError;
  }
}

/// Shortest round-trip decimal, always with a fractional part ("0.0", "25.0", "0.000332").
inline std::string format_fraction(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

inline int cmd_leakage(const std::filesystem::path& train, const std::filesystem::path& test, std::ostream& out,
                       std::ostream& err) {
  try {
    out << format_fraction(leakage_zero_fraction(load_csv(train), load_csv(test))) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "leakage: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace ghost::cli
