#pragma once

#include "ghost/common.hpp"
#include "ghost/dataset.hpp"
#include "ghost/evalstats.hpp"
#include "ghost/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ghost {

struct ExperimentConfig {
  std::vector<std::filesystem::path> data;
  double test_fraction = 0.30;
  int repeats = 20;
  Seed base_seed = 0;
  GhostConfig ghost;
  int jobs = 1;
  std::filesystem::path out_dir = "ghost-out";
};

/// One line of the results CSV.
struct RepeatRow {
  std::string dataset;
  int repeat = 0;
  Seed seed = 0;
  bool two_sample_used = false;
  RunRecord metrics;
};

inline constexpr const char* kResultsHeader = "dataset_name,repeat,seed,two_sample_used,precision,recall,f1,auc";

inline std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline void write_results_header(std::ostream& out) { out << kResultsHeader << '\n'; }

inline void write_result_row(const RepeatRow& r, std::ostream& out) {
  out << r.dataset << ',' << r.repeat << ',' << r.seed << ',' << (r.two_sample_used ? "true" : "false") << ','
      << format_percent(r.metrics.precision) << ',' << format_percent(r.metrics.recall) << ','
      << format_percent(r.metrics.f1) << ',' << format_percent(r.metrics.auc) << '\n';
}

inline std::vector<RepeatRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || std::string(detail::trim(line)) != kResultsHeader) {
    throw DataError(path.string() + ": schema mismatch, expected header \"" + kResultsHeader + "\"");
  }
  std::vector<RepeatRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto c = detail::split_commas(line);
    auto fail = [&](const std::string& why) {
      return DataError(path.string() + ": row " + std::to_string(lineno) + ": " + why);
    };
    if (c.size() != 8) throw fail("expected 8 columns");
    RepeatRow r;
    r.dataset = std::string(c[0]);
    double v = 0.0;
    if (!detail::parse_double(c[1], v)) throw fail("bad repeat");
    r.repeat = static_cast<int>(v);
    if (!detail::parse_double(c[2], v)) throw fail("bad seed");
    r.seed = static_cast<Seed>(v);
    if (c[3] != "true" && c[3] != "false") throw fail("two_sample_used must be true or false");
    r.two_sample_used = c[3] == "true";
    double* fields[] = {&r.metrics.precision, &r.metrics.recall, &r.metrics.f1, &r.metrics.auc};
    for (int k = 0; k < 4; ++k) {
      if (!detail::parse_double(c[4 + static_cast<std::size_t>(k)], *fields[k])) throw fail("non-numeric metric");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

/// All repeats of split + run_ghost for one dataset. Repeat i uses seed base_seed + i.
/// Results come back in repeat order regardless of `jobs`.
inline std::vector<RepeatRow> run_repeats(const Dataset& d, const std::string& name, const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) throw DataError("experiment: repeats must be at least 1");
  std::vector<std::optional<RepeatRow>> slots(static_cast<std::size_t>(cfg.repeats));
  std::vector<std::exception_ptr> errors(slots.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) {
      try {
        const Seed seed = cfg.base_seed + i;
        const SplitPair sp = split(d, cfg.test_fraction, seed);
        GhostConfig gc = cfg.ghost;
        gc.seed = seed;
        const GhostResult g = run_ghost(sp.train, sp.test, gc);
        slots[i] = RepeatRow{name, static_cast<int>(i), seed, g.two_sample_used, g.metrics};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(cfg.jobs, 1, cfg.repeats);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<RepeatRow> rows;
  for (auto& s : slots) rows.push_back(std::move(*s));
  return rows;
}

namespace detail {

inline double median_of(const std::vector<RepeatRow>& rows, double RunRecord::*field) {
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.metrics.*field);
  return median(std::move(v));
}

inline constexpr std::pair<const char*, double RunRecord::*> kMetrics[] = {
    {"Precision", &RunRecord::precision},
    {"Recall", &RunRecord::recall},
    {"F1", &RunRecord::f1},
    {"AUC", &RunRecord::auc},
};

}  // namespace detail

/// Median-per-dataset markdown table.
inline void write_median_report(const std::vector<std::pair<std::string, std::vector<RepeatRow>>>& per_dataset,
                                std::ostream& out) {
  out << "| Dataset | Precision | Recall | F1 | AUC | twoSample runs |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& [name, rows] : per_dataset) {
    out << "| " << name;
    for (const auto& [label, field] : detail::kMetrics) out << " | " << format_percent(detail::median_of(rows, field));
    const auto two = std::count_if(rows.begin(), rows.end(), [](const RepeatRow& r) { return r.two_sample_used; });
    out << " | " << two << "/" << rows.size() << " |\n";
  }
}

/// Ordered dataset -> rows grouping (order of first appearance).
inline std::vector<std::pair<std::string, std::vector<RepeatRow>>> group_by_dataset(const std::vector<RepeatRow>& rows) {
  std::vector<std::pair<std::string, std::vector<RepeatRow>>> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == r.dataset; });
    if (it == out.end()) {
      out.push_back({r.dataset, {}});
      it = out.end() - 1;
    }
    it->second.push_back(r);
  }
  return out;
}

struct Comparison {
  std::vector<std::string> datasets;
  // [dataset][metric]
  std::vector<std::array<Outcome, 4>> outcomes;
  std::array<WinTieLoss, 4> per_metric{};
  WinTieLoss total;
};

/// Scott-Knott comparison of ours against baseline, per dataset and metric.
/// Every dataset in `ours` must be present in `baseline`.
inline Comparison compare_results(const std::vector<RepeatRow>& ours, const std::vector<RepeatRow>& baseline,
                                  double effect_threshold = 0.147) {
  const auto a = group_by_dataset(ours);
  const auto b = group_by_dataset(baseline);
  Comparison c;
  std::array<std::vector<Group>, 4> ta;
  std::array<std::vector<Group>, 4> tb;
  for (const auto& [name, rows] : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const auto& p) { return p.first == name; });
    if (it == b.end()) throw DataError("baseline results have no rows for dataset \"" + name + "\"");
    c.datasets.push_back(name);
    for (std::size_t m = 0; m < 4; ++m) {
      const auto field = detail::kMetrics[m].second;
      Group ga{name, {}};
      Group gb{name, {}};
      for (const auto& r : rows) ga.values.push_back(r.metrics.*field);
      for (const auto& r : it->second) gb.values.push_back(r.metrics.*field);
      ta[m].push_back(std::move(ga));
      tb[m].push_back(std::move(gb));
    }
  }
  c.outcomes.resize(c.datasets.size());
  for (std::size_t m = 0; m < 4; ++m) {
    c.per_metric[m] = summarize_wtl(ta[m], tb[m], detail::kMetrics[m].first, effect_threshold);
    c.total.win += c.per_metric[m].win;
    c.total.tie += c.per_metric[m].tie;
    c.total.loss += c.per_metric[m].loss;
    for (std::size_t d = 0; d < c.datasets.size(); ++d) c.outcomes[d][m] = compare_runs(ta[m][d], tb[m][d], effect_threshold);
  }
  return c;
}

/// Medians for baseline and ours side by side, ours annotated with *win* or
/// *loss* where Scott-Knott separates them, followed by win/tie/loss counts.
inline void write_comparison_markdown(const Comparison& c, const std::vector<RepeatRow>& ours,
                                      const std::vector<RepeatRow>& baseline, std::ostream& out) {
  const auto a = group_by_dataset(ours);
  const auto b = group_by_dataset(baseline);
  out << "| Dataset | Precision (baseline) | Recall (baseline) | F1 (baseline) | AUC (baseline) "
         "| Precision (ours) | Recall (ours) | F1 (ours) | AUC (ours) |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t d = 0; d < c.datasets.size(); ++d) {
    const auto& name = c.datasets[d];
    const auto& ra = std::find_if(a.begin(), a.end(), [&](const auto& p) { return p.first == name; })->second;
    const auto& rb = std::find_if(b.begin(), b.end(), [&](const auto& p) { return p.first == name; })->second;
    out << "| " << name;
    for (const auto& [label, field] : detail::kMetrics) out << " | " << format_percent(detail::median_of(rb, field));
    for (std::size_t m = 0; m < 4; ++m) {
      out << " | " << format_percent(detail::median_of(ra, detail::kMetrics[m].second));
      if (c.outcomes[d][m] == Outcome::win) out << " *win*";
      if (c.outcomes[d][m] == Outcome::loss) out << " *loss*";
    }
    out << " |\n";
  }
  out << "\n## Summary\n\n| Metric | win | tie | loss |\n|---|---|---|---|\n";
  for (std::size_t m = 0; m < 4; ++m) {
    out << "| " << detail::kMetrics[m].first << " | " << c.per_metric[m].win << " | " << c.per_metric[m].tie << " | "
        << c.per_metric[m].loss << " |\n";
  }
  out << "| Total | " << c.total.win << " | " << c.total.tie << " | " << c.total.loss << " |\n";
}

}  // namespace ghost
