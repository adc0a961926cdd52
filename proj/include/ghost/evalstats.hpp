#pragma once

#include "ghost/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ghost {

/// Classification scores, all in percent.
struct RunRecord {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
};

/// One treatment's values for a single metric across repeats.
struct Group {
  std::string label;
  std::vector<double> values;
};

/// Rank per input group (0-based, contiguous), in input order.
struct RankTable {
  std::vector<int> ranks;
  std::vector<std::size_t> order;  // input indices sorted by median in the requested direction
};

enum class RankOrder {
  ascending,        // rank 0 holds the smallest medians
  higher_is_better  // rank 0 holds the largest medians
};

struct WinTieLoss {
  int win = 0;
  int tie = 0;
  int loss = 0;
};

/// AUC in [0,1] with ties credited 0.5. Uses midranks (Mann-Whitney U).
inline double auc_score(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos = 0.0;
  double rank_sum = 0.0;  // sum of (1-based) midranks of positives, half-integers, exact in double
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == 1) {
        rank_sum += midrank;
        pos += 1.0;
      }
    }
    i = j;
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw DataError("auc: undefined when labels contain a single class");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

/// Precision, recall, F1 and AUC in percent. A row is predicted positive when
/// its score exceeds the threshold; zero denominators yield 0.
inline RunRecord classification_metrics(std::span<const double> scores, std::span<const int> labels,
                                        double threshold = 0.5) {
  if (scores.size() != labels.size()) throw DataError("metrics: scores and labels differ in length");
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] > threshold;
    if (predicted && labels[i] == 1) tp += 1.0;
    if (predicted && labels[i] == 0) fp += 1.0;
    if (!predicted && labels[i] == 1) fn += 1.0;
  }
  RunRecord r;
  const double p = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  const double rc = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  r.precision = 100.0 * p;
  r.recall = 100.0 * rc;
  r.f1 = p + rc > 0.0 ? 100.0 * 2.0 * p * rc / (p + rc) : 0.0;
  r.auc = 100.0 * auc_score(scores, labels);
  return r;
}

/// Cliff's delta: (#{a > b} - #{a < b}) / (|a| |b|).
inline double cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("cliff's delta: empty input");
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  long long more = 0;
  long long less = 0;
  for (double x : a) {
    const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
    const auto hi = std::upper_bound(sb.begin(), sb.end(), x);
    more += lo - sb.begin();
    less += sb.end() - hi;
  }
  return static_cast<double>(more - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

namespace detail {

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline bool same_multiset(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace detail

/// Expected squared deviation of the part means from the whole:
/// |m|/|l| (E[m]-E[l])^2 + |n|/|l| (E[n]-E[l])^2.
inline double split_objective(const Group& l, const Group& m, const Group& n) {
  if (m.values.empty() || n.values.empty()) throw DataError("split objective: empty part");
  std::vector<double> joined = m.values;
  joined.insert(joined.end(), n.values.begin(), n.values.end());
  if (!detail::same_multiset(l.values, joined)) throw DataError("split objective: parts do not partition the whole");
  const double el = detail::mean(l.values);
  const double wm = static_cast<double>(m.values.size()) / static_cast<double>(l.values.size());
  const double wn = static_cast<double>(n.values.size()) / static_cast<double>(l.values.size());
  const double dm = detail::mean(m.values) - el;
  const double dn = detail::mean(n.values) - el;
  return wm * dm * dm + wn * dn * dn;
}

namespace detail {

inline Group pool(std::span<const Group> groups) {
  Group g;
  for (const auto& x : groups) g.values.insert(g.values.end(), x.values.begin(), x.values.end());
  return g;
}

}  // namespace detail

struct SplitChoice {
  std::size_t cut = 0;  // groups [0, cut) vs [cut, size)
  double objective = 0.0;
};

/// Cut position maximizing split_objective over an already ordered list of
/// at least two groups. The earliest cut wins ties.
inline SplitChoice best_split(std::span<const Group> ordered) {
  if (ordered.size() < 2) throw DataError("best split: need at least two groups");
  const Group whole = detail::pool(ordered);
  SplitChoice best{0, -1.0};
  for (std::size_t cut = 1; cut < ordered.size(); ++cut) {
    const double e = split_objective(whole, detail::pool(ordered.subspan(0, cut)), detail::pool(ordered.subspan(cut)));
    if (e > best.objective) best = {cut, e};
  }
  return best;
}

namespace detail {

inline void scott_knott_recurse(std::span<const Group> ordered, double threshold, std::vector<int>& ranks,
                                std::size_t offset, int& next_rank) {
  if (ordered.size() >= 2) {
    const auto choice = best_split(ordered);
    const Group left = pool(ordered.subspan(0, choice.cut));
    const Group right = pool(ordered.subspan(choice.cut));
    if (std::abs(cliffs_delta(left.values, right.values)) >= threshold) {
      scott_knott_recurse(ordered.subspan(0, choice.cut), threshold, ranks, offset, next_rank);
      scott_knott_recurse(ordered.subspan(choice.cut), threshold, ranks, offset + choice.cut, next_rank);
      return;
    }
  }
  for (std::size_t i = 0; i < ordered.size(); ++i) ranks[offset + i] = next_rank;
  ++next_rank;
}

}  // namespace detail

/// Scott-Knott ranking with a Cliff's delta gate applied at every level.
///
/// Groups are sorted by median, then recursively bi-split at the cut
/// maximizing split_objective; a split stands only if |delta| between the two
/// pooled halves reaches effect_threshold.
inline RankTable scott_knott(const std::vector<Group>& groups, double effect_threshold = 0.147,
                             RankOrder order = RankOrder::ascending) {
  if (groups.empty()) throw DataError("scott-knott: no groups");
  for (const auto& g : groups) {
    if (g.values.empty()) throw DataError("scott-knott: group \"" + g.label + "\" is empty");
  }
  std::vector<double> med;
  for (const auto& g : groups) med.push_back(detail::median(g.values));

  RankTable t;
  t.order.resize(groups.size());
  std::iota(t.order.begin(), t.order.end(), std::size_t{0});
  std::stable_sort(t.order.begin(), t.order.end(), [&](std::size_t a, std::size_t b) {
    return order == RankOrder::ascending ? med[a] < med[b] : med[a] > med[b];
  });

  std::vector<Group> ordered;
  for (auto i : t.order) ordered.push_back(groups[i]);
  std::vector<int> sorted_ranks(groups.size(), 0);
  int next = 0;
  detail::scott_knott_recurse(ordered, effect_threshold, sorted_ranks, 0, next);

  t.ranks.assign(groups.size(), 0);
  for (std::size_t k = 0; k < t.order.size(); ++k) t.ranks[t.order[k]] = sorted_ranks[k];
  return t;
}

/// Outcome of one treatment-vs-baseline comparison (higher is better).
enum class Outcome { win, tie, loss };

inline Outcome compare_runs(const Group& treatment, const Group& baseline, double effect_threshold = 0.147) {
  const auto t = scott_knott({treatment, baseline}, effect_threshold, RankOrder::higher_is_better);
  if (t.ranks[0] < t.ranks[1]) return Outcome::win;
  if (t.ranks[0] > t.ranks[1]) return Outcome::loss;
  return Outcome::tie;
}

/// Counts wins, ties and losses of treatment over baseline across datasets.
/// Groups are matched by position and must carry the same label.
inline WinTieLoss summarize_wtl(const std::vector<Group>& treatment_runs, const std::vector<Group>& baseline_runs,
                                const std::string& metric, double effect_threshold = 0.147) {
  if (treatment_runs.size() != baseline_runs.size()) {
    throw DataError("win/tie/loss (" + metric + "): dataset lists differ in length");
  }
  WinTieLoss w;
  for (std::size_t i = 0; i < treatment_runs.size(); ++i) {
    if (treatment_runs[i].label != baseline_runs[i].label) {
      throw DataError("win/tie/loss (" + metric + "): dataset \"" + treatment_runs[i].label + "\" is matched with \"" +
                      baseline_runs[i].label + "\"");
    }
    switch (compare_runs(treatment_runs[i], baseline_runs[i], effect_threshold)) {
      case Outcome::win: ++w.win; break;
      case Outcome::tie: ++w.tie; break;
      case Outcome::loss: ++w.loss; break;
    }
  }
  return w;
}

}  // namespace ghost
