#pragma once

#include "ghost/common.hpp"
#include "ghost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace ghost {

struct FuzzyConfig {
  double delta_r = 0.01;
};

struct SmoteConfig {
  int k_neighbors = 5;
  double interpolation_lambda = 0.5;
};

/// Ring multiplicities for one minority point given 1/n.
///
/// Entry i is floor((1/n) / 2^i) for every ring with (1/n)/2^i >= 1. Ring 0
/// contributes that many copies of the point itself; ring i >= 1 contributes
/// that many copies of each of x + i*dr and x - i*dr.
inline std::vector<std::size_t> fuzzy_ring_counts(double inverse_ratio) {
  std::vector<std::size_t> counts;
  double scaled = inverse_ratio;
  while (scaled >= 1.0) {
    counts.push_back(static_cast<std::size_t>(std::floor(scaled)));
    scaled /= 2.0;
  }
  return counts;
}

/// Rows appended per minority point.
inline std::size_t fuzzy_rows_per_point(double inverse_ratio) {
  const auto counts = fuzzy_ring_counts(inverse_ratio);
  std::size_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += (i == 0 ? 1 : 2) * counts[i];
  return total;
}

/// Fuzzy oversampling of the minority class.
///
/// The originals come first, followed by the synthetic rows for each minority
/// point in row order. The offset i*delta_r is added to every coordinate.
inline Dataset fuzzy_sample(const Dataset& d, const FuzzyConfig& cfg = {}) {
  if (!(cfg.delta_r > 0.0)) throw DataError("fuzzy sampling: delta_r must be positive");
  const std::size_t ones = d.count(1);
  const std::size_t zeros = d.rows() - ones;
  if (ones == 0 || zeros == 0) throw DataError("fuzzy sampling: dataset contains a single class");

  const int c0 = minority_class(d);
  const std::size_t nmin = c0 == 1 ? ones : zeros;
  // total/minority rather than 1/(minority/total): exact whenever the quotient is an integer
  const double inv = static_cast<double>(d.rows()) / static_cast<double>(nmin);
  const auto rings = fuzzy_ring_counts(inv);
  const std::size_t per_point = fuzzy_rows_per_point(inv);

  const Eigen::Index cols = static_cast<Eigen::Index>(d.cols());
  Matrix x(static_cast<Eigen::Index>(d.rows() + nmin * per_point), cols);
  x.topRows(static_cast<Eigen::Index>(d.rows())) = d.features();
  std::vector<int> y = d.labels();
  y.reserve(static_cast<std::size_t>(x.rows()));

  Eigen::Index out = static_cast<Eigen::Index>(d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r) {
    if (d.labels()[r] != c0) continue;
    const RowVector base = d.features().row(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < rings.size(); ++i) {
      if (i == 0) {
        for (std::size_t c = 0; c < rings[0]; ++c) x.row(out++) = base;
        continue;
      }
      const double offset = static_cast<double>(i) * cfg.delta_r;
      for (std::size_t c = 0; c < rings[i]; ++c) {
        x.row(out++) = base.array() + offset;
        x.row(out++) = base.array() - offset;
      }
    }
    y.insert(y.end(), per_point, c0);
  }
  return Dataset(std::move(x), std::move(y), d.feature_names());
}

namespace detail {

// Indices (into pts) of the k nearest rows to pts.row(self), excluding self.
// Ties on distance are broken by lower index.
inline std::vector<Eigen::Index> nearest_neighbors(const Matrix& pts, Eigen::Index self, int k) {
  std::vector<std::pair<double, Eigen::Index>> dist;
  dist.reserve(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index j = 0; j < pts.rows(); ++j) {
    if (j == self) continue;
    dist.emplace_back((pts.row(j) - pts.row(self)).squaredNorm(), j);
  }
  const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
  std::vector<Eigen::Index> out;
  out.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) out.push_back(dist[i].second);
  return out;
}

}  // namespace detail

/// SMOTE until both classes have equal counts.
///
/// Synthetic row j is built from minority point (j mod m) and one of its k
/// nearest minority neighbours picked uniformly at random:
/// x + lambda * (neighbour - x).
inline Dataset smote(const Dataset& d, const SmoteConfig& cfg, Seed seed) {
  if (cfg.k_neighbors < 1) throw DataError("smote: k_neighbors must be at least 1");
  if (!(cfg.interpolation_lambda > 0.0 && cfg.interpolation_lambda <= 1.0)) {
    throw DataError("smote: interpolation lambda must lie in (0, 1]");
  }
  const std::size_t ones = d.count(1);
  const std::size_t zeros = d.rows() - ones;
  if (ones == zeros) return d;

  const int c0 = ones < zeros ? 1 : 0;
  const std::size_t nmin = std::min(ones, zeros);
  const std::size_t deficit = std::max(ones, zeros) - nmin;
  if (nmin < 2) throw DataError("smote: the minority class needs at least two samples");
  const int k = std::min<int>(cfg.k_neighbors, static_cast<int>(nmin) - 1);

  std::vector<std::size_t> minority_rows;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (d.labels()[i] == c0) minority_rows.push_back(i);
  }
  const Matrix pts = d.subset(minority_rows).features();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<std::vector<Eigen::Index>> knn(nmin);

  Matrix x(static_cast<Eigen::Index>(d.rows() + deficit), static_cast<Eigen::Index>(d.cols()));
  x.topRows(static_cast<Eigen::Index>(d.rows())) = d.features();
  for (std::size_t j = 0; j < deficit; ++j) {
    const std::size_t base = j % nmin;
    if (knn[base].empty()) knn[base] = detail::nearest_neighbors(pts, static_cast<Eigen::Index>(base), k);
    const Eigen::Index nb = knn[base][static_cast<std::size_t>(pick(rng))];
    const auto xb = pts.row(static_cast<Eigen::Index>(base));
    x.row(static_cast<Eigen::Index>(d.rows() + j)) = xb + cfg.interpolation_lambda * (pts.row(nb) - xb);
  }
  std::vector<int> y = d.labels();
  y.insert(y.end(), deficit, c0);
  return Dataset(std::move(x), std::move(y), d.feature_names());
}

/// Training-set preprocessing: fuzzy sampling (twice when two_sample is set,
/// recomputing the imbalance after the first pass) followed by SMOTE.
inline Dataset preprocess_ghost(const Dataset& train, bool two_sample, const FuzzyConfig& fuzzy,
                                const SmoteConfig& sm, Seed seed) {
  Dataset out = fuzzy_sample(train, fuzzy);
  if (two_sample) out = fuzzy_sample(out, fuzzy);
  return smote(out, sm, seed);
}

}  // namespace ghost
