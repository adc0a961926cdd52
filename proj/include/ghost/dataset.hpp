#pragma once

#include "ghost/common.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ghost {

/// Numeric feature matrix with binary labels.
///
/// Rows are samples. The constructor enforces the shape and finiteness
/// invariants; a Dataset is never mutated after construction by any
/// library operation (they all return new values).
class Dataset {
 public:
  Dataset() = default;

  Dataset(Matrix features, std::vector<int> labels, std::vector<std::string> feature_names = {})
      : features_(std::move(features)), labels_(std::move(labels)), names_(std::move(feature_names)) {
    if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
      throw DataError("dataset: " + std::to_string(features_.rows()) + " feature rows but " +
                      std::to_string(labels_.size()) + " labels");
    }
    if (features_.cols() < 1) throw DataError("dataset: at least one feature column is required");
    if (!features_.allFinite()) throw DataError("dataset: non-finite feature value");
    for (int y : labels_) {
      if (y != 0 && y != 1) throw DataError("dataset: label " + std::to_string(y) + " is not in {0,1}");
    }
    if (names_.empty()) {
      names_.reserve(static_cast<std::size_t>(features_.cols()));
      for (Eigen::Index j = 0; j < features_.cols(); ++j) names_.push_back("f" + std::to_string(j + 1));
    } else if (names_.size() != static_cast<std::size_t>(features_.cols())) {
      throw DataError("dataset: feature name count does not match column count");
    }
  }

  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }

  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(features_.cols()); }

  std::size_t count(int label) const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
  }

  /// Rows at the given indices, in the order given.
  Dataset subset(const std::vector<std::size_t>& idx) const {
    Matrix x(static_cast<Eigen::Index>(idx.size()), features_.cols());
    std::vector<int> y;
    y.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(idx[i]));
      y.push_back(labels_[idx[i]]);
    }
    return Dataset(std::move(x), std::move(y), names_);
  }

  /// Same rows and labels with a replaced feature matrix (same shape).
  Dataset with_features(Matrix x) const { return Dataset(std::move(x), labels_, names_); }

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> names_;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
  Seed seed = 0;
  double test_fraction = 0.0;
};

struct ScalerParams {
  std::vector<double> min;
  std::vector<double> max;

  /// Applies the stored transform. Values outside the fitted range are not clipped.
  Dataset apply(const Dataset& d) const {
    if (d.cols() != min.size()) throw DataError("scaler: feature count mismatch");
    Matrix x = d.features();
    for (std::size_t j = 0; j < min.size(); ++j) {
      const double range = max[j] - min[j];
      auto col = x.col(static_cast<Eigen::Index>(j));
      if (range > 0.0) {
        col = (col.array() - min[j]) / range;
      } else {
        col.setZero();
      }
    }
    return d.with_features(std::move(x));
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Reads a comma-separated file whose last column is named "label".
inline Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file, header row expected");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM

  const auto header = detail::split_commas(line);
  if (header.size() < 2) throw DataError(path.string() + ": need at least one feature column and a label column");
  if (header.back() != "label") throw DataError(path.string() + ": last column must be named \"label\"");
  const std::size_t nfeat = header.size() - 1;

  std::vector<std::string> names;
  for (std::size_t j = 0; j < nfeat; ++j) names.emplace_back(header[j]);

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ": row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                      " columns, expected " + std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < nfeat; ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j], v) || !std::isfinite(v)) {
        throw DataError(path.string() + ": row " + std::to_string(lineno) + ", column \"" + names[j] +
                        "\": not a finite number: \"" + std::string(cells[j]) + "\"");
      }
      values.push_back(v);
    }
    double lab = 0.0;
    if (!detail::parse_double(cells.back(), lab) || (lab != 0.0 && lab != 1.0)) {
      throw DataError(path.string() + ": row " + std::to_string(lineno) + ": label \"" + std::string(cells.back()) +
                      "\" is not 0 or 1");
    }
    labels.push_back(static_cast<int>(lab));
  }
  if (labels.size() < 2) throw DataError(path.string() + ": at least two data rows are required");

  Matrix x = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(labels.size()),
                                static_cast<Eigen::Index>(nfeat));
  return Dataset(std::move(x), std::move(labels), std::move(names));
}

/// Writes in the same format load_csv reads. Values use round-trip precision.
inline void write_csv(const Dataset& d, std::ostream& out) {
  const auto& names = d.feature_names();
  for (const auto& n : names) out << n << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const double v = d.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << d.labels()[i] << '\n';
  }
}

inline void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(d, out);
}

/// Fraction of rows in the less frequent class, in (0, 0.5].
inline double imbalance_ratio(const Dataset& d) {
  const std::size_t ones = d.count(1);
  const std::size_t zeros = d.rows() - ones;
  if (ones == 0 || zeros == 0) throw DataError("imbalance ratio: dataset contains a single class");
  return static_cast<double>(std::min(ones, zeros)) / static_cast<double>(d.rows());
}

/// Less frequent label; class 0 on a tie.
inline int minority_class(const Dataset& d) {
  const std::size_t ones = d.count(1);
  return ones < d.rows() - ones ? 1 : 0;
}

/// Stratified shuffle split. Each class contributes round(test_fraction * count) rows to test.
inline SplitPair split(const Dataset& d, double test_fraction, Seed seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("split: test fraction must lie strictly between 0 and 1");
  }
  if (d.count(0) == 0 || d.count(1) == 0) throw DataError("split: both classes must be present");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      if (d.labels()[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto ntest = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(idx.size())));
    test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(ntest));
    train_idx.insert(train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(ntest), idx.end());
  }
  if (train_idx.empty() || test_idx.empty()) throw DataError("split: a partition would be empty");
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  SplitPair out{d.subset(train_idx), d.subset(test_idx), std::move(train_idx), std::move(test_idx), seed,
                test_fraction};
  return out;
}

inline ScalerParams minmax_fit(const Dataset& d) {
  ScalerParams p;
  const auto& x = d.features();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    p.min.push_back(x.col(j).minCoeff());
    p.max.push_back(x.col(j).maxCoeff());
  }
  return p;
}

/// Scales every column to [0,1]; constant columns become 0.
inline std::pair<Dataset, ScalerParams> minmax_fit_transform(const Dataset& d) {
  ScalerParams p = minmax_fit(d);
  Dataset scaled = p.apply(d);
  return {std::move(scaled), std::move(p)};
}

/// Percentage of train/test pairs at Euclidean distance exactly zero.
inline double leakage_zero_fraction(const Dataset& train, const Dataset& test) {
  if (train.cols() != test.cols()) {
    throw DataError("leakage: train has " + std::to_string(train.cols()) + " features, test has " +
                    std::to_string(test.cols()));
  }
  if (train.rows() == 0 || test.rows() == 0) return 0.0;
  const auto& a = train.features();
  const auto& b = test.features();
  std::size_t zeros = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < b.rows(); ++k) {
      if ((a.row(i) - b.row(k)).squaredNorm() == 0.0) ++zeros;
    }
  }
  return 100.0 * static_cast<double>(zeros) / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace ghost
