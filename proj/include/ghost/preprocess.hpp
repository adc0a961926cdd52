#pragma once

#include "ghost/common.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ghost {

enum class Preprocessor { none, minmax, standardize, robust, maxabs };

inline const char* to_string(Preprocessor p) {
  switch (p) {
    case Preprocessor::none: return "none";
    case Preprocessor::minmax: return "min-max";
    case Preprocessor::standardize: return "standardize";
    case Preprocessor::robust: return "robust-quantile";
    case Preprocessor::maxabs: return "max-abs";
  }
  return "?";
}

inline Preprocessor preprocessor_from_string(const std::string& s) {
  for (auto p : {Preprocessor::none, Preprocessor::minmax, Preprocessor::standardize, Preprocessor::robust,
                 Preprocessor::maxabs}) {
    if (s == to_string(p)) return p;
  }
  throw DataError("unknown preprocessor \"" + s + "\"");
}

/// Per-column affine transform (x - shift) / scale, fitted on training rows.
struct FeatureTransform {
  RowVector shift;
  RowVector scale;

  Matrix apply(const Matrix& x) const {
    if (x.cols() != shift.size()) throw DataError("preprocessor: feature count mismatch");
    return ((x.rowwise() - shift).array().rowwise() / scale.array()).matrix();
  }
};

namespace detail {

// Linear-interpolated quantile of a sorted column.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

/// Fits the chosen scaler. A zero scale (constant column) is replaced by 1.
inline FeatureTransform fit_preprocessor(Preprocessor p, const Matrix& x) {
  if (x.rows() == 0) throw DataError("preprocessor: no rows to fit");
  FeatureTransform t{RowVector::Zero(x.cols()), RowVector::Ones(x.cols())};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    double shift = 0.0;
    double scale = 1.0;
    switch (p) {
      case Preprocessor::none: break;
      case Preprocessor::minmax:
        shift = col.minCoeff();
        scale = col.maxCoeff() - shift;
        break;
      case Preprocessor::standardize: {
        shift = col.mean();
        scale = std::sqrt((col.array() - shift).square().mean());
        break;
      }
      case Preprocessor::robust: {
        std::vector<double> v(col.begin(), col.end());
        std::sort(v.begin(), v.end());
        shift = detail::quantile_sorted(v, 0.5);
        scale = detail::quantile_sorted(v, 0.75) - detail::quantile_sorted(v, 0.25);
        break;
      }
      case Preprocessor::maxabs: scale = col.cwiseAbs().maxCoeff(); break;
    }
    t.shift(j) = shift;
    t.scale(j) = scale > 0.0 ? scale : 1.0;
  }
  return t;
}

}  // namespace ghost
