#pragma once

// Fixture generators and brute-force oracles shared by the unit and
// acceptance suites. Oracles deliberately avoid the library's code paths.

#include "ghost/dataset.hpp"
#include "ghost/evalstats.hpp"
#include "ghost/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace ghost::testing {

/// Two Gaussian blobs (unit spread) whose centres differ by `gap` in every
/// feature. Class 1 is the minority with round(minority_frac * rows) rows.
inline Dataset make_blobs(std::size_t rows, std::size_t features, double minority_frac, double gap, Seed seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto nmin = static_cast<std::size_t>(std::lround(minority_frac * static_cast<double>(rows)));
  std::vector<int> y(rows, 0);
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(nmin), 1);
  std::shuffle(y.begin(), y.end(), rng);
  Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(features));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < features; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = noise(rng) + (y[i] == 1 ? gap : 0.0);
    }
  }
  return Dataset(std::move(x), std::move(y));
}

/// rows x dims matrix of rank `rank` (Gaussian latent factors and loadings) plus noise.
inline Dataset make_low_rank(std::size_t rows, std::size_t dims, std::size_t rank, double noise_sigma, Seed seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix loadings(static_cast<Eigen::Index>(rank), static_cast<Eigen::Index>(dims));
  for (Eigen::Index i = 0; i < loadings.size(); ++i) loadings.data()[i] = n01(rng);
  Matrix latent(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rank));
  for (Eigen::Index i = 0; i < latent.size(); ++i) latent.data()[i] = n01(rng);
  Matrix x = latent * loadings;
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += noise_sigma * n01(rng);
  std::vector<int> y(rows);
  for (std::size_t i = 0; i < rows; ++i) y[i] = i % 2 == 0 ? 1 : 0;
  return Dataset(std::move(x), std::move(y));
}

/// Independent uniform noise in [-scale, scale].
inline Dataset make_noise(std::size_t rows, std::size_t dims, double scale, Seed seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  std::vector<int> y(rows);
  for (std::size_t i = 0; i < rows; ++i) y[i] = i % 2 == 0 ? 1 : 0;
  return Dataset(std::move(x), std::move(y));
}

/// Rows of a small hand-made dataset: 10 rows, 2 of class 1 (n = 0.2).
inline Dataset ten_row_fixture() {
  Matrix x(10, 2);
  x << 0.10, 0.20, 0.30, 0.10, 0.50, 0.90, 0.70, 0.40, 0.20, 0.80, 0.90, 0.60, 0.40, 0.30, 0.60, 0.50, 0.80, 0.70,
      0.05, 0.95;
  return Dataset(std::move(x), {0, 0, 1, 0, 0, 0, 1, 0, 0, 0}, {"f1", "f2"});
}

// ---------------------------------------------------------------------------
// Oracles

/// Rows appended per minority point by a literal trace of the ring loop, in
/// integer arithmetic: floor((1/n)/2^i) = floor(total / (minority * 2^i)).
inline std::uint64_t fuzzy_trace_rows(std::uint64_t total, std::uint64_t minority) {
  std::uint64_t rows = 0;
  for (std::uint64_t i = 0;; ++i) {
    const std::uint64_t denom = minority << i;
    if (total < denom) break;  // (1/n)/2^i < 1
    const std::uint64_t copies = total / denom;
    rows += i == 0 ? copies : 2 * copies;  // x once at the centre, x+i*dr and x-i*dr on each ring
  }
  return rows;
}

/// AUC in [0,1] by enumerating every positive/negative pair; ties score 0.5.
inline double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double good = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) good += 1.0;
      if (s[i] == s[j]) good += 0.5;
    }
  }
  return good / pairs;
}

inline double brute_cliffs(const std::vector<double>& a, const std::vector<double>& b) {
  long long gt = 0;
  long long lt = 0;
  for (double x : a) {
    for (double z : b) {
      if (x > z) ++gt;
      if (x < z) ++lt;
    }
  }
  return static_cast<double>(gt - lt) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

/// Exhaustive argmax of the split objective over contiguous cuts of an ordered group list.
inline std::size_t brute_best_cut(const std::vector<Group>& ordered) {
  auto mean_of = [](const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    return static_cast<double>(s / static_cast<long double>(v.size()));
  };
  std::vector<double> all;
  for (const auto& g : ordered) all.insert(all.end(), g.values.begin(), g.values.end());
  const double mu = mean_of(all);
  std::size_t best = 0;
  double best_val = -1.0;
  for (std::size_t cut = 1; cut < ordered.size(); ++cut) {
    std::vector<double> left;
    std::vector<double> right;
    for (std::size_t g = 0; g < ordered.size(); ++g) {
      auto& dst = g < cut ? left : right;
      dst.insert(dst.end(), ordered[g].values.begin(), ordered[g].values.end());
    }
    const double wl = static_cast<double>(left.size()) / static_cast<double>(all.size());
    const double wr = static_cast<double>(right.size()) / static_cast<double>(all.size());
    const double val = wl * std::pow(mean_of(left) - mu, 2) + wr * std::pow(mean_of(right) - mu, 2);
    if (val > best_val) {
      best_val = val;
      best = cut;
    }
  }
  return best;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Central finite differences of batch_loss against the analytic gradients.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline GradCheck finite_difference_check(const Network& net, const Matrix& x, const Matrix& target, Loss loss,
                                         double h = 1e-5, double floor = 1e-7) {
  const auto analytic = gradients(net, x, target, loss);
  GradCheck out;
  Network probe = net;
  auto numeric = [&](double& param) {
    const double keep = param;
    param = keep + h;
    const double up = batch_loss(probe, x, target, loss);
    param = keep - h;
    const double down = batch_loss(probe, x, target, loss);
    param = keep;
    return (up - down) / (2.0 * h);
  };
  auto record = [&](double a, double n) {
    const double rel = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.checked;
  };
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& w = probe.layers[l].weights;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) record(analytic[l].weights(r, c), numeric(w(r, c)));
    }
    auto& b = probe.layers[l].bias;
    for (Eigen::Index r = 0; r < b.size(); ++r) record(analytic[l].bias(r), numeric(b(r)));
  }
  return out;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("ghost-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace ghost::testing
