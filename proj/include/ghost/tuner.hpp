#pragma once

#include "ghost/common.hpp"
#include "ghost/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <vector>

namespace ghost {

struct IntRange {
  int lo = 0;
  int hi = 0;
  bool contains(int v) const { return v >= lo && v <= hi; }
};

/// Log-uniform range.
struct LogRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

struct ConfigSpace {
  std::vector<Preprocessor> preprocessors{Preprocessor::none, Preprocessor::minmax, Preprocessor::standardize,
                                          Preprocessor::robust, Preprocessor::maxabs};
  IntRange n_layers{1, 5};
  IntRange units_per_layer{2, 64};
  IntRange epochs{10, 100};
  LogRange learning_rate{1e-4, 1e-1};

  void validate() const {
    if (preprocessors.empty()) throw DataError("config space: no preprocessors");
    for (const auto& r : {n_layers, units_per_layer, epochs}) {
      if (r.lo > r.hi || r.lo < 1) throw DataError("config space: empty or non-positive integer range");
    }
    if (!(learning_rate.lo > 0.0 && learning_rate.lo <= learning_rate.hi)) {
      throw DataError("config space: learning rate range must be positive and nonempty");
    }
  }
};

struct Config {
  Preprocessor preprocessor = Preprocessor::none;
  int n_layers = 1;
  int units_per_layer = 2;
  int epochs = 10;
  double learning_rate = 1e-3;
  int weight = 0;  // tabu credit

  bool inside(const ConfigSpace& s) const {
    return std::find(s.preprocessors.begin(), s.preprocessors.end(), preprocessor) != s.preprocessors.end() &&
           s.n_layers.contains(n_layers) && s.units_per_layer.contains(units_per_layer) && s.epochs.contains(epochs) &&
           s.learning_rate.contains(learning_rate);
  }
};

struct Trial {
  Config config;
  double score = 0.0;
};

struct TunerResult {
  Config best_config;
  double best_score = 0.0;
  std::vector<Trial> history;
};

using Objective = std::function<double(const Config&)>;

/// True iff some seen score lies strictly within epsilon of phi.
inline bool epsilon_dominated(double phi, std::span<const double> seen, double epsilon) {
  if (!(epsilon > 0.0)) throw DataError("epsilon must be positive");
  for (double s : seen) {
    if (std::abs(phi - s) < epsilon) return true;
  }
  return false;
}

namespace detail {

inline int random_int(const IntRange& r, std::mt19937_64& rng) { return std::uniform_int_distribution<int>(r.lo, r.hi)(rng); }

inline double random_log(const LogRange& r, std::mt19937_64& rng) {
  return std::exp(std::uniform_real_distribution<double>(std::log(r.lo), std::log(r.hi))(rng));
}

inline Config random_config(const ConfigSpace& s, std::mt19937_64& rng) {
  Config c;
  c.preprocessor = s.preprocessors[std::uniform_int_distribution<std::size_t>(0, s.preprocessors.size() - 1)(rng)];
  c.n_layers = random_int(s.n_layers, rng);
  c.units_per_layer = random_int(s.units_per_layer, rng);
  c.epochs = random_int(s.epochs, rng);
  c.learning_rate = random_log(s.learning_rate, rng);
  return c;
}

inline int halfway(int from, int to) { return static_cast<int>(std::lround((from + to) / 2.0)); }

// Moves one numeric dimension halfway towards a fresh random value.
// The learning rate moves halfway in log space.
inline Config mutate(Config c, const ConfigSpace& s, std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: c.n_layers = halfway(c.n_layers, random_int(s.n_layers, rng)); break;
    case 1: c.units_per_layer = halfway(c.units_per_layer, random_int(s.units_per_layer, rng)); break;
    case 2: c.epochs = halfway(c.epochs, random_int(s.epochs, rng)); break;
    default: {
      const double lr = std::sqrt(c.learning_rate * random_log(s.learning_rate, rng));
      c.learning_rate = std::clamp(lr, s.learning_rate.lo, s.learning_rate.hi);
      break;
    }
  }
  c.weight = 0;
  return c;
}

}  // namespace detail

/// DODGE-style tabu search with the epsilon-domination rule.
///
/// Each evaluated config gets +1 credit when its score is not within epsilon
/// of any earlier score; otherwise it and the first such earlier config both
/// lose one. The next candidate mutates the highest-credit config (earliest on
/// ties), or is drawn uniformly once no config has positive credit. An
/// objective that throws or returns a non-finite value scores 0.
inline TunerResult dodge(const ConfigSpace& space, const Objective& objective, int iterations = 30,
                         double epsilon = 0.2, Seed seed = 0) {
  space.validate();
  if (iterations < 1) throw DataError("dodge: iterations must be at least 1");
  if (!(epsilon > 0.0)) throw DataError("dodge: epsilon must be positive");

  std::mt19937_64 rng(seed);
  TunerResult res;
  res.history.reserve(static_cast<std::size_t>(iterations));
  std::vector<double> seen;

  for (int it = 0; it < iterations; ++it) {
    Config cand;
    if (res.history.empty()) {
      cand = detail::random_config(space, rng);
    } else {
      std::size_t best = 0;
      for (std::size_t i = 1; i < res.history.size(); ++i) {
        if (res.history[i].config.weight > res.history[best].config.weight) best = i;
      }
      cand = res.history[best].config.weight > 0 ? detail::mutate(res.history[best].config, space, rng)
                                                 : detail::random_config(space, rng);
    }
    cand.weight = 0;

    double score = 0.0;
    try {
      score = objective(cand);
      if (!std::isfinite(score)) score = 0.0;
    } catch (const std::exception&) {
      score = 0.0;
    }

    cand.weight = 1;
    for (std::size_t j = 0; j < seen.size(); ++j) {
      if (std::abs(score - seen[j]) < epsilon) {
        --res.history[j].config.weight;
        cand.weight = -1;
        break;
      }
    }
    res.history.push_back({cand, score});
    seen.push_back(score);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < res.history.size(); ++i) {
    if (res.history[i].score > res.history[best].score) best = i;
  }
  res.best_config = res.history[best].config;
  res.best_score = res.history[best].score;
  return res;
}

/// Best score seen up to and including each iteration.
inline std::vector<double> best_so_far(const std::vector<Trial>& history) {
  std::vector<double> out;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& t : history) {
    best = std::max(best, t.score);
    out.push_back(best);
  }
  return out;
}

/// Audit CSV: iteration,preprocessor,n_layers,units_per_layer,epochs,learning_rate,score
inline void write_history_csv(const std::vector<Trial>& history, std::ostream& out) {
  out << "iteration,preprocessor,n_layers,units_per_layer,epochs,learning_rate,score\n";
  const auto prec = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& c = history[i].config;
    out << i << ',' << to_string(c.preprocessor) << ',' << c.n_layers << ',' << c.units_per_layer << ',' << c.epochs
        << ',' << c.learning_rate << ',' << history[i].score << '\n';
  }
  out.precision(prec);
}

}  // namespace ghost
