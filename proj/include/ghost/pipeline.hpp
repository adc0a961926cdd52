#pragma once

#include "ghost/common.hpp"
#include "ghost/dataset.hpp"
#include "ghost/evalstats.hpp"
#include "ghost/network.hpp"
#include "ghost/preprocess.hpp"
#include "ghost/sampling.hpp"
#include "ghost/tuner.hpp"

#include <functional>
#include <vector>

namespace ghost {

enum class TuningMetric { auc, f1 };

struct GhostConfig {
  double tau = 0.5;
  FuzzyConfig fuzzy;
  SmoteConfig smote;
  ConfigSpace space;
  int iterations = 30;
  double epsilon = 0.2;
  Seed seed = 0;
  TuningMetric metric = TuningMetric::auc;
  double validation_fraction = 0.2;  // of the preprocessed training set, used only for tuning
  int batch_size = 64;

  void validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw DataError("ghost: tau must lie strictly between 0 and 1");
    if (!(fuzzy.delta_r > 0.0)) throw DataError("ghost: delta_r must be positive");
    if (iterations < 1) throw DataError("ghost: iterations must be at least 1");
    if (!(epsilon > 0.0)) throw DataError("ghost: epsilon must be positive");
    if (batch_size < 1) throw DataError("ghost: batch size must be positive");
    space.validate();
  }
};

struct GhostResult {
  Config theta_star;
  bool two_sample_used = false;
  RunRecord metrics;
  std::vector<Trial> tuner_history;
  double phi = 0.0;                   // tuned validation score of the returned pass, in [0,1]
  int passes = 0;                     // 1, or 2 when the twoSample retry ran
  std::size_t preprocessed_rows = 0;  // training rows after oversampling
};

/// Replaces the validation objective; receives the candidate and whether the
/// twoSample pass is running. Used to drive the control flow in tests.
using ObjectiveOverride = std::function<double(const Config&, bool two_sample)>;

/// Fits the preprocessor and a classifier for `c` on `train`, returning test scores.
inline std::vector<double> fit_and_score(const Config& c, const Dataset& train, const Matrix& test_x, int batch_size,
                                         Seed seed) {
  const FeatureTransform tf = fit_preprocessor(c.preprocessor, train.features());
  std::vector<Eigen::Index> hidden(static_cast<std::size_t>(c.n_layers), c.units_per_layer);
  Network net = make_classifier(static_cast<Eigen::Index>(train.cols()), hidden, seed);
  TrainConfig tc{c.epochs, c.learning_rate, batch_size, Loss::binary_cross_entropy, seed};
  const auto trained = fit(std::move(net), tf.apply(train.features()), detail::labels_as_targets(train.labels()), tc);
  return predict_proba(trained.net, tf.apply(test_x));
}

namespace detail {

inline double tuning_score(TuningMetric m, const std::vector<double>& scores, const std::vector<int>& labels) {
  const RunRecord r = classification_metrics(scores, labels);
  return (m == TuningMetric::auc ? r.auc : r.f1) / 100.0;
}

inline GhostResult ghost_pass(const Dataset& train, const Dataset& test, bool two_sample, const GhostConfig& cfg,
                              const ObjectiveOverride& override_objective) {
  const Dataset pre = preprocess_ghost(train, two_sample, cfg.fuzzy, cfg.smote, cfg.seed);
  const SplitPair tuning = split(pre, cfg.validation_fraction, cfg.seed + 1);

  Objective objective;
  if (override_objective) {
    objective = [&](const Config& c) { return override_objective(c, two_sample); };
  } else {
    objective = [&](const Config& c) {
      const auto scores = fit_and_score(c, tuning.train, tuning.test.features(), cfg.batch_size, cfg.seed);
      return tuning_score(cfg.metric, scores, tuning.test.labels());
    };
  }
  TunerResult tuned = dodge(cfg.space, objective, cfg.iterations, cfg.epsilon, cfg.seed);

  GhostResult r;
  r.theta_star = tuned.best_config;
  r.phi = tuned.best_score;
  r.two_sample_used = two_sample;
  r.tuner_history = std::move(tuned.history);
  r.preprocessed_rows = pre.rows();
  const auto scores = fit_and_score(r.theta_star, pre, test.features(), cfg.batch_size, cfg.seed);
  r.metrics = classification_metrics(scores, test.labels());
  return r;
}

}  // namespace detail

/// One GHOST run on a fixed split.
///
/// Features are min-max scaled with training statistics. The training rows
/// are oversampled, DODGE tunes on a validation slice of the oversampled set,
/// and a final network trained with the best config is scored on the
/// untouched test rows. If the tuned score falls below tau the whole pass is
/// repeated once with twoSample enabled and that result is returned.
inline GhostResult run_ghost(const Dataset& train, const Dataset& test, const GhostConfig& cfg,
                             const ObjectiveOverride& override_objective = {}) {
  cfg.validate();
  if (train.cols() != test.cols()) throw DataError("ghost: train and test feature counts differ");
  if (train.count(0) == 0 || train.count(1) == 0) throw DataError("ghost: training data needs both classes");

  const auto [train_scaled, scaler] = minmax_fit_transform(train);
  const Dataset test_scaled = scaler.apply(test);

  GhostResult r = detail::ghost_pass(train_scaled, test_scaled, false, cfg, override_objective);
  r.passes = 1;
  if (r.phi < cfg.tau) {
    r = detail::ghost_pass(train_scaled, test_scaled, true, cfg, override_objective);
    r.passes = 2;
  }
  return r;
}

}  // namespace ghost
