#pragma once

#include "ghost/common.hpp"
#include "ghost/dataset.hpp"
#include "ghost/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ghost {

struct HeuristicVerdict {
  std::vector<double> attempt_losses;
  double min_loss = std::numeric_limits<double>::infinity();
  double threshold = 1000.0;
  bool recommended = false;
  AutoencoderSpec spec;
};

struct HeuristicConfig {
  int bottleneck = 32;
  double threshold = 1000.0;
  int max_attempts = 3;
  TrainConfig train{100, 0.001, 128, Loss::mse, 0};
};

/// 32 for ordinary tabular widths, 128 once inputs exceed 512 features.
inline int default_bottleneck(std::size_t features) { return features > 512 ? 128 : 32; }

/// Autoencoder applicability check.
///
/// Builds the mirrored powers-of-two autoencoder for the raw features and
/// trains it up to max_attempts times (seed, seed+1, ...). Each attempt's loss
/// is the reconstruction MSE over the whole dataset after training; a
/// diverged attempt counts as +inf. Stops at the first attempt under the
/// threshold.
inline HeuristicVerdict complexity_check(const Dataset& d, const HeuristicConfig& cfg = {}) {
  if (cfg.bottleneck < 1) throw DataError("heuristic: bottleneck must be positive");
  if (cfg.max_attempts < 1 || cfg.max_attempts > 3) throw DataError("heuristic: between 1 and 3 attempts");

  HeuristicVerdict v;
  v.threshold = cfg.threshold;
  v.spec = build_autoencoder_spec(static_cast<int>(d.cols()), cfg.bottleneck);
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.train.seed + static_cast<Seed>(attempt);
    double loss = std::numeric_limits<double>::infinity();
    try {
      auto net = make_autoencoder(v.spec, tc.seed);
      auto trained = train_autoencoder(std::move(net), d.features(), tc);
      loss = batch_loss(trained.net, d.features(), d.features(), Loss::mse);
      if (!std::isfinite(loss)) loss = std::numeric_limits<double>::infinity();
    } catch (const TrainingError&) {
      // counts as a failed attempt
    }
    v.attempt_losses.push_back(loss);
    v.min_loss = std::min(v.min_loss, loss);
    if (loss < cfg.threshold) break;
  }
  v.recommended = v.min_loss < v.threshold;
  return v;
}

/// Overload taking the training settings directly.
inline HeuristicVerdict complexity_check(const Dataset& d, int bottleneck, const TrainConfig& train) {
  HeuristicConfig cfg;
  cfg.bottleneck = bottleneck;
  cfg.train = train;
  return complexity_check(d, cfg);
}

}  // namespace ghost
