#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dde/calibration.hpp"
#include "dde/dataset.hpp"
#include "dde/losses.hpp"
#include "dde/optimizer.hpp"
#include "dde/predictor.hpp"
#include "dde/schedule.hpp"

namespace dde {

struct PretrainConfig {
    int epochs = 30;
    int n_samples = 4000;
    int n_val_samples = 1000;
    int batch_size = 64;
    double lr = 1e-3;
};

struct PretrainResult {
    NoisePredictor net;
    std::vector<double> epoch_val_mse;  // mean ||eps - eps_hat||^2 per epoch
    double final_val_mse = 0.0;
};

/// Standard noise-prediction pretraining on freshly generated toy data.
PretrainResult pretrain_reference(const ToyWorld& world, const Schedule& s,
                                  NoisePredictor net, const PretrainConfig& cfg,
                                  std::uint64_t seed);

struct TrainConfig {
    MethodSpec method;
    double beta_dpo = 5000.0;
    double ema_decay = 0.1;
    double learning_rate = 1e-3;
    int max_steps = 400;
    int batch_size = 32;
    std::optional<std::pair<int, int>> step_range;  // overrides method.step_range if set
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int warmup_steps = 50;
};

struct TrainLogRecord {
    long step = 0;
    double loss = 0.0;
    double logit_mean = 0.0;
    double correction_mean = 0.0;
    double t_mean = 0.0;
    double mean_abs_dr = 0.0;  // mean |delta r| over EMA updates this iteration
    std::string calib_hash;
};

struct TrainLog {
    std::vector<TrainLogRecord> records;
    void save_csv(const std::string& path) const;
};

struct TrainResult {
    NoisePredictor net;
    CalibrationTable table;
    TrainLog log;
    std::vector<long> t_histogram;  // index t in 1..T, counts of sampled steps
};

/// Preference-optimization loop: per iteration, batch-averaged loss and
/// gradient, one optimizer step, then EMA calibration updates from the same
/// forward passes (t = 1 observations skipped).
TrainResult train(const TrainConfig& cfg, const PreferenceDataset& dataset,
                  const NoisePredictor& reference, const Schedule& s);

}  // namespace dde
