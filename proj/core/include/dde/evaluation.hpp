#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dde/dataset.hpp"
#include "dde/sampler.hpp"
#include "dde/trainer.hpp"

namespace dde {

struct EvalReport {
    std::string method_name;
    int n_samples = 0;
    double mean_reward = 0.0;
    double reward_se = 0.0;
    double ref_mean_reward = 0.0;
    double improvement = 0.0;      // mean_reward - ref_mean_reward, paired
    double improvement_ci_lo = 0.0;  // 95% stratified bootstrap
    double improvement_ci_hi = 0.0;
    double beat_ratio = 0.0;       // ties count 0.5
    std::vector<double> per_class_mean_reward;
};

/// Paired evaluation: for every (class, seed index) both models denoise the
/// same initial noise.
EvalReport evaluate(const NoisePredictor& net, const NoisePredictor& reference,
                    const ToyWorld& world, const Schedule& s, const SamplerConfig& cfg,
                    int n_per_class, std::uint64_t seed, int n_threads = 0);

nlohmann::json report_to_json(const EvalReport& r);
std::string report_to_text(const EvalReport& r);

struct AblationCell {
    TrainConfig config;
    EvalReport report;
};

/// Train and evaluate each config against the shared dataset and reference.
std::vector<AblationCell> ablation_grid(const std::vector<TrainConfig>& configs,
                                        const PreferenceDataset& dataset,
                                        const NoisePredictor& reference, const Schedule& s,
                                        const ToyWorld& world, const SamplerConfig& sampler_cfg,
                                        int n_per_class, std::uint64_t eval_seed,
                                        int n_threads = 0);

/// Writes profile.csv (t, |correction|, ddim coefficient) and
/// convergence.csv (iteration, mean |delta r|) under out_dir.
void export_diagnostics(const CalibrationTable& table, const Schedule& s, const TrainLog& log,
                        const std::string& out_dir);

/// CSV sample dump (sample_id, class, x_1..x_d).
void write_samples_csv(const std::vector<LabeledSample>& samples, int dim,
                       const std::string& path);

}  // namespace dde
