#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dde/dataset.hpp"
#include "dde/evaluation.hpp"
#include "dde/predictor.hpp"
#include "dde/sampler.hpp"
#include "dde/schedule.hpp"
#include "dde/trainer.hpp"

namespace dde {

/// Everything a run needs, loaded from one JSON config file. Flags override
/// individual fields; the merged config is written next to every artifact.
struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "runs/default";
    int n_threads = 0;  // 0 = machine parallelism

    // schedule
    int T = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    ToyWorld world = default_toy_world();

    // predictor
    int hidden = 32;
    int time_feats = 16;

    PretrainConfig pretrain;
    int n_pairs = 2000;
    TrainConfig train;
    SamplerConfig sampler;
    int eval_n_per_class = 128;

    // ablation grid
    std::vector<std::string> ablate_methods = {"dde",      "dde-single", "dde-step",
                                               "uniform",  "discounted", "sft"};
    std::vector<std::pair<int, int>> ablate_step_ranges;
    std::vector<std::uint64_t> ablate_seeds = {1, 2, 3, 4, 5};

    Schedule make_schedule() const { return Schedule(T, beta_start, beta_end); }
    PredictorConfig predictor_config() const;

    std::string reference_path() const { return out_dir + "/reference.json"; }
    std::string dataset_path() const { return out_dir + "/dataset.jsonl"; }
    std::string checkpoint_path(const std::string& method) const {
        return out_dir + "/checkpoint_" + method + ".json";
    }
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Parses the file and applies the DDE_OUT_DIR environment override.
ExperimentConfig load_config(const std::string& path);
void write_effective_config(const ExperimentConfig& cfg, const std::string& path);

// Command bodies shared between the CLI and tests. Each writes its
// artifacts under cfg.out_dir and returns the primary one.
std::string run_pretrain(const ExperimentConfig& cfg);
std::string run_gen_data(const ExperimentConfig& cfg);

struct TrainArtifacts {
    std::string checkpoint_path;
    std::string calibration_csv_path;
    std::string trainlog_path;
};
TrainArtifacts run_train(const ExperimentConfig& cfg);

struct EvalArtifacts {
    std::string report_json_path;
    std::string report_text_path;
    EvalReport report;
};
EvalArtifacts run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                       const std::string& baseline_path);

std::string run_ablate(const ExperimentConfig& cfg);

}  // namespace dde
