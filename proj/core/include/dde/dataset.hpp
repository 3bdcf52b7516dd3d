#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dde/predictor.hpp"
#include "dde/sampler.hpp"
#include "dde/schedule.hpp"

namespace dde {

/// Prompt-conditioned synthetic world: one preferred region center per class.
struct ToyWorld {
    int dim = 2;
    int n_classes = 4;
    std::vector<std::vector<double>> class_means;
    double base_spread = 0.6;
};

ToyWorld default_toy_world();
void validate_world(const ToyWorld& world);

/// Analytic reward: negative squared distance to the class center.
double reward(const ToyWorld& world, const std::vector<double>& x, int c);

struct LabeledSample {
    std::vector<double> x0;
    int class_id = 0;
};

std::vector<LabeledSample> generate_pretrain_data(const ToyWorld& world, int n,
                                                  std::mt19937_64& rng);

struct PreferencePair {
    int class_id = 0;
    std::vector<double> x0_w;
    std::vector<double> x0_l;
    double reward_w = 0.0;
    double reward_l = 0.0;  // strictly less than reward_w
};

struct PreferenceDataset {
    int dim = 0;
    int n_classes = 0;
    std::uint64_t seed = 0;
    std::string reference_checksum;
    int ties_dropped = 0;
    std::vector<PreferencePair> pairs;
};

/// Draw two reference samples per pair for a random class, rank them by
/// reward, drop exact ties. Throws if more than half the pairs tie.
PreferenceDataset build_preference_pairs(const ToyWorld& world, const NoisePredictor& reference,
                                         const Schedule& s, int n_pairs,
                                         const SamplerConfig& sampler_cfg, std::uint64_t seed,
                                         const std::string& reference_checksum);

/// JSON-lines container: one header object, then one object per pair.
void save_dataset(const PreferenceDataset& ds, const std::string& path);
PreferenceDataset load_dataset(const std::string& path);

}  // namespace dde
