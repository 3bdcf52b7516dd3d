#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dde/predictor.hpp"
#include "dde/schedule.hpp"

namespace dde {

enum class SamplerKind { Ancestral, Ddim };

struct SamplerConfig {
    SamplerKind kind = SamplerKind::Ddim;
    int n_steps = 50;            // DDIM subset size, <= T
    bool deterministic = true;   // zero all injected noise
    std::uint64_t seed = 0;
    double x0_clip = 10.0;       // box clip on the x0 prediction (ancestral only)
};

/// Descending DDIM step subset by uniform striding; leftover steps are
/// merged into the final jump to 0. Returned list starts at T and ends at 0.
std::vector<int> ddim_step_subset(int T, int n_steps);

/// Draw one sample, with x_T taken from rng.
std::vector<double> sample(const NoisePredictor& net, const Schedule& s, int c,
                           const SamplerConfig& cfg, std::mt19937_64& rng);

/// Same, but denoise a caller-provided x_T (used for paired evaluation).
std::vector<double> sample_from(const NoisePredictor& net, const Schedule& s, int c,
                                const SamplerConfig& cfg, std::vector<double> x_T,
                                std::mt19937_64& rng);

}  // namespace dde
