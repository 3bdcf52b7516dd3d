#include "dde/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dde {

std::vector<int> ddim_step_subset(int T, int n_steps) {
    if (n_steps < 1 || n_steps > T) {
        throw std::invalid_argument("ddim_step_subset: need 1 <= n_steps <= T");
    }
    int stride = T / n_steps;
    std::vector<int> steps;
    steps.reserve(n_steps + 1);
    for (int i = 0; i < n_steps; ++i) steps.push_back(T - i * stride);
    steps.push_back(0);
    return steps;
}

std::vector<double> sample(const NoisePredictor& net, const Schedule& s, int c,
                           const SamplerConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x_T(net.config().dim);
    for (auto& v : x_T) v = normal(rng);
    return sample_from(net, s, c, cfg, std::move(x_T), rng);
}

std::vector<double> sample_from(const NoisePredictor& net, const Schedule& s, int c,
                                const SamplerConfig& cfg, std::vector<double> x_T,
                                std::mt19937_64& rng) {
    if (static_cast<int>(x_T.size()) != net.config().dim) {
        throw std::invalid_argument("sample_from: x_T dimension mismatch");
    }
    if (net.config().n_steps != s.num_steps()) {
        throw std::invalid_argument("sample_from: predictor and schedule disagree on T");
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x = std::move(x_T);

    if (cfg.kind == SamplerKind::Ancestral) {
        for (int t = s.num_steps(); t >= 1; --t) {
            auto eps = net.predict(x, t, c);
            auto x0_hat = single_shot_mean(s, x, eps, t);
            for (auto& v : x0_hat) v = std::clamp(v, -cfg.x0_clip, cfg.x0_clip);
            auto post = posterior_params(s, x, x0_hat, t);
            double sigma = std::sqrt(post.var);
            x = post.mean;
            if (!cfg.deterministic && sigma > 0.0) {
                for (auto& v : x) v += sigma * normal(rng);
            }
        }
        return x;
    }

    auto steps = ddim_step_subset(s.num_steps(), cfg.n_steps);
    for (size_t i = 0; i + 1 < steps.size(); ++i) {
        int t = steps[i];
        int tp = steps[i + 1];
        auto eps = net.predict(x, t, c);
        auto p = ddim_mean(s, x, eps, t, tp);
        double sigma = std::sqrt(p.var);
        x = p.mean;
        if (!cfg.deterministic && sigma > 0.0 && tp > 0) {
            for (auto& v : x) v += sigma * normal(rng);
        }
    }
    return x;
}

}  // namespace dde
