#pragma once

#include <vector>

namespace dde {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int warmup_steps = 50;  // linear warm-up, then constant lr
};

/// Adam with bias correction and linear learning-rate warm-up.
class Adam {
public:
    Adam(const AdamConfig& cfg, size_t n_params);

    void step(std::vector<double>& params, const std::vector<double>& grad);

    const AdamConfig& config() const { return cfg_; }
    long iterations() const { return t_; }

    std::vector<double>& first_moment() { return m_; }
    std::vector<double>& second_moment() { return v_; }
    const std::vector<double>& first_moment() const { return m_; }
    const std::vector<double>& second_moment() const { return v_; }
    void restore(std::vector<double> m, std::vector<double> v, long t);

private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_ = 0;
};

}  // namespace dde
