#include "dde/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace dde {

Adam::Adam(const AdamConfig& cfg, size_t n_params) : cfg_(cfg) {
    if (cfg_.lr <= 0.0) throw std::invalid_argument("Adam: lr must be positive");
    m_.assign(n_params, 0.0);
    v_.assign(n_params, 0.0);
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
        throw std::invalid_argument("Adam: size mismatch");
    }
    ++t_;
    double lr = cfg_.lr;
    if (cfg_.warmup_steps > 0 && t_ < cfg_.warmup_steps) {
        lr *= static_cast<double>(t_) / cfg_.warmup_steps;
    }
    double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (size_t i = 0; i < params.size(); ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
        double mhat = m_[i] / bc1;
        double vhat = v_[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
}

void Adam::restore(std::vector<double> m, std::vector<double> v, long t) {
    if (m.size() != m_.size() || v.size() != v_.size()) {
        throw std::invalid_argument("Adam: restore size mismatch");
    }
    m_ = std::move(m);
    v_ = std::move(v);
    t_ = t;
}

}  // namespace dde
