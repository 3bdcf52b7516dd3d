#include "dde/predictor.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace dde {

namespace {
std::atomic<std::uint64_t> next_net_id{1};
}

NoisePredictor::NoisePredictor(const PredictorConfig& cfg) : cfg_(cfg) {
    if (cfg_.dim < 1 || cfg_.n_classes < 1 || cfg_.hidden < 1 || cfg_.n_steps < 1) {
        throw std::invalid_argument("NoisePredictor: all dimensions must be positive");
    }
    if (cfg_.time_feats < 2 || cfg_.time_feats % 2 != 0) {
        throw std::invalid_argument("NoisePredictor: time_feats must be even and >= 2");
    }
    in_dim_ = cfg_.dim + cfg_.time_feats;
    int h = cfg_.hidden;
    off_w1_ = 0;
    off_b1_ = off_w1_ + h * in_dim_;
    off_emb_ = off_b1_ + h;
    off_w2_ = off_emb_ + cfg_.n_classes * h;
    off_b2_ = off_w2_ + h * h;
    off_w3_ = off_b2_ + h;
    off_b3_ = off_w3_ + cfg_.dim * h;
    params_.assign(off_b3_ + cfg_.dim, 0.0);
    id_ = next_net_id.fetch_add(1);
}

void NoisePredictor::init_random(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&](int off, int rows, int cols) {
        double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (int i = 0; i < rows * cols; ++i) params_[off + i] = u(rng);
    };
    int h = cfg_.hidden;
    fill(off_w1_, h, in_dim_);
    fill(off_emb_, cfg_.n_classes, h);
    fill(off_w2_, h, h);
    fill(off_w3_, cfg_.dim, h);
    // biases stay zero
}

std::vector<double> NoisePredictor::time_features(int t) const {
    std::vector<double> f(cfg_.time_feats);
    double tau = static_cast<double>(t) / cfg_.n_steps;
    int half = cfg_.time_feats / 2;
    for (int j = 0; j < half; ++j) {
        double freq = std::pow(1000.0, half > 1 ? static_cast<double>(j) / (half - 1) : 0.0);
        f[2 * j] = std::sin(2.0 * M_PI * freq * tau);
        f[2 * j + 1] = std::cos(2.0 * M_PI * freq * tau);
    }
    return f;
}

std::vector<double> NoisePredictor::predict(const std::vector<double>& x_t, int t, int c) const {
    ForwardCache cache;
    return predict(x_t, t, c, cache);
}

std::vector<double> NoisePredictor::predict(const std::vector<double>& x_t, int t, int c,
                                            ForwardCache& cache) const {
    if (static_cast<int>(x_t.size()) != cfg_.dim) {
        throw std::invalid_argument("predict: input dimension mismatch");
    }
    if (t < 1 || t > cfg_.n_steps) {
        throw std::out_of_range("predict: step " + std::to_string(t) + " outside 1.." +
                                std::to_string(cfg_.n_steps));
    }
    if (c < 0 || c >= cfg_.n_classes) {
        throw std::out_of_range("predict: class " + std::to_string(c) + " outside 0.." +
                                std::to_string(cfg_.n_classes - 1));
    }
    int h = cfg_.hidden;
    cache.input.resize(in_dim_);
    for (int i = 0; i < cfg_.dim; ++i) cache.input[i] = x_t[i];
    auto tf = time_features(t);
    for (int i = 0; i < cfg_.time_feats; ++i) cache.input[cfg_.dim + i] = tf[i];
    cache.class_id = c;
    cache.net_id = id_;

    cache.h1.resize(h);
    for (int i = 0; i < h; ++i) {
        double z = params_[off_b1_ + i] + params_[off_emb_ + c * h + i];
        const double* row = &params_[off_w1_ + i * in_dim_];
        for (int j = 0; j < in_dim_; ++j) z += row[j] * cache.input[j];
        cache.h1[i] = std::tanh(z);
    }
    cache.h2.resize(h);
    for (int i = 0; i < h; ++i) {
        double z = params_[off_b2_ + i];
        const double* row = &params_[off_w2_ + i * h];
        for (int j = 0; j < h; ++j) z += row[j] * cache.h1[j];
        cache.h2[i] = std::tanh(z);
    }
    std::vector<double> out(cfg_.dim);
    for (int i = 0; i < cfg_.dim; ++i) {
        double z = params_[off_b3_ + i];
        const double* row = &params_[off_w3_ + i * h];
        for (int j = 0; j < h; ++j) z += row[j] * cache.h2[j];
        out[i] = z;
    }
    return out;
}

void NoisePredictor::backward(const std::vector<double>& upstream, const ForwardCache& cache,
                              ParamGradient& grad) const {
    if (cache.net_id != id_) {
        throw std::invalid_argument("backward: cache does not belong to this net");
    }
    if (static_cast<int>(upstream.size()) != cfg_.dim) {
        throw std::invalid_argument("backward: upstream dimension mismatch");
    }
    if (grad.size() != params_.size()) {
        throw std::invalid_argument("backward: gradient size mismatch");
    }
    int h = cfg_.hidden;
    int c = cache.class_id;

    // output layer
    std::vector<double> gh2(h, 0.0);
    for (int i = 0; i < cfg_.dim; ++i) {
        double g = upstream[i];
        grad[off_b3_ + i] += g;
        double* grow = &grad[off_w3_ + i * h];
        const double* row = &params_[off_w3_ + i * h];
        for (int j = 0; j < h; ++j) {
            grow[j] += g * cache.h2[j];
            gh2[j] += row[j] * g;
        }
    }
    // second hidden layer
    std::vector<double> gh1(h, 0.0);
    for (int i = 0; i < h; ++i) {
        double d = gh2[i] * (1.0 - cache.h2[i] * cache.h2[i]);
        grad[off_b2_ + i] += d;
        double* grow = &grad[off_w2_ + i * h];
        const double* row = &params_[off_w2_ + i * h];
        for (int j = 0; j < h; ++j) {
            grow[j] += d * cache.h1[j];
            gh1[j] += row[j] * d;
        }
    }
    // first hidden layer + class embedding
    for (int i = 0; i < h; ++i) {
        double d = gh1[i] * (1.0 - cache.h1[i] * cache.h1[i]);
        grad[off_b1_ + i] += d;
        grad[off_emb_ + c * h + i] += d;
        double* grow = &grad[off_w1_ + i * in_dim_];
        for (int j = 0; j < in_dim_; ++j) grow[j] += d * cache.input[j];
    }
}

ParamGradient NoisePredictor::backward(const std::vector<double>& upstream,
                                       const ForwardCache& cache) const {
    ParamGradient grad(params_.size(), 0.0);
    backward(upstream, cache, grad);
    return grad;
}

NoisePredictor NoisePredictor::clone_as_reference() const {
    NoisePredictor copy(cfg_);
    copy.params_ = params_;
    return copy;
}

}  // namespace dde
