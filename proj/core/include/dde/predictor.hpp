#pragma once

#include <cstdint>
#include <vector>

namespace dde {

struct PredictorConfig {
    int dim = 2;          // data dimension, also the output dimension
    int n_classes = 4;
    int hidden = 32;
    int time_feats = 16;  // sinusoidal features of t/T, must be even
    int n_steps = 1000;   // T used to normalize the step index
};

/// Gradient with respect to every predictor parameter, flattened in the
/// same order as NoisePredictor::params().
using ParamGradient = std::vector<double>;

/// Activations cached by a forward pass, consumed by backward().
struct ForwardCache {
    std::vector<double> input;  // [x, time features]
    std::vector<double> h1;
    std::vector<double> h2;
    int class_id = -1;
    std::uint64_t net_id = 0;   // identity of the net that produced this cache
};

/// Conditional noise predictor eps(x_t, t, c): a two-hidden-layer tanh MLP
/// on [x, sinusoidal(t/T)] with an additive learned class embedding on the
/// first pre-activation. Parameters live in one flat array so optimizer
/// steps and finite-difference checks can treat the model as a plain vector.
class NoisePredictor {
public:
    explicit NoisePredictor(const PredictorConfig& cfg);

    const PredictorConfig& config() const { return cfg_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::uint64_t id() const { return id_; }

    void init_random(std::uint64_t seed);

    std::vector<double> predict(const std::vector<double>& x_t, int t, int c) const;
    std::vector<double> predict(const std::vector<double>& x_t, int t, int c,
                                ForwardCache& cache) const;

    /// Reverse-mode gradient of <upstream, output> w.r.t. all parameters,
    /// accumulated into grad (which must be zero-initialized or hold a
    /// running sum of the right size).
    void backward(const std::vector<double>& upstream, const ForwardCache& cache,
                  ParamGradient& grad) const;
    ParamGradient backward(const std::vector<double>& upstream,
                           const ForwardCache& cache) const;

    NoisePredictor clone_as_reference() const;

    std::vector<double> time_features(int t) const;

    // Flat-layout offsets, exposed for hand-constructed nets in tests.
    int off_w1() const { return off_w1_; }
    int off_b1() const { return off_b1_; }
    int off_emb() const { return off_emb_; }
    int off_w2() const { return off_w2_; }
    int off_b2() const { return off_b2_; }
    int off_w3() const { return off_w3_; }
    int off_b3() const { return off_b3_; }
    int input_dim() const { return in_dim_; }

private:
    PredictorConfig cfg_;
    int in_dim_;
    int off_w1_, off_b1_, off_emb_, off_w2_, off_b2_, off_w3_, off_b3_;
    std::vector<double> params_;
    std::uint64_t id_;
};

}  // namespace dde
