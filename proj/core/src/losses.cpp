#include "dde/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace dde {

Method method_from_string(const std::string& name) {
    if (name == "sft") return Method::Sft;
    if (name == "uniform") return Method::Uniform;
    if (name == "discounted") return Method::Discounted;
    if (name == "dde") return Method::Dde;
    if (name == "dde-step") return Method::DdeStep;
    if (name == "dde-single") return Method::DdeSingle;
    throw std::invalid_argument("unknown method '" + name + "'; valid: " + valid_method_names());
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Sft: return "sft";
        case Method::Uniform: return "uniform";
        case Method::Discounted: return "discounted";
        case Method::Dde: return "dde";
        case Method::DdeStep: return "dde-step";
        case Method::DdeSingle: return "dde-single";
    }
    return "?";
}

std::string valid_method_names() { return "sft, uniform, discounted, dde, dde-step, dde-single"; }

double neg_log_sigmoid(double z) {
    if (z > 0.0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

namespace {

// sigmoid(z) - 1, stable for large |z|
double sigmoid_minus_one(double z) { return -1.0 / (1.0 + std::exp(z)); }

// One model pass on one noised sample, with everything downstream losses need.
struct SampleEval {
    std::vector<double> x_t;
    std::vector<double> eps;
    std::vector<double> x0_hat;
    ForwardCache cache;
    double sq_x0 = 0.0;    // ||x0 - x0_hat||^2
    double sq_step = 0.0;  // A_t^2 * sq_x0: posterior-mean distance at step t
};

// Coefficient of x0 in the posterior mean of q(x_{t-1}|x_t, x0).
double posterior_x0_coef(const Schedule& s, int t) {
    return std::sqrt(s.alpha_bar(t - 1)) * s.beta(t) / (1.0 - s.alpha_bar(t));
}

SampleEval eval_sample(const Schedule& s, const NoisePredictor& net,
                       const std::vector<double>& x0, int c, int t,
                       const std::vector<double>& noise) {
    SampleEval e;
    e.x_t = forward_marginal(s, x0, t, noise);
    e.eps = net.predict(e.x_t, t, c, e.cache);
    e.x0_hat = single_shot_mean(s, e.x_t, e.eps, t);
    for (size_t i = 0; i < x0.size(); ++i) {
        double d = e.x0_hat[i] - x0[i];
        e.sq_x0 += d * d;
    }
    double a = posterior_x0_coef(s, t);
    e.sq_step = a * a * e.sq_x0;
    return e;
}

void check_pair_inputs(const NoisePredictor& target, const NoisePredictor& reference,
                       const PreferencePair& pair, const std::vector<double>& noise_w,
                       const std::vector<double>& noise_l) {
    int d = target.config().dim;
    if (reference.config().dim != d) {
        throw std::invalid_argument("loss: target/reference dimension mismatch");
    }
    if (static_cast<int>(pair.x0_w.size()) != d || static_cast<int>(pair.x0_l.size()) != d ||
        static_cast<int>(noise_w.size()) != d || static_cast<int>(noise_l.size()) != d) {
        throw std::invalid_argument("loss: pair or noise dimension mismatch");
    }
}

PairObservations make_observations(const Schedule& s, int t, const SampleEval& tw,
                                   const SampleEval& tl, const SampleEval& rw,
                                   const SampleEval& rl) {
    PairObservations obs;
    if (t < 2) return obs;
    double two_var = 2.0 * s.posterior_var(t);
    obs.valid = true;
    obs.k = t - 1;
    obs.target_w = -tw.sq_step / two_var;
    obs.target_l = -tl.sq_step / two_var;
    obs.ref_w = -rw.sq_step / two_var;
    obs.ref_l = -rl.sq_step / two_var;
    return obs;
}

// Shared assembly for every log-sigmoid preference loss. single_shot picks
// x0-space vs posterior-mean MSE terms; logit_weight multiplies the whole
// logit (discounted baseline).
LossResult dpo_family_loss(const Schedule& s, const NoisePredictor& target,
                           const NoisePredictor& reference, const PreferencePair& pair, int t,
                           const std::vector<double>& noise_w,
                           const std::vector<double>& noise_l, double beta_dpo,
                           double correction, bool single_shot, double logit_weight) {
    check_pair_inputs(target, reference, pair, noise_w, noise_l);
    int c = pair.class_id;
    auto tw = eval_sample(s, target, pair.x0_w, c, t, noise_w);
    auto tl = eval_sample(s, target, pair.x0_l, c, t, noise_l);
    auto rw = eval_sample(s, reference, pair.x0_w, c, t, noise_w);
    auto rl = eval_sample(s, reference, pair.x0_l, c, t, noise_l);

    LossResult res;
    auto& b = res.breakdown;
    b.mse_target_w = single_shot ? tw.sq_x0 : tw.sq_step;
    b.mse_target_l = single_shot ? tl.sq_x0 : tl.sq_step;
    b.mse_ref_w = single_shot ? rw.sq_x0 : rw.sq_step;
    b.mse_ref_l = single_shot ? rl.sq_x0 : rl.sq_step;
    b.correction = correction;
    b.logit = logit_weight * beta_dpo *
              (-b.mse_target_w + b.mse_ref_w + b.mse_target_l - b.mse_ref_l + correction);
    b.loss = neg_log_sigmoid(b.logit);

    // d loss / d mse_target_w = (sigmoid(logit)-1) * (-weight*beta); winner and
    // loser terms enter with opposite signs. The MSE gradient w.r.t. the
    // predicted noise is -2 * scale * amp(t) * (x0_hat - x0).
    double dl_dlogit = sigmoid_minus_one(b.logit);
    double amp = s.amplification(t);
    double mse_scale = 1.0;
    if (!single_shot) {
        double a = posterior_x0_coef(s, t);
        mse_scale = a * a;
    }
    double common = dl_dlogit * logit_weight * beta_dpo * 2.0 * mse_scale * amp;

    res.grad.assign(target.params().size(), 0.0);
    std::vector<double> upstream(pair.x0_w.size());
    // winner: d logit/d msw = -wb, d msw/d eps_i = -2*scale*amp*(x0_hat-x0)
    for (size_t i = 0; i < upstream.size(); ++i) {
        upstream[i] = common * (tw.x0_hat[i] - pair.x0_w[i]);
    }
    target.backward(upstream, tw.cache, res.grad);
    // loser: opposite sign through the logit
    for (size_t i = 0; i < upstream.size(); ++i) {
        upstream[i] = -common * (tl.x0_hat[i] - pair.x0_l[i]);
    }
    target.backward(upstream, tl.cache, res.grad);

    res.obs = make_observations(s, t, tw, tl, rw, rl);
    return res;
}

}  // namespace

LossResult dde_loss(const Schedule& s, const NoisePredictor& target,
                    const NoisePredictor& reference, const PreferencePair& pair, int t,
                    const std::vector<double>& noise_w, const std::vector<double>& noise_l,
                    const CalibrationTable& table, double beta_dpo) {
    double corr = table.correction_term(t);
    return dpo_family_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo, corr,
                           /*single_shot=*/true, /*logit_weight=*/1.0);
}

LossResult dde_single_loss(const Schedule& s, const NoisePredictor& target,
                           const NoisePredictor& reference, const PreferencePair& pair, int t,
                           const std::vector<double>& noise_w,
                           const std::vector<double>& noise_l, double beta_dpo) {
    return dpo_family_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo, 0.0,
                           /*single_shot=*/true, /*logit_weight=*/1.0);
}

LossResult dde_step_loss(const Schedule& s, const NoisePredictor& target,
                         const NoisePredictor& reference, const PreferencePair& pair, int t,
                         const std::vector<double>& noise_w, const std::vector<double>& noise_l,
                         const CalibrationTable& table, double beta_dpo) {
    double corr = table.correction_term(t);
    return dpo_family_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo, corr,
                           /*single_shot=*/false, /*logit_weight=*/1.0);
}

LossResult uniform_dpo_loss(const Schedule& s, const NoisePredictor& target,
                            const NoisePredictor& reference, const PreferencePair& pair, int t,
                            const std::vector<double>& noise_w,
                            const std::vector<double>& noise_l, double beta_dpo) {
    return dpo_family_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo, 0.0,
                           /*single_shot=*/false, /*logit_weight=*/1.0);
}

LossResult discounted_dpo_loss(const Schedule& s, const NoisePredictor& target,
                               const NoisePredictor& reference, const PreferencePair& pair,
                               int t, const std::vector<double>& noise_w,
                               const std::vector<double>& noise_l, double beta_dpo,
                               double discount) {
    if (!(discount > 0.0 && discount <= 1.0)) {
        throw std::invalid_argument("discounted_dpo_loss: discount must be in (0, 1]");
    }
    double weight = std::pow(discount, s.num_steps() - t);
    return dpo_family_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo, 0.0,
                           /*single_shot=*/false, weight);
}

LossResult sft_loss(const Schedule& s, const NoisePredictor& target, const PreferencePair& pair,
                    int t, const std::vector<double>& noise_w) {
    auto x_t = forward_marginal(s, pair.x0_w, t, noise_w);
    ForwardCache cache;
    auto eps = target.predict(x_t, t, pair.class_id, cache);
    LossResult res;
    double sq = 0.0;
    std::vector<double> upstream(eps.size());
    for (size_t i = 0; i < eps.size(); ++i) {
        double d = noise_w[i] - eps[i];
        sq += d * d;
        upstream[i] = -2.0 * d;
    }
    res.breakdown.mse_target_w = sq;
    res.breakdown.loss = sq;
    res.grad.assign(target.params().size(), 0.0);
    target.backward(upstream, cache, res.grad);
    return res;
}

LossResult compute_loss(const MethodSpec& spec, const Schedule& s, const NoisePredictor& target,
                        const NoisePredictor& reference, const PreferencePair& pair, int t,
                        const std::vector<double>& noise_w, const std::vector<double>& noise_l,
                        const CalibrationTable& table, double beta_dpo) {
    switch (spec.kind) {
        case Method::Sft:
            return sft_loss(s, target, pair, t, noise_w);
        case Method::Uniform:
            return uniform_dpo_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo);
        case Method::Discounted:
            return discounted_dpo_loss(s, target, reference, pair, t, noise_w, noise_l,
                                       beta_dpo, spec.discount);
        case Method::Dde:
            return dde_loss(s, target, reference, pair, t, noise_w, noise_l, table, beta_dpo);
        case Method::DdeStep:
            return dde_step_loss(s, target, reference, pair, t, noise_w, noise_l, table,
                                 beta_dpo);
        case Method::DdeSingle:
            return dde_single_loss(s, target, reference, pair, t, noise_w, noise_l, beta_dpo);
    }
    throw std::invalid_argument("compute_loss: bad method");
}

}  // namespace dde
