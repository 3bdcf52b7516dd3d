#include "dde/trainer.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "dde/checkpoint.hpp"

namespace dde {

PretrainResult pretrain_reference(const ToyWorld& world, const Schedule& s,
                                  NoisePredictor net, const PretrainConfig& cfg,
                                  std::uint64_t seed) {
    if (net.config().dim != world.dim) {
        throw std::invalid_argument("pretrain_reference: predictor/world dimension mismatch");
    }
    std::mt19937_64 rng(seed);
    auto data = generate_pretrain_data(world, cfg.n_samples, rng);
    auto val = generate_pretrain_data(world, cfg.n_val_samples, rng);

    std::uniform_int_distribution<int> pick_t(1, s.num_steps());
    std::normal_distribution<double> normal(0.0, 1.0);
    int d = world.dim;

    AdamConfig acfg;
    acfg.lr = cfg.lr;
    acfg.warmup_steps = 0;
    Adam opt(acfg, net.params().size());

    PretrainResult res{std::move(net)};

    // fixed noise draws for the validation set, so the metric is comparable
    // across epochs
    std::mt19937_64 val_rng(seed ^ 0xabcdef12345ULL);
    struct ValItem {
        int t;
        std::vector<double> noise;
    };
    std::vector<ValItem> val_noise(val.size());
    for (auto& item : val_noise) {
        item.t = pick_t(val_rng);
        item.noise.resize(d);
        for (auto& v : item.noise) v = normal(val_rng);
    }
    auto val_mse = [&]() {
        double total = 0.0;
        for (size_t i = 0; i < val.size(); ++i) {
            auto x_t = forward_marginal(s, val[i].x0, val_noise[i].t, val_noise[i].noise);
            auto eps = res.net.predict(x_t, val_noise[i].t, val[i].class_id);
            for (int j = 0; j < d; ++j) {
                double diff = val_noise[i].noise[j] - eps[j];
                total += diff * diff;
            }
        }
        return total / val.size();
    };

    std::vector<double> grad(res.net.params().size());
    std::vector<double> noise(d);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        size_t i = 0;
        while (i < data.size()) {
            size_t batch_end = std::min(data.size(), i + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            size_t batch_n = batch_end - i;
            for (; i < batch_end; ++i) {
                int t = pick_t(rng);
                for (auto& v : noise) v = normal(rng);
                auto x_t = forward_marginal(s, data[i].x0, t, noise);
                ForwardCache cache;
                auto eps = res.net.predict(x_t, t, data[i].class_id, cache);
                std::vector<double> upstream(d);
                for (int j = 0; j < d; ++j) {
                    double diff = noise[j] - eps[j];
                    batch_loss += diff * diff;
                    upstream[j] = -2.0 * diff / batch_n;
                }
                res.net.backward(upstream, cache, grad);
            }
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error("pretrain_reference: loss diverged");
            }
            opt.step(res.net.params(), grad);
        }
        res.epoch_val_mse.push_back(val_mse());
    }
    res.final_val_mse = res.epoch_val_mse.empty() ? val_mse() : res.epoch_val_mse.back();
    return res;
}

void TrainLog::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "step,loss,logit_mean,correction_mean,t_mean,mean_abs_dr,calib_hash\n";
    out.precision(17);
    for (const auto& r : records) {
        out << r.step << ',' << r.loss << ',' << r.logit_mean << ',' << r.correction_mean
            << ',' << r.t_mean << ',' << r.mean_abs_dr << ',' << r.calib_hash << '\n';
    }
}

TrainResult train(const TrainConfig& cfg, const PreferenceDataset& dataset,
                  const NoisePredictor& reference, const Schedule& s) {
    if (dataset.pairs.empty()) throw std::invalid_argument("train: empty dataset");
    if (cfg.batch_size < 1 || cfg.max_steps < 0) {
        throw std::invalid_argument("train: bad batch_size/max_steps");
    }
    int T = s.num_steps();
    auto range = cfg.step_range ? cfg.step_range : cfg.method.step_range;
    int t_lo = 1, t_hi = T;
    if (range) {
        t_lo = range->first;
        t_hi = range->second;
        if (t_lo < 1 || t_hi > T || t_lo > t_hi) {
            throw std::invalid_argument("train: step_range outside 1..T");
        }
    }

    TrainResult res{reference.clone_as_reference(), CalibrationTable(T, cfg.ema_decay)};
    res.t_histogram.assign(T + 1, 0);

    AdamConfig acfg;
    acfg.lr = cfg.learning_rate;
    acfg.beta1 = cfg.adam_beta1;
    acfg.beta2 = cfg.adam_beta2;
    acfg.eps = cfg.adam_eps;
    acfg.warmup_steps = cfg.warmup_steps;
    Adam opt(acfg, res.net.params().size());

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<size_t> pick_pair(0, dataset.pairs.size() - 1);
    std::uniform_int_distribution<int> pick_t(t_lo, t_hi);
    std::normal_distribution<double> normal(0.0, 1.0);
    int d = res.net.config().dim;

    std::vector<double> grad(res.net.params().size());
    std::vector<double> noise_w(d), noise_l(d);
    bool uses_table = cfg.method.kind != Method::Sft;

    for (long step = 1; step <= cfg.max_steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss_sum = 0.0, logit_sum = 0.0, corr_sum = 0.0, t_sum = 0.0;
        std::vector<PairObservations> pending;
        pending.reserve(cfg.batch_size);

        for (int b = 0; b < cfg.batch_size; ++b) {
            const auto& pair = dataset.pairs[pick_pair(rng)];
            int t = pick_t(rng);
            ++res.t_histogram[t];
            for (auto& v : noise_w) v = normal(rng);
            for (auto& v : noise_l) v = normal(rng);
            auto lr = compute_loss(cfg.method, s, res.net, reference, pair, t, noise_w,
                                   noise_l, res.table, cfg.beta_dpo);
            loss_sum += lr.breakdown.loss;
            logit_sum += lr.breakdown.logit;
            corr_sum += lr.breakdown.correction;
            t_sum += t;
            for (size_t i = 0; i < grad.size(); ++i) grad[i] += lr.grad[i] / cfg.batch_size;
            if (uses_table && lr.obs.valid) pending.push_back(lr.obs);
        }
        if (!std::isfinite(loss_sum)) {
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) +
                                     " (method " + to_string(cfg.method.kind) + ")");
        }
        opt.step(res.net.params(), grad);

        // calibration updates after the optimizer step, in batch order
        double dr_sum = 0.0;
        long dr_n = 0;
        for (const auto& obs : pending) {
            for (auto [role, value] : {std::pair{CalibRole::target_w, obs.target_w},
                                       std::pair{CalibRole::target_l, obs.target_l},
                                       std::pair{CalibRole::ref_w, obs.ref_w},
                                       std::pair{CalibRole::ref_l, obs.ref_l}}) {
                double before = res.table.value(role, obs.k);
                res.table.ema_update(role, obs.k, value);
                dr_sum += std::fabs(res.table.value(role, obs.k) - before);
                ++dr_n;
            }
        }

        TrainLogRecord rec;
        rec.step = step;
        rec.loss = loss_sum / cfg.batch_size;
        rec.logit_mean = logit_sum / cfg.batch_size;
        rec.correction_mean = corr_sum / cfg.batch_size;
        rec.t_mean = t_sum / cfg.batch_size;
        rec.mean_abs_dr = dr_n > 0 ? dr_sum / dr_n : 0.0;
        rec.calib_hash = hash_doubles(res.table.array(CalibRole::target_w));
        res.log.records.push_back(std::move(rec));
    }
    return res;
}

}  // namespace dde
