#include "dde/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dde {

namespace {

struct PairedDraw {
    int class_id;
    double reward_net;
    double reward_ref;
};

std::uint64_t cell_seed(std::uint64_t base, int c, int i) {
    std::uint64_t h = base;
    h ^= 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(c) + 1);
    h ^= 0xc2b2ae3d27d4eb4fULL * (static_cast<std::uint64_t>(i) + 1);
    return h;
}

}  // namespace

EvalReport evaluate(const NoisePredictor& net, const NoisePredictor& reference,
                    const ToyWorld& world, const Schedule& s, const SamplerConfig& cfg,
                    int n_per_class, std::uint64_t seed, int n_threads) {
    if (n_per_class < 1) throw std::invalid_argument("evaluate: n_per_class must be >= 1");
    if (net.config().dim != reference.config().dim ||
        net.config().n_classes != reference.config().n_classes) {
        throw std::invalid_argument("evaluate: checkpoint dimension mismatch");
    }
    validate_world(world);
    int n_classes = world.n_classes;
    int total = n_classes * n_per_class;
    std::vector<PairedDraw> draws(total);

    auto work = [&](int begin, int end) {
        for (int idx = begin; idx < end; ++idx) {
            int c = idx / n_per_class;
            int i = idx % n_per_class;
            // both models denoise the identical x_T for this cell
            std::mt19937_64 noise_rng(cell_seed(seed, c, i));
            std::normal_distribution<double> normal(0.0, 1.0);
            std::vector<double> x_T(world.dim);
            for (auto& v : x_T) v = normal(noise_rng);
            std::mt19937_64 rng_a(cell_seed(seed ^ 0x1111, c, i));
            std::mt19937_64 rng_b(cell_seed(seed ^ 0x1111, c, i));
            auto xa = sample_from(net, s, c, cfg, x_T, rng_a);
            auto xb = sample_from(reference, s, c, cfg, x_T, rng_b);
            draws[idx] = {c, reward(world, xa, c), reward(world, xb, c)};
        }
    };
    int hw = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    hw = std::max(1, std::min(hw, total));
    if (hw == 1) {
        work(0, total);
    } else {
        std::vector<std::future<void>> futs;
        int chunk = (total + hw - 1) / hw;
        for (int b = 0; b < total; b += chunk) {
            futs.push_back(std::async(std::launch::async, work, b, std::min(total, b + chunk)));
        }
        for (auto& f : futs) f.get();
    }

    EvalReport r;
    r.n_samples = total;
    r.per_class_mean_reward.assign(n_classes, 0.0);
    double beat = 0.0, sum = 0.0, sum_ref = 0.0;
    for (const auto& d : draws) {
        sum += d.reward_net;
        sum_ref += d.reward_ref;
        r.per_class_mean_reward[d.class_id] += d.reward_net / n_per_class;
        if (d.reward_net > d.reward_ref) beat += 1.0;
        else if (d.reward_net == d.reward_ref) beat += 0.5;
    }
    r.mean_reward = sum / total;
    r.ref_mean_reward = sum_ref / total;
    r.improvement = r.mean_reward - r.ref_mean_reward;
    r.beat_ratio = beat / total;
    double var = 0.0;
    for (const auto& d : draws) {
        double diff = d.reward_net - r.mean_reward;
        var += diff * diff;
    }
    var /= std::max(1, total - 1);
    r.reward_se = std::sqrt(var / total);

    // 95% CI of the paired improvement: stratified bootstrap over classes
    const int n_boot = 1000;
    std::mt19937_64 boot_rng(seed ^ 0xb007b007ULL);
    std::uniform_int_distribution<int> pick(0, n_per_class - 1);
    std::vector<double> boot(n_boot);
    for (int b = 0; b < n_boot; ++b) {
        double acc = 0.0;
        for (int c = 0; c < n_classes; ++c) {
            for (int i = 0; i < n_per_class; ++i) {
                const auto& d = draws[c * n_per_class + pick(boot_rng)];
                acc += d.reward_net - d.reward_ref;
            }
        }
        boot[b] = acc / total;
    }
    std::sort(boot.begin(), boot.end());
    r.improvement_ci_lo = boot[static_cast<int>(0.025 * (n_boot - 1))];
    r.improvement_ci_hi = boot[static_cast<int>(0.975 * (n_boot - 1))];
    return r;
}

nlohmann::json report_to_json(const EvalReport& r) {
    return {
        {"method", r.method_name},
        {"n_samples", r.n_samples},
        {"mean_reward", r.mean_reward},
        {"reward_se", r.reward_se},
        {"ref_mean_reward", r.ref_mean_reward},
        {"improvement", r.improvement},
        {"improvement_ci", {r.improvement_ci_lo, r.improvement_ci_hi}},
        {"beat_ratio", r.beat_ratio},
        {"per_class_mean_reward", r.per_class_mean_reward},
    };
}

std::string report_to_text(const EvalReport& r) {
    std::ostringstream os;
    os.precision(4);
    os << std::fixed;
    os << "method        : " << r.method_name << '\n'
       << "samples       : " << r.n_samples << '\n'
       << "mean reward   : " << r.mean_reward << " +/- " << r.reward_se << " (se)\n"
       << "ref reward    : " << r.ref_mean_reward << '\n'
       << "improvement   : " << r.improvement << "  [95% CI " << r.improvement_ci_lo << ", "
       << r.improvement_ci_hi << "]\n"
       << "beat ratio    : " << r.beat_ratio << '\n';
    os << "per-class     :";
    for (double v : r.per_class_mean_reward) os << ' ' << v;
    os << '\n';
    return os.str();
}

std::vector<AblationCell> ablation_grid(const std::vector<TrainConfig>& configs,
                                        const PreferenceDataset& dataset,
                                        const NoisePredictor& reference, const Schedule& s,
                                        const ToyWorld& world, const SamplerConfig& sampler_cfg,
                                        int n_per_class, std::uint64_t eval_seed,
                                        int n_threads) {
    std::vector<AblationCell> out;
    out.reserve(configs.size());
    for (const auto& cfg : configs) {
        auto trained = train(cfg, dataset, reference, s);
        auto report = evaluate(trained.net, reference, world, s, sampler_cfg, n_per_class,
                               eval_seed, n_threads);
        std::ostringstream name;
        name << to_string(cfg.method.kind) << "/seed" << cfg.seed;
        auto range = cfg.step_range ? cfg.step_range : cfg.method.step_range;
        if (range) name << "/t" << range->first << ":" << range->second;
        report.method_name = name.str();
        out.push_back({cfg, std::move(report)});
    }
    return out;
}

void export_diagnostics(const CalibrationTable& table, const Schedule& s, const TrainLog& log,
                        const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto profile_path = out_dir + "/profile.csv";
    {
        std::ofstream out(profile_path);
        if (!out) throw std::runtime_error("cannot open " + profile_path + " for writing");
        out << "t,abs_correction,ddim_coefficient\n";
        out.precision(17);
        for (const auto& e : effective_weight_profile(s, table)) {
            out << e.t << ',' << e.abs_correction << ',' << e.ddim_coefficient << '\n';
        }
    }
    auto conv_path = out_dir + "/convergence.csv";
    {
        std::ofstream out(conv_path);
        if (!out) throw std::runtime_error("cannot open " + conv_path + " for writing");
        out << "iteration,mean_abs_dr\n";
        out.precision(17);
        for (const auto& r : log.records) out << r.step << ',' << r.mean_abs_dr << '\n';
    }
}

void write_samples_csv(const std::vector<LabeledSample>& samples, int dim,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "sample_id,class";
    for (int i = 1; i <= dim; ++i) out << ",x_" << i;
    out << '\n';
    out.precision(17);
    for (size_t i = 0; i < samples.size(); ++i) {
        out << i << ',' << samples[i].class_id;
        for (double v : samples[i].x0) out << ',' << v;
        out << '\n';
    }
}

}  // namespace dde
