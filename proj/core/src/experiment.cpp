#include "dde/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dde/checkpoint.hpp"

namespace dde {

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::optional<std::pair<int, int>> range_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    auto v = j.at(key).get<std::vector<int>>();
    if (v.size() != 2) throw std::invalid_argument(std::string(key) + " must be [lo, hi]");
    return std::make_pair(v[0], v[1]);
}

}  // namespace

PredictorConfig ExperimentConfig::predictor_config() const {
    PredictorConfig pc;
    pc.dim = world.dim;
    pc.n_classes = world.n_classes;
    pc.hidden = hidden;
    pc.time_feats = time_feats;
    pc.n_steps = T;
    return pc;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    maybe(j, "seed", cfg.seed);
    maybe(j, "out_dir", cfg.out_dir);
    maybe(j, "n_threads", cfg.n_threads);
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        maybe(s, "T", cfg.T);
        maybe(s, "beta_start", cfg.beta_start);
        maybe(s, "beta_end", cfg.beta_end);
    }
    if (j.contains("world")) {
        const auto& w = j.at("world");
        maybe(w, "dim", cfg.world.dim);
        maybe(w, "n_classes", cfg.world.n_classes);
        maybe(w, "base_spread", cfg.world.base_spread);
        if (w.contains("class_means")) {
            cfg.world.class_means = w.at("class_means").get<std::vector<std::vector<double>>>();
        }
        validate_world(cfg.world);
    }
    if (j.contains("predictor")) {
        const auto& p = j.at("predictor");
        maybe(p, "hidden", cfg.hidden);
        maybe(p, "time_feats", cfg.time_feats);
    }
    if (j.contains("pretrain")) {
        const auto& p = j.at("pretrain");
        maybe(p, "epochs", cfg.pretrain.epochs);
        maybe(p, "n_samples", cfg.pretrain.n_samples);
        maybe(p, "n_val_samples", cfg.pretrain.n_val_samples);
        maybe(p, "batch_size", cfg.pretrain.batch_size);
        maybe(p, "lr", cfg.pretrain.lr);
    }
    if (j.contains("data")) maybe(j.at("data"), "n_pairs", cfg.n_pairs);
    if (j.contains("train")) {
        const auto& t = j.at("train");
        std::string method = to_string(cfg.train.method.kind);
        maybe(t, "method", method);
        cfg.train.method.kind = method_from_string(method);
        maybe(t, "discount", cfg.train.method.discount);
        maybe(t, "beta_dpo", cfg.train.beta_dpo);
        maybe(t, "ema_decay", cfg.train.ema_decay);
        maybe(t, "learning_rate", cfg.train.learning_rate);
        maybe(t, "max_steps", cfg.train.max_steps);
        maybe(t, "batch_size", cfg.train.batch_size);
        maybe(t, "warmup_steps", cfg.train.warmup_steps);
        maybe(t, "adam_beta1", cfg.train.adam_beta1);
        maybe(t, "adam_beta2", cfg.train.adam_beta2);
        maybe(t, "adam_eps", cfg.train.adam_eps);
        cfg.train.step_range = range_from_json(t, "step_range");
    }
    if (j.contains("sampler")) {
        const auto& s = j.at("sampler");
        std::string kind = cfg.sampler.kind == SamplerKind::Ddim ? "ddim" : "ancestral";
        maybe(s, "kind", kind);
        if (kind == "ddim") cfg.sampler.kind = SamplerKind::Ddim;
        else if (kind == "ancestral") cfg.sampler.kind = SamplerKind::Ancestral;
        else throw std::invalid_argument("sampler.kind must be 'ddim' or 'ancestral'");
        maybe(s, "n_steps", cfg.sampler.n_steps);
        maybe(s, "deterministic", cfg.sampler.deterministic);
        maybe(s, "x0_clip", cfg.sampler.x0_clip);
    }
    if (j.contains("eval")) maybe(j.at("eval"), "n_per_class", cfg.eval_n_per_class);
    if (j.contains("ablate")) {
        const auto& a = j.at("ablate");
        maybe(a, "methods", cfg.ablate_methods);
        maybe(a, "seeds", cfg.ablate_seeds);
        if (a.contains("step_ranges")) {
            cfg.ablate_step_ranges.clear();
            for (const auto& r : a.at("step_ranges")) {
                auto v = r.get<std::vector<int>>();
                if (v.size() != 2) throw std::invalid_argument("ablate.step_ranges entries must be [lo, hi]");
                cfg.ablate_step_ranges.emplace_back(v[0], v[1]);
            }
        }
    }
    cfg.train.seed = cfg.seed;
    maybe(j, "train_seed", cfg.train.seed);
    cfg.sampler.seed = cfg.seed;
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json t = {
        {"method", to_string(cfg.train.method.kind)},
        {"discount", cfg.train.method.discount},
        {"beta_dpo", cfg.train.beta_dpo},
        {"ema_decay", cfg.train.ema_decay},
        {"learning_rate", cfg.train.learning_rate},
        {"max_steps", cfg.train.max_steps},
        {"batch_size", cfg.train.batch_size},
        {"warmup_steps", cfg.train.warmup_steps},
        {"adam_beta1", cfg.train.adam_beta1},
        {"adam_beta2", cfg.train.adam_beta2},
        {"adam_eps", cfg.train.adam_eps},
    };
    if (cfg.train.step_range) {
        t["step_range"] = {cfg.train.step_range->first, cfg.train.step_range->second};
    } else {
        t["step_range"] = nullptr;
    }
    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& r : cfg.ablate_step_ranges) ranges.push_back({r.first, r.second});
    return {
        {"seed", cfg.seed},
        {"out_dir", cfg.out_dir},
        {"n_threads", cfg.n_threads},
        {"train_seed", cfg.train.seed},
        {"schedule", {{"T", cfg.T}, {"beta_start", cfg.beta_start}, {"beta_end", cfg.beta_end}}},
        {"world",
         {{"dim", cfg.world.dim},
          {"n_classes", cfg.world.n_classes},
          {"class_means", cfg.world.class_means},
          {"base_spread", cfg.world.base_spread}}},
        {"predictor", {{"hidden", cfg.hidden}, {"time_feats", cfg.time_feats}}},
        {"pretrain",
         {{"epochs", cfg.pretrain.epochs},
          {"n_samples", cfg.pretrain.n_samples},
          {"n_val_samples", cfg.pretrain.n_val_samples},
          {"batch_size", cfg.pretrain.batch_size},
          {"lr", cfg.pretrain.lr}}},
        {"data", {{"n_pairs", cfg.n_pairs}}},
        {"train", t},
        {"sampler",
         {{"kind", cfg.sampler.kind == SamplerKind::Ddim ? "ddim" : "ancestral"},
          {"n_steps", cfg.sampler.n_steps},
          {"deterministic", cfg.sampler.deterministic},
          {"x0_clip", cfg.sampler.x0_clip}}},
        {"eval", {{"n_per_class", cfg.eval_n_per_class}}},
        {"ablate",
         {{"methods", cfg.ablate_methods},
          {"step_ranges", ranges},
          {"seeds", cfg.ablate_seeds}}},
    };
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg = config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config field error in " + path + ": " + e.what());
    }
    if (const char* root = std::getenv("DDE_OUT_DIR")) {
        cfg.out_dir = std::string(root) + "/" +
                      std::filesystem::path(cfg.out_dir).filename().string();
    }
    return cfg;
}

void write_effective_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << config_to_json(cfg).dump(2) << '\n';
}

std::string run_pretrain(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    auto s = cfg.make_schedule();
    NoisePredictor net(cfg.predictor_config());
    net.init_random(cfg.seed);
    auto res = pretrain_reference(cfg.world, s, std::move(net), cfg.pretrain, cfg.seed);
    auto path = cfg.reference_path();
    save_predictor(res.net, path);
    write_effective_config(cfg, cfg.out_dir + "/pretrain_config.json");
    nlohmann::json manifest = {
        {"schedule_T", cfg.T},
        {"seed", cfg.seed},
        {"final_val_mse", res.final_val_mse},
        {"epoch_val_mse", res.epoch_val_mse},
        {"checkpoint", path},
        {"checksum", file_checksum(path)},
    };
    std::ofstream mf(cfg.out_dir + "/pretrain_manifest.json");
    mf << manifest.dump(2) << '\n';
    return path;
}

std::string run_gen_data(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    auto ref_path = cfg.reference_path();
    if (!std::filesystem::exists(ref_path)) {
        throw std::runtime_error("missing reference checkpoint: " + ref_path +
                                 " (run pretrain first)");
    }
    auto s = cfg.make_schedule();
    auto reference = load_predictor(ref_path);
    auto checksum = file_checksum(ref_path);
    // pair construction samples stochastically so the two draws differ
    SamplerConfig gen_cfg = cfg.sampler;
    auto ds = build_preference_pairs(cfg.world, reference, s, cfg.n_pairs, gen_cfg, cfg.seed,
                                     checksum);
    auto path = cfg.dataset_path();
    save_dataset(ds, path);
    write_effective_config(cfg, cfg.out_dir + "/gen_data_config.json");
    double rw = 0.0, rl = 0.0;
    for (const auto& p : ds.pairs) {
        rw += p.reward_w;
        rl += p.reward_l;
    }
    nlohmann::json summary = {
        {"n_pairs", ds.pairs.size()},
        {"ties_dropped", ds.ties_dropped},
        {"mean_reward_w", rw / ds.pairs.size()},
        {"mean_reward_l", rl / ds.pairs.size()},
        {"dataset", path},
    };
    std::ofstream sf(cfg.out_dir + "/gen_data_summary.json");
    sf << summary.dump(2) << '\n';
    return path;
}

TrainArtifacts run_train(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    if (!std::filesystem::exists(cfg.reference_path())) {
        throw std::runtime_error("missing reference checkpoint: " + cfg.reference_path());
    }
    if (!std::filesystem::exists(cfg.dataset_path())) {
        throw std::runtime_error("missing dataset: " + cfg.dataset_path());
    }
    auto s = cfg.make_schedule();
    auto reference = load_predictor(cfg.reference_path());
    auto dataset = load_dataset(cfg.dataset_path());
    auto result = train(cfg.train, dataset, reference, s);

    std::string method = to_string(cfg.train.method.kind);
    TrainArtifacts a;
    a.checkpoint_path = cfg.checkpoint_path(method);
    a.calibration_csv_path = cfg.out_dir + "/calibration_" + method + ".csv";
    a.trainlog_path = cfg.out_dir + "/trainlog_" + method + ".csv";
    TrainCheckpoint ck{result.net.clone_as_reference(), result.table};
    ck.train_step = cfg.train.max_steps;
    save_train_checkpoint(ck, a.checkpoint_path);
    write_calibration_csv(result.table, a.calibration_csv_path);
    result.log.save_csv(a.trainlog_path);
    export_diagnostics(result.table, s, result.log, cfg.out_dir + "/diagnostics_" + method);
    write_effective_config(cfg, cfg.out_dir + "/train_config_" + method + ".json");
    return a;
}

EvalArtifacts run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                       const std::string& baseline_path) {
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& p : {checkpoint_path, baseline_path}) {
        if (!std::filesystem::exists(p)) throw std::runtime_error("missing checkpoint: " + p);
    }
    auto s = cfg.make_schedule();
    auto load_any = [](const std::string& path) {
        std::ifstream in(path);
        nlohmann::json j;
        in >> j;
        if (j.contains("predictor")) return predictor_from_json(j.at("predictor"));
        return predictor_from_json(j);
    };
    auto net = load_any(checkpoint_path);
    auto baseline = load_any(baseline_path);
    auto report = evaluate(net, baseline, cfg.world, s, cfg.sampler, cfg.eval_n_per_class,
                           cfg.seed, cfg.n_threads);
    report.method_name = std::filesystem::path(checkpoint_path).stem().string();

    EvalArtifacts out;
    out.report = report;
    out.report_json_path = cfg.out_dir + "/report.json";
    out.report_text_path = cfg.out_dir + "/report.txt";
    std::ofstream jf(out.report_json_path);
    jf << report_to_json(report).dump(2) << '\n';
    std::ofstream tf(out.report_text_path);
    tf << report_to_text(report);
    write_effective_config(cfg, cfg.out_dir + "/eval_config.json");
    return out;
}

std::string run_ablate(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    auto s = cfg.make_schedule();
    auto reference = load_predictor(cfg.reference_path());
    auto dataset = load_dataset(cfg.dataset_path());

    std::vector<TrainConfig> grid;
    for (const auto& name : cfg.ablate_methods) {
        for (auto seed : cfg.ablate_seeds) {
            TrainConfig tc = cfg.train;
            tc.method.kind = method_from_string(name);
            tc.seed = seed;
            tc.step_range = std::nullopt;
            grid.push_back(tc);
            for (const auto& r : cfg.ablate_step_ranges) {
                TrainConfig rc = tc;
                rc.step_range = r;
                grid.push_back(rc);
            }
        }
    }
    auto cells = ablation_grid(grid, dataset, reference, s, cfg.world, cfg.sampler,
                               cfg.eval_n_per_class, cfg.seed, cfg.n_threads);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& cell : cells) rows.push_back(report_to_json(cell.report));
    auto path = cfg.out_dir + "/ablation.json";
    std::ofstream out(path);
    out << rows.dump(2) << '\n';
    std::ofstream txt(cfg.out_dir + "/ablation.txt");
    for (const auto& cell : cells) txt << report_to_text(cell.report) << '\n';
    write_effective_config(cfg, cfg.out_dir + "/ablate_config.json");
    return path;
}

}  // namespace dde
