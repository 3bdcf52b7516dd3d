#include "dde/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dde {

ToyWorld default_toy_world() {
    ToyWorld w;
    w.dim = 2;
    w.n_classes = 4;
    w.class_means = {{2.0, 2.0}, {-2.0, 2.0}, {-2.0, -2.0}, {2.0, -2.0}};
    w.base_spread = 0.6;
    return w;
}

void validate_world(const ToyWorld& world) {
    if (world.dim < 1 || world.n_classes < 1 || world.base_spread <= 0.0) {
        throw std::invalid_argument("ToyWorld: bad dimensions or spread");
    }
    if (static_cast<int>(world.class_means.size()) != world.n_classes) {
        throw std::invalid_argument("ToyWorld: class_means size != n_classes");
    }
    for (const auto& m : world.class_means) {
        if (static_cast<int>(m.size()) != world.dim) {
            throw std::invalid_argument("ToyWorld: class mean dimension mismatch");
        }
    }
    for (int a = 0; a < world.n_classes; ++a) {
        for (int b = a + 1; b < world.n_classes; ++b) {
            if (world.class_means[a] == world.class_means[b]) {
                throw std::invalid_argument("ToyWorld: class means must be pairwise distinct");
            }
        }
    }
}

double reward(const ToyWorld& world, const std::vector<double>& x, int c) {
    if (c < 0 || c >= world.n_classes) {
        throw std::out_of_range("reward: class out of range");
    }
    const auto& mean = world.class_means[c];
    if (x.size() != mean.size()) throw std::invalid_argument("reward: dimension mismatch");
    double sq = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - mean[i];
        sq += d * d;
    }
    return -sq;
}

std::vector<LabeledSample> generate_pretrain_data(const ToyWorld& world, int n,
                                                  std::mt19937_64& rng) {
    if (n < 1) throw std::invalid_argument("generate_pretrain_data: n must be >= 1");
    validate_world(world);
    std::uniform_int_distribution<int> pick_class(0, world.n_classes - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<LabeledSample> out(n);
    for (auto& sample : out) {
        sample.class_id = pick_class(rng);
        sample.x0.resize(world.dim);
        const auto& mean = world.class_means[sample.class_id];
        for (int i = 0; i < world.dim; ++i) {
            sample.x0[i] = mean[i] + world.base_spread * normal(rng);
        }
    }
    return out;
}

PreferenceDataset build_preference_pairs(const ToyWorld& world, const NoisePredictor& reference,
                                         const Schedule& s, int n_pairs,
                                         const SamplerConfig& sampler_cfg, std::uint64_t seed,
                                         const std::string& reference_checksum) {
    if (n_pairs < 1) throw std::invalid_argument("build_preference_pairs: n_pairs must be >= 1");
    validate_world(world);
    PreferenceDataset ds;
    ds.dim = world.dim;
    ds.n_classes = world.n_classes;
    ds.seed = seed;
    ds.reference_checksum = reference_checksum;
    ds.pairs.reserve(n_pairs);

    for (int i = 0; i < n_pairs; ++i) {
        // per-pair generator so pairs are a pure function of (seed, index)
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
        std::uniform_int_distribution<int> pick_class(0, world.n_classes - 1);
        int c = pick_class(rng);
        auto a = sample(reference, s, c, sampler_cfg, rng);
        auto b = sample(reference, s, c, sampler_cfg, rng);
        double ra = reward(world, a, c);
        double rb = reward(world, b, c);
        if (ra == rb) {
            ++ds.ties_dropped;
            continue;
        }
        PreferencePair pair;
        pair.class_id = c;
        if (ra > rb) {
            pair.x0_w = std::move(a);
            pair.x0_l = std::move(b);
            pair.reward_w = ra;
            pair.reward_l = rb;
        } else {
            pair.x0_w = std::move(b);
            pair.x0_l = std::move(a);
            pair.reward_w = rb;
            pair.reward_l = ra;
        }
        ds.pairs.push_back(std::move(pair));
    }
    if (2 * ds.ties_dropped > n_pairs) {
        throw std::runtime_error("build_preference_pairs: reference is degenerate (>50% ties)");
    }
    return ds;
}

void save_dataset(const PreferenceDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    nlohmann::json header = {
        {"version", 1},
        {"d", ds.dim},
        {"n_classes", ds.n_classes},
        {"seed", ds.seed},
        {"reference_checksum", ds.reference_checksum},
        {"ties_dropped", ds.ties_dropped},
    };
    out << header.dump() << '\n';
    for (const auto& p : ds.pairs) {
        nlohmann::json rec = {
            {"class", p.class_id}, {"x0_w", p.x0_w},         {"x0_l", p.x0_l},
            {"reward_w", p.reward_w}, {"reward_l", p.reward_l},
        };
        out << rec.dump() << '\n';
    }
}

PreferenceDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
    auto header = nlohmann::json::parse(line);
    PreferenceDataset ds;
    ds.dim = header.at("d").get<int>();
    ds.n_classes = header.at("n_classes").get<int>();
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.reference_checksum = header.at("reference_checksum").get<std::string>();
    ds.ties_dropped = header.at("ties_dropped").get<int>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto rec = nlohmann::json::parse(line);
        PreferencePair p;
        p.class_id = rec.at("class").get<int>();
        p.x0_w = rec.at("x0_w").get<std::vector<double>>();
        p.x0_l = rec.at("x0_l").get<std::vector<double>>();
        p.reward_w = rec.at("reward_w").get<double>();
        p.reward_l = rec.at("reward_l").get<double>();
        if (!(p.reward_w > p.reward_l)) {
            throw std::runtime_error("dataset record violates reward_w > reward_l");
        }
        ds.pairs.push_back(std::move(p));
    }
    if (ds.pairs.empty()) throw std::runtime_error("dataset has no pairs: " + path);
    return ds;
}

}  // namespace dde
