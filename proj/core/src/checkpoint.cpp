#include "dde/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dde {

nlohmann::json predictor_to_json(const NoisePredictor& net) {
    const auto& c = net.config();
    return {
        {"version", 1},
        {"dim", c.dim},
        {"n_classes", c.n_classes},
        {"hidden", c.hidden},
        {"time_feats", c.time_feats},
        {"n_steps", c.n_steps},
        {"params", net.params()},
    };
}

NoisePredictor predictor_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1) {
        throw std::runtime_error("predictor checkpoint: unsupported version");
    }
    PredictorConfig c;
    c.dim = j.at("dim").get<int>();
    c.n_classes = j.at("n_classes").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.time_feats = j.at("time_feats").get<int>();
    c.n_steps = j.at("n_steps").get<int>();
    NoisePredictor net(c);
    auto p = j.at("params").get<std::vector<double>>();
    if (p.size() != net.params().size()) {
        throw std::runtime_error("predictor checkpoint: parameter count mismatch");
    }
    net.params() = std::move(p);
    return net;
}

void save_predictor(const NoisePredictor& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << predictor_to_json(net).dump() << '\n';
}

NoisePredictor load_predictor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    nlohmann::json j;
    in >> j;
    return predictor_from_json(j);
}

nlohmann::json table_to_json(const CalibrationTable& table) {
    return {
        {"version", 1},
        {"T", table.num_steps()},
        {"ema_decay", table.ema_decay()},
        {"r_target_w", table.array(CalibRole::target_w)},
        {"r_target_l", table.array(CalibRole::target_l)},
        {"r_ref_w", table.array(CalibRole::ref_w)},
        {"r_ref_l", table.array(CalibRole::ref_l)},
        {"update_counts", table.update_counts()},
    };
}

CalibrationTable table_from_json(const nlohmann::json& j) {
    CalibrationTable table(j.at("T").get<int>(), j.at("ema_decay").get<double>());
    table.array(CalibRole::target_w) = j.at("r_target_w").get<std::vector<double>>();
    table.array(CalibRole::target_l) = j.at("r_target_l").get<std::vector<double>>();
    table.array(CalibRole::ref_w) = j.at("r_ref_w").get<std::vector<double>>();
    table.array(CalibRole::ref_l) = j.at("r_ref_l").get<std::vector<double>>();
    table.update_counts() = j.at("update_counts").get<std::vector<long>>();
    return table;
}

void save_train_checkpoint(const TrainCheckpoint& ck, const std::string& path) {
    nlohmann::json j = {
        {"version", 1},
        {"predictor", predictor_to_json(ck.net)},
        {"table", table_to_json(ck.table)},
        {"adam_m", ck.adam_m},
        {"adam_v", ck.adam_v},
        {"adam_t", ck.adam_t},
        {"train_step", ck.train_step},
    };
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump() << '\n';
}

TrainCheckpoint load_train_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    nlohmann::json j;
    in >> j;
    TrainCheckpoint ck{predictor_from_json(j.at("predictor")), table_from_json(j.at("table"))};
    ck.adam_m = j.at("adam_m").get<std::vector<double>>();
    ck.adam_v = j.at("adam_v").get<std::vector<double>>();
    ck.adam_t = j.at("adam_t").get<long>();
    ck.train_step = j.at("train_step").get<long>();
    return ck;
}

std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_doubles(const std::vector<double>& values) {
    std::uint64_t h = fnv1a(values.data(), values.size() * sizeof(double));
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path + " for checksum");
    std::uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a(buf, static_cast<size_t>(in.gcount()), h);
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace dde
