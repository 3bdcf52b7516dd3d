#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "dde/calibration.hpp"
#include "dde/optimizer.hpp"
#include "dde/predictor.hpp"

namespace dde {

nlohmann::json predictor_to_json(const NoisePredictor& net);
NoisePredictor predictor_from_json(const nlohmann::json& j);

void save_predictor(const NoisePredictor& net, const std::string& path);
NoisePredictor load_predictor(const std::string& path);

nlohmann::json table_to_json(const CalibrationTable& table);
CalibrationTable table_from_json(const nlohmann::json& j);

/// Full resumable training state: predictor, calibration table, optimizer
/// moments, and the step counter.
struct TrainCheckpoint {
    NoisePredictor net;
    CalibrationTable table;
    std::vector<double> adam_m, adam_v;
    long adam_t = 0;
    long train_step = 0;
};

void save_train_checkpoint(const TrainCheckpoint& ck, const std::string& path);
TrainCheckpoint load_train_checkpoint(const std::string& path);

/// FNV-1a over raw bytes, as a fixed-width hex string.
std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t seed = 14695981039346656037ULL);
std::string hash_doubles(const std::vector<double>& values);
std::string file_checksum(const std::string& path);

}  // namespace dde
