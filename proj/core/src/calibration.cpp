#include "dde/calibration.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace dde {

const char* to_string(CalibRole role) {
    switch (role) {
        case CalibRole::target_w: return "target_w";
        case CalibRole::target_l: return "target_l";
        case CalibRole::ref_w: return "ref_w";
        case CalibRole::ref_l: return "ref_l";
    }
    return "?";
}

CalibrationTable::CalibrationTable(int steps, double ema_decay) : T_(steps), decay_(ema_decay) {
    if (steps < 1) throw std::invalid_argument("CalibrationTable: T must be >= 1");
    if (!(ema_decay > 0.0 && ema_decay <= 1.0)) {
        throw std::invalid_argument("CalibrationTable: ema_decay must be in (0, 1]");
    }
    r_target_w_.assign(T_, 0.0);
    r_target_l_.assign(T_, 0.0);
    r_ref_w_.assign(T_, 0.0);
    r_ref_l_.assign(T_, 0.0);
    update_counts_.assign(T_, 0);
}

void CalibrationTable::check_index(int k) const {
    if (k < 0 || k >= T_) {
        throw std::out_of_range("CalibrationTable: index " + std::to_string(k) + " outside 0.." +
                                std::to_string(T_ - 1));
    }
}

const std::vector<double>& CalibrationTable::array(CalibRole role) const {
    switch (role) {
        case CalibRole::target_w: return r_target_w_;
        case CalibRole::target_l: return r_target_l_;
        case CalibRole::ref_w: return r_ref_w_;
        case CalibRole::ref_l: return r_ref_l_;
    }
    throw std::invalid_argument("CalibrationTable: bad role");
}

std::vector<double>& CalibrationTable::array(CalibRole role) {
    return const_cast<std::vector<double>&>(
        static_cast<const CalibrationTable*>(this)->array(role));
}

void CalibrationTable::ema_update(CalibRole role, int k, double observation) {
    check_index(k);
    auto& arr = array(role);
    arr[k] = (1.0 - decay_) * arr[k] + decay_ * observation;
    ++update_counts_[k];
}

double CalibrationTable::value(CalibRole role, int k) const {
    check_index(k);
    return array(role)[k];
}

double CalibrationTable::correction_term(int t) const {
    if (t < 1 || t > T_) {
        throw std::out_of_range("correction_term: step outside 1..T");
    }
    double sum = 0.0;
    for (int k = t; k <= T_ - 1; ++k) {
        sum += r_target_w_[k] - r_ref_w_[k] - r_target_l_[k] + r_ref_l_[k];
    }
    return sum;
}

double calibration_observation(const Schedule& s, const GaussianParams& posterior,
                               const GaussianParams& model_mean, int t) {
    if (t < 2) {
        throw std::invalid_argument("calibration_observation: t must be >= 2 (sigma_1 = 0)");
    }
    double var = s.posterior_var(t);
    if (posterior.mean.size() != model_mean.mean.size()) {
        throw std::invalid_argument("calibration_observation: dimension mismatch");
    }
    double sq = 0.0;
    for (size_t i = 0; i < posterior.mean.size(); ++i) {
        double diff = model_mean.mean[i] - posterior.mean[i];
        sq += diff * diff;
    }
    return -sq / (2.0 * var);
}

std::vector<WeightProfileEntry> effective_weight_profile(const Schedule& s,
                                                         const CalibrationTable& table) {
    std::vector<WeightProfileEntry> out;
    out.reserve(s.num_steps());
    for (int t = 1; t <= s.num_steps(); ++t) {
        out.push_back({t, std::fabs(table.correction_term(t)), s.amplification(t)});
    }
    return out;
}

void write_calibration_csv(const CalibrationTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "k,r_target_w,r_target_l,r_ref_w,r_ref_l,update_count\n";
    out.precision(17);
    for (int k = 0; k < table.num_steps(); ++k) {
        out << k << ',' << table.value(CalibRole::target_w, k) << ','
            << table.value(CalibRole::target_l, k) << ',' << table.value(CalibRole::ref_w, k)
            << ',' << table.value(CalibRole::ref_l, k) << ',' << table.update_count(k) << '\n';
    }
}

}  // namespace dde
