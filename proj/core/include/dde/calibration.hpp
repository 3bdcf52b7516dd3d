#pragma once

#include <string>
#include <vector>

#include "dde/schedule.hpp"

namespace dde {

/// Which of the four EMA-tracked coefficient arrays an observation feeds.
enum class CalibRole { target_w, target_l, ref_w, ref_l };

const char* to_string(CalibRole role);

/// Four length-T arrays of EMA-tracked log-ratio coefficients, indexed by
/// k in 0..T-1. All entries start at zero.
class CalibrationTable {
public:
    CalibrationTable(int steps, double ema_decay);

    int num_steps() const { return T_; }
    double ema_decay() const { return decay_; }

    void ema_update(CalibRole role, int k, double observation);

    /// Sum over k in {t..T-1} of (r_target_w - r_ref_w - r_target_l + r_ref_l);
    /// empty (zero) at t == T.
    double correction_term(int t) const;

    double value(CalibRole role, int k) const;
    long update_count(int k) const { check_index(k); return update_counts_[k]; }

    const std::vector<double>& array(CalibRole role) const;
    std::vector<double>& array(CalibRole role);
    const std::vector<long>& update_counts() const { return update_counts_; }
    std::vector<long>& update_counts() { return update_counts_; }

private:
    void check_index(int k) const;

    int T_;
    double decay_;
    std::vector<double> r_target_w_, r_target_l_, r_ref_w_, r_ref_l_;
    std::vector<long> update_counts_;
};

/// Expected log-ratio log p_model(x_{t-1}|x_t) / q(x_{t-1}|x_t, x0) under
/// x_{t-1} ~ q, for equal-variance isotropic Gaussians:
/// -||mu_model - mu_q||^2 / (2 sigma_t^2). Requires t >= 2 (sigma_1 = 0).
double calibration_observation(const Schedule& s, const GaussianParams& posterior,
                               const GaussianParams& model_mean, int t);

struct WeightProfileEntry {
    int t;
    double abs_correction;      // |correction_term(table, t)|
    double ddim_coefficient;    // sqrt(1 - abar_t) / sqrt(abar_t)
};

/// Per-step diagnostics behind the loss-saturation behavior at the two ends
/// of the trajectory.
std::vector<WeightProfileEntry> effective_weight_profile(const Schedule& s,
                                                         const CalibrationTable& table);

/// CSV with columns k, r_target_w, r_target_l, r_ref_w, r_ref_l, update_count.
void write_calibration_csv(const CalibrationTable& table, const std::string& path);

}  // namespace dde
