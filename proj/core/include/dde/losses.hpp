#pragma once

#include <optional>
#include <string>
#include <utility>

#include "dde/calibration.hpp"
#include "dde/dataset.hpp"
#include "dde/predictor.hpp"
#include "dde/schedule.hpp"

namespace dde {

enum class Method { Sft, Uniform, Discounted, Dde, DdeStep, DdeSingle };

Method method_from_string(const std::string& name);
const char* to_string(Method m);
std::string valid_method_names();

struct MethodSpec {
    Method kind = Method::Dde;
    double discount = 0.995;                         // Discounted only
    std::optional<std::pair<int, int>> step_range;   // restricts sampled t
};

/// The components of one preference-loss evaluation. For DDE-family losses
/// the MSE terms are x0-space single-shot distances; for per-step losses
/// they are posterior-mean distances at step t.
struct LossBreakdown {
    double mse_target_w = 0.0;
    double mse_ref_w = 0.0;
    double mse_target_l = 0.0;
    double mse_ref_l = 0.0;
    double correction = 0.0;
    double logit = 0.0;
    double loss = 0.0;
};

/// Calibration observations produced from the same forward passes as the
/// loss; valid is false at t == 1 (zero posterior variance) and for SFT.
struct PairObservations {
    bool valid = false;
    int k = -1;  // table index t - 1
    double target_w = 0.0;
    double target_l = 0.0;
    double ref_w = 0.0;
    double ref_l = 0.0;
};

struct LossResult {
    LossBreakdown breakdown;
    ParamGradient grad;  // w.r.t. target parameters
    PairObservations obs;
};

LossResult dde_loss(const Schedule& s, const NoisePredictor& target,
                    const NoisePredictor& reference, const PreferencePair& pair, int t,
                    const std::vector<double>& noise_w, const std::vector<double>& noise_l,
                    const CalibrationTable& table, double beta_dpo);

LossResult dde_single_loss(const Schedule& s, const NoisePredictor& target,
                           const NoisePredictor& reference, const PreferencePair& pair, int t,
                           const std::vector<double>& noise_w,
                           const std::vector<double>& noise_l, double beta_dpo);

LossResult dde_step_loss(const Schedule& s, const NoisePredictor& target,
                         const NoisePredictor& reference, const PreferencePair& pair, int t,
                         const std::vector<double>& noise_w, const std::vector<double>& noise_l,
                         const CalibrationTable& table, double beta_dpo);

LossResult uniform_dpo_loss(const Schedule& s, const NoisePredictor& target,
                            const NoisePredictor& reference, const PreferencePair& pair, int t,
                            const std::vector<double>& noise_w,
                            const std::vector<double>& noise_l, double beta_dpo);

LossResult discounted_dpo_loss(const Schedule& s, const NoisePredictor& target,
                               const NoisePredictor& reference, const PreferencePair& pair,
                               int t, const std::vector<double>& noise_w,
                               const std::vector<double>& noise_l, double beta_dpo,
                               double discount);

LossResult sft_loss(const Schedule& s, const NoisePredictor& target, const PreferencePair& pair,
                    int t, const std::vector<double>& noise_w);

/// Dispatch on MethodSpec.
LossResult compute_loss(const MethodSpec& spec, const Schedule& s, const NoisePredictor& target,
                        const NoisePredictor& reference, const PreferencePair& pair, int t,
                        const std::vector<double>& noise_w, const std::vector<double>& noise_l,
                        const CalibrationTable& table, double beta_dpo);

/// -log sigmoid(z), computed stably.
double neg_log_sigmoid(double z);

}  // namespace dde
