#pragma once

#include <vector>

namespace dde {

/// Isotropic Gaussian with a shared scalar variance across all coordinates.
struct GaussianParams {
    std::vector<double> mean;
    double var = 0.0;
};

/// Precomputed diffusion constants for a T-step linear-beta schedule.
/// Arrays are indexed by step t in 1..T via the accessors below; the
/// convention alpha_bar(0) == 1 is built in.
class Schedule {
public:
    Schedule(int steps, double beta_start, double beta_end);

    int num_steps() const { return T_; }

    double beta(int t) const { check_step(t); return betas_[t - 1]; }
    double alpha(int t) const { check_step(t); return alphas_[t - 1]; }
    double alpha_bar(int t) const;
    double posterior_var(int t) const { check_step(t); return posterior_vars_[t - 1]; }

    /// Single-shot amplification coefficient sqrt(1 - abar_t) / sqrt(abar_t);
    /// strictly increasing in t.
    double amplification(int t) const;

    double beta_start() const { return beta_start_; }
    double beta_end() const { return beta_end_; }

private:
    void check_step(int t) const;

    int T_;
    double beta_start_;
    double beta_end_;
    std::vector<double> betas_;
    std::vector<double> alphas_;
    std::vector<double> alpha_bars_;
    std::vector<double> posterior_vars_;
};

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
std::vector<double> forward_marginal(const Schedule& s, const std::vector<double>& x0,
                                     int t, const std::vector<double>& eps);

/// Mean and variance of q(x_{t-1} | x_t, x0).
GaussianParams posterior_params(const Schedule& s, const std::vector<double>& x_t,
                                const std::vector<double>& x0, int t);

/// DDIM transition mean from step t to t_prime < t. The radicand
/// 1 - abar_{t'} - sigma_t^2 is clamped at zero.
GaussianParams ddim_mean(const Schedule& s, const std::vector<double>& x_t,
                         const std::vector<double>& eps_pred, int t, int t_prime);

/// DDIM jump straight to step 0: (x_t - sqrt(1 - abar_t) eps) / sqrt(abar_t).
std::vector<double> single_shot_mean(const Schedule& s, const std::vector<double>& x_t,
                                     const std::vector<double>& eps_pred, int t);

/// Log density of an isotropic normal; requires p.var > 0.
double gaussian_log_density(const std::vector<double>& x, const GaussianParams& p);

}  // namespace dde
