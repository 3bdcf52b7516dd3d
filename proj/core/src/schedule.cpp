#include "dde/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dde {

Schedule::Schedule(int steps, double beta_start, double beta_end)
    : T_(steps), beta_start_(beta_start), beta_end_(beta_end) {
    if (steps < 1) {
        throw std::invalid_argument("Schedule: T must be >= 1, got " + std::to_string(steps));
    }
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw std::invalid_argument("Schedule: need 0 < beta_start <= beta_end < 1");
    }

    betas_.resize(T_);
    alphas_.resize(T_);
    alpha_bars_.resize(T_);
    posterior_vars_.resize(T_);

    double abar = 1.0;
    for (int i = 0; i < T_; ++i) {
        double frac = (T_ == 1) ? 0.0 : static_cast<double>(i) / (T_ - 1);
        betas_[i] = beta_start + frac * (beta_end - beta_start);
        alphas_[i] = 1.0 - betas_[i];
        double abar_prev = abar;
        abar *= alphas_[i];
        alpha_bars_[i] = abar;
        posterior_vars_[i] = (1.0 - abar_prev) / (1.0 - abar) * betas_[i];
    }
}

void Schedule::check_step(int t) const {
    if (t < 1 || t > T_) {
        throw std::out_of_range("Schedule: step " + std::to_string(t) + " outside 1.." +
                                std::to_string(T_));
    }
}

double Schedule::alpha_bar(int t) const {
    if (t == 0) return 1.0;
    check_step(t);
    return alpha_bars_[t - 1];
}

double Schedule::amplification(int t) const {
    double ab = alpha_bar(t);
    return std::sqrt(1.0 - ab) / std::sqrt(ab);
}

namespace {

void check_dims(const std::vector<double>& a, const std::vector<double>& b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

}  // namespace

std::vector<double> forward_marginal(const Schedule& s, const std::vector<double>& x0,
                                     int t, const std::vector<double>& eps) {
    check_dims(x0, eps, "forward_marginal");
    double ab = s.alpha_bar(t);
    double a = std::sqrt(ab);
    double b = std::sqrt(1.0 - ab);
    std::vector<double> out(x0.size());
    for (size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + b * eps[i];
    return out;
}

GaussianParams posterior_params(const Schedule& s, const std::vector<double>& x_t,
                                const std::vector<double>& x0, int t) {
    check_dims(x_t, x0, "posterior_params");
    double ab_t = s.alpha_bar(t);
    double ab_prev = s.alpha_bar(t - 1);
    double coef_x0 = std::sqrt(ab_prev) * s.beta(t) / (1.0 - ab_t);
    double coef_xt = std::sqrt(s.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab_t);
    GaussianParams p;
    p.mean.resize(x0.size());
    for (size_t i = 0; i < x0.size(); ++i) p.mean[i] = coef_x0 * x0[i] + coef_xt * x_t[i];
    p.var = s.posterior_var(t);
    return p;
}

GaussianParams ddim_mean(const Schedule& s, const std::vector<double>& x_t,
                         const std::vector<double>& eps_pred, int t, int t_prime) {
    check_dims(x_t, eps_pred, "ddim_mean");
    if (t_prime < 0 || t_prime >= t) {
        throw std::invalid_argument("ddim_mean: need 0 <= t_prime < t");
    }
    double ab_t = s.alpha_bar(t);
    double ab_tp = s.alpha_bar(t_prime);
    double var = s.posterior_var(t);
    double coef_eps = std::sqrt(std::max(0.0, 1.0 - ab_tp - var));
    double inv_sqrt_ab = 1.0 / std::sqrt(ab_t);
    double sqrt_one_minus_ab = std::sqrt(1.0 - ab_t);
    double sqrt_ab_tp = std::sqrt(ab_tp);
    GaussianParams p;
    p.mean.resize(x_t.size());
    for (size_t i = 0; i < x_t.size(); ++i) {
        double x0_hat = (x_t[i] - sqrt_one_minus_ab * eps_pred[i]) * inv_sqrt_ab;
        p.mean[i] = sqrt_ab_tp * x0_hat + coef_eps * eps_pred[i];
    }
    p.var = var;
    return p;
}

std::vector<double> single_shot_mean(const Schedule& s, const std::vector<double>& x_t,
                                     const std::vector<double>& eps_pred, int t) {
    return ddim_mean(s, x_t, eps_pred, t, 0).mean;
}

double gaussian_log_density(const std::vector<double>& x, const GaussianParams& p) {
    if (p.var <= 0.0) {
        throw std::invalid_argument("gaussian_log_density: variance must be positive");
    }
    check_dims(x, p.mean, "gaussian_log_density");
    double d = static_cast<double>(x.size());
    double sq = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double diff = x[i] - p.mean[i];
        sq += diff * diff;
    }
    return -0.5 * d * std::log(2.0 * M_PI * p.var) - sq / (2.0 * p.var);
}

}  // namespace dde
