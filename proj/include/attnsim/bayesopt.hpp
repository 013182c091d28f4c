#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "attnsim/rng.hpp"

namespace attnsim {

struct HyperBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    int dims() const { return static_cast<int>(lower.size()); }
    void validate() const;
    bool contains(const Eigen::VectorXd& theta) const;
    Eigen::VectorXd clip(Eigen::VectorXd theta) const;
    Eigen::VectorXd sample(Rng& rng) const;
};

/// Squared-exponential kernel with constant prior mean:
/// k(t, t') = amplitude * exp(-sum_i inv_lengthscale_i * (t_i - t'_i)^2).
struct Kernel {
    double mean0 = 0.0;
    double amplitude = 1.0;
    Eigen::VectorXd inv_lengthscale;
    double jitter = 1e-10;
};

struct Observation {
    Eigen::VectorXd theta;
    double value = 0.0;
};

double kernel_eval(const Kernel& kernel, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

Eigen::MatrixXd gram_matrix(const Kernel& kernel, const std::vector<Observation>& obs);

/// Posterior over the observations, factorized once (Cholesky with jitter
/// escalation x10 up to 1e-6, then an error naming the conditioning problem).
class GpPosterior {
public:
    GpPosterior(Kernel kernel, std::vector<Observation> observations);

    /// (mean, sd) at theta; the variance is clamped at 0 from below.
    std::pair<double, double> predict(const Eigen::VectorXd& theta) const;

    double jitter_used() const { return jitter_used_; }
    const std::vector<Observation>& observations() const { return obs_; }

private:
    Kernel kernel_;
    std::vector<Observation> obs_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double jitter_used_ = 0.0;
};

/// One-shot convenience wrapper around GpPosterior.
std::pair<double, double> gp_posterior(const Kernel& kernel,
                                       const std::vector<Observation>& observations,
                                       const Eigen::VectorXd& theta);

double log_marginal_likelihood(const Kernel& kernel,
                               const std::vector<Observation>& observations);

struct MleBounds {
    double mean_lo = -1.0;
    double mean_hi = 2.0;
    double log_amplitude_lo = 0.0;
    double log_amplitude_hi = 0.0;
    double log_inv_lengthscale_lo = 0.0;
    double log_inv_lengthscale_hi = 0.0;

    static MleBounds from_observations(const std::vector<Observation>& observations);
};

struct KernelFit {
    Kernel kernel;
    double log_likelihood = 0.0;
    bool improved = false;  // false when no restart beat the heuristic init
};

/// Multi-start finite-difference ascent of the log marginal likelihood over
/// (mean0, log amplitude, log inverse lengthscales). `jitter` is the noise
/// floor baked into every candidate kernel.
KernelFit fit_kernel_mle(const std::vector<Observation>& observations, int restarts,
                         const MleBounds& bounds, Rng& rng, int max_iterations = 120,
                         double jitter = 1e-10);

/// Closed-form E[(N(mean, sd^2) - incumbent)^+]; exact max(mean-incumbent, 0)
/// when sd = 0.
double expected_improvement(double mean, double sd, double incumbent);

struct SearchParams {
    int multistart = 24;
    int ascent_steps = 60;
};

std::vector<Eigen::VectorXd> latin_hypercube(const HyperBox& box, int count, Rng& rng);

/// Maximizes EI by projected finite-difference ascent from Latin-hypercube
/// starts; falls back to a uniform draw when EI vanishes everywhere.
Eigen::VectorXd propose_next(const Kernel& kernel, const std::vector<Observation>& observations,
                             const HyperBox& box, const SearchParams& search, Rng& rng);

struct TuneRecord {
    int stage = 0;            // 1-based
    Eigen::VectorXd theta;
    double value = 0.0;       // NaN when the evaluation failed
    double incumbent = 0.0;   // best value observed up to this stage
    bool ok = false;
};

struct TuneParams {
    int total_stages = 60;     // L
    int initial_stages = 10;   // L0, uniform-random design
    SearchParams search;
    int mle_restarts = 8;
};

struct TuneResult {
    Eigen::VectorXd theta_star;
    double best_value = 0.0;
    std::vector<TuneRecord> history;
    Kernel kernel;
    std::vector<Observation> observations;
};

/// Algorithm: L0 uniform evaluations, one MLE kernel fit, then EI-driven
/// proposals for the remaining stages. A throwing evaluator marks the stage
/// failed and the loop continues.
TuneResult tune(const std::function<double(const Eigen::VectorXd&)>& evaluator,
                const HyperBox& box, const TuneParams& params, Rng& rng);

}  // namespace attnsim
