#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "attnsim/attention.hpp"
#include "attnsim/bayesopt.hpp"
#include "attnsim/gaze.hpp"
#include "attnsim/judgment.hpp"
#include "attnsim/policy.hpp"
#include "attnsim/rng.hpp"

namespace attnsim {

struct ExperimentConfig {
    GazeDynamics dynamics;
    ScoreTable scores;
    AttentionConfig attention;
    LearningParams learning;
    JudgmentModel judgment;
    int emails_per_stage = 100;  // N_bo
    int repeats = 20;            // n_rp, population runs averaged per evaluation
    int total_stages = 60;       // L
    int initial_stages = 10;     // L0
    std::uint64_t master_seed = 1;
    HyperBox box;                // tuning box over [threshold, period in 60 Hz samples]
    SearchParams search;
    int mle_restarts = 8;

    void validate() const;
};

/// Attention configuration and scores after applying a hyperparameter vector:
/// size 0 keeps the config as-is; size 2 is [threshold, period in 60 Hz
/// samples]; size 2+2(I+2) is [period in samples, X, scores..., decays...].
struct ResolvedParams {
    AttentionConfig attention;
    ScoreTable scores;
};
ResolvedParams resolve_theta(const ExperimentConfig& config, const Eigen::VectorXd& theta);

/// The state cascaded across sessions of one population run.
struct LearnerState {
    QTable table;
    int attention_state = 0;  // starts inattentive
    long stage_count = 0;     // global generation-stage counter, drives epsilon
};

struct QCurveRow {
    long stage = 0;
    int x = 0;
    int a = 0;
    double q = 0.0;
};

struct SessionResult {
    LearnerState state;
    int stages = 0;               // completed generation stages K
    double inspection_time = 0.0; // T
    bool correct = false;
    SessionFeatures features;
    VsTrajectory trajectory;
    std::vector<QCurveRow> curve;  // full Q snapshot after each completed stage
};

/// One email session: Burr inspection time, per-stage epsilon-greedy aid
/// selection, AAL quantization and Q-update at every stage boundary, then a
/// judgment from the whole-session features.
SessionResult run_individual(const ExperimentConfig& config, LearnerState state,
                             const Eigen::VectorXd& theta, Rng& rng, SessionId session = {});

/// Same with the inspection time injected instead of drawn.
SessionResult run_individual_with_time(const ExperimentConfig& config, LearnerState state,
                                       const Eigen::VectorXd& theta, double inspection_time,
                                       Rng& rng, SessionId session = {});

struct PopulationResult {
    double accuracy = 0.0;
    LearnerState state;
    std::vector<JudgmentRecord> records;
    std::vector<QCurveRow> curve;
    double mean_aal = 0.0;   // mean of per-session mean AALs
    long total_stages = 0;   // sum of K over sessions
};

/// Cascades run_individual over N_bo sessions from a zero Q-table.
PopulationResult run_population(const ExperimentConfig& config, const Eigen::VectorXd& theta,
                                Rng& rng);

struct RunReport {
    TuneResult tuning;
    std::vector<double> sample_sd;  // per tuning stage, across the n_rp repeats
    std::uint64_t master_seed = 0;
};

/// Bayesian-optimization loop: each tuning stage evaluates theta as the mean
/// accuracy of n_rp independent population runs (seeds derived from the
/// master seed, reduced in index order, so concurrency cannot change results).
RunReport run_tuning(const ExperimentConfig& config, Rng& rng);

}  // namespace attnsim
