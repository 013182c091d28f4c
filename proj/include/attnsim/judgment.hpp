#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "attnsim/attention.hpp"
#include "attnsim/gaze.hpp"
#include "attnsim/rng.hpp"

namespace attnsim {

/// Logistic stand-in for a judgment classifier: attention raises the chance
/// of a correct call, distraction lowers it.
struct JudgmentModel {
    double b0 = 0.0;   // intercept, set by calibration
    double b1 = 0.15;  // weight on mean AAL, >= 0
    double b2 = 2.0;   // weight on content-time fraction, >= 0
    double b3 = 1.0;   // weight on distraction-time fraction, >= 0

    void validate() const;
};

struct SessionFeatures {
    double mean_aal = 0.0;
    double content_fraction = 0.0;
    double distraction_fraction = 0.0;
};

/// Mean per-stage AAL (partial final stage averaged over its actual
/// duration), plus the main-content (s^5) and distraction time fractions.
SessionFeatures extract_features(const VsTrajectory& trajectory, const ScoreTable& table,
                                 double period_length);

double correct_probability(const JudgmentModel& model, const SessionFeatures& features);

/// Bernoulli draw of a correct judgment.
bool judge(const JudgmentModel& model, const SessionFeatures& features, Rng& rng);

struct JudgmentRecord {
    SessionId session;
    bool correct = false;
    Eigen::VectorXd theta;
};

/// Fraction of correct judgments; errors on an empty record list.
double accuracy(std::span<const JudgmentRecord> records);

/// Bisection on the intercept until the simulated no-aid expected accuracy
/// over `sessions` sessions is within 0.005 of `target`. Sessions run under
/// aid 0 of `dynamics`.
JudgmentModel calibrate_baseline(JudgmentModel model, double target,
                                 const GazeDynamics& dynamics, const ScoreTable& scores,
                                 double period_length, int sessions, Rng& rng);

}  // namespace attnsim
