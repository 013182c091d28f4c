#pragma once

#include <Eigen/Dense>

#include "attnsim/gaze.hpp"
#include "attnsim/rng.hpp"

namespace attnsim {

/// Tabular action values over (attention state, visual aid) with per-pair
/// visit counts. Visits only ever increment.
struct QTable {
    Eigen::MatrixXd q;
    Eigen::MatrixXi visits;

    static QTable zeros(int num_states, int num_aids) {
        return {Eigen::MatrixXd::Zero(num_states, num_aids),
                Eigen::MatrixXi::Zero(num_states, num_aids)};
    }
    int num_states() const { return static_cast<int>(q.rows()); }
    int num_aids() const { return static_cast<int>(q.cols()); }
};

struct EpsilonSchedule {
    enum class Kind { InverseStage, Exponential };
    Kind kind = Kind::InverseStage;
    double kappa = 50.0;  // inverse-stage: kappa / (kappa + k)
    double decay = 0.999; // exponential: decay^k
};

/// Exploration probability at generation stage k; 1 at k = 0, non-increasing,
/// 0 in the limit.
double epsilon_at(long k, const EpsilonSchedule& schedule);

struct LearningParams {
    double beta = 0.9;   // discount, in (0,1)
    double eta0 = 10.0;  // learning-rate constant
    EpsilonSchedule epsilon;

    void validate() const;
};

/// gamma = eta0 / (visit_count - 1 + eta0); equals 1 on the first visit.
double learning_rate(long visit_count, double eta0);

/// Epsilon-greedy: uniform over the aid library with probability epsilon,
/// otherwise argmax_a q(x, a) with ties going to the lowest aid id.
VisualAid select_aid(const QTable& table, int x, double epsilon, Rng& rng);

/// One Q-learning update of entry (x, a). Precondition: visits(x, a) was
/// already incremented for this visit; the rate uses that count.
void q_update(QTable& table, int x, int a, double reward, int x_next,
              const LearningParams& params);

}  // namespace attnsim
