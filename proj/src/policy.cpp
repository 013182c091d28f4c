#include "attnsim/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsim {

double epsilon_at(long k, const EpsilonSchedule& schedule) {
    if (k < 0) throw std::invalid_argument("stage index must be non-negative");
    switch (schedule.kind) {
        case EpsilonSchedule::Kind::InverseStage:
            if (schedule.kappa <= 0.0) throw std::invalid_argument("kappa must be positive");
            return schedule.kappa / (schedule.kappa + static_cast<double>(k));
        case EpsilonSchedule::Kind::Exponential:
            if (schedule.decay <= 0.0 || schedule.decay >= 1.0)
                throw std::invalid_argument("decay must be in (0,1)");
            return std::pow(schedule.decay, static_cast<double>(k));
    }
    throw std::invalid_argument("bad epsilon schedule");
}

void LearningParams::validate() const {
    if (beta <= 0.0 || beta >= 1.0) throw std::invalid_argument("beta must be in (0,1)");
    if (eta0 <= 0.0) throw std::invalid_argument("eta0 must be positive");
    epsilon_at(0, epsilon);
}

double learning_rate(long visit_count, double eta0) {
    if (visit_count < 1) throw std::invalid_argument("visit count must be at least 1");
    if (eta0 <= 0.0) throw std::invalid_argument("eta0 must be positive");
    return eta0 / (static_cast<double>(visit_count) - 1.0 + eta0);
}

VisualAid select_aid(const QTable& table, int x, double epsilon, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0,1]");
    if (x < 0 || x >= table.num_states()) throw std::invalid_argument("attention state out of range");
    int num_aids = table.num_aids();
    if (rng.uniform01() < epsilon) return {rng.uniform_int(num_aids)};
    int best = 0;
    for (int a = 1; a < num_aids; ++a)
        if (table.q(x, a) > table.q(x, best)) best = a;
    return {best};
}

void q_update(QTable& table, int x, int a, double reward, int x_next,
              const LearningParams& params) {
    double gamma = learning_rate(table.visits(x, a), params.eta0);
    double target = reward + params.beta * table.q.row(x_next).maxCoeff();
    table.q(x, a) += gamma * (target - table.q(x, a));
}

}  // namespace attnsim
