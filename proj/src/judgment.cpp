#include "attnsim/judgment.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsim {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr int kContentAoi = 5;

}  // namespace

void JudgmentModel::validate() const {
    if (b1 < 0.0 || b2 < 0.0 || b3 < 0.0)
        throw std::invalid_argument("judgment weights must be non-negative");
}

SessionFeatures extract_features(const VsTrajectory& trajectory, const ScoreTable& table,
                                 double period_length) {
    if (trajectory.segments.empty()) throw std::invalid_argument("empty trajectory");
    if (period_length <= 0.0) throw std::invalid_argument("period length must be positive");
    double total = trajectory.span();

    SessionFeatures f;
    double content_time = 0.0;
    double distraction_time = 0.0;
    for (const TrajectorySegment& seg : trajectory.segments) {
        if (seg.state.kind == StateKind::Aoi && seg.state.aoi == kContentAoi)
            content_time += seg.duration;
        if (seg.state.kind == StateKind::Distraction) distraction_time += seg.duration;
    }
    f.content_fraction = content_time / total;
    f.distraction_fraction = distraction_time / total;

    double aal_sum = 0.0;
    int stages = 0;
    for (int k = 0; k * period_length < total - 1e-9; ++k) {
        double t0 = k * period_length;
        double t1 = std::min(t0 + period_length, total);
        auto segs = clip_segments(trajectory, t0, t1);
        double v = cal(segs, table, t1 - t0);
        aal_sum += aal(v, t1 - t0);
        ++stages;
    }
    f.mean_aal = aal_sum / stages;
    return f;
}

double correct_probability(const JudgmentModel& model, const SessionFeatures& features) {
    return sigmoid(model.b0 + model.b1 * features.mean_aal +
                   model.b2 * features.content_fraction -
                   model.b3 * features.distraction_fraction);
}

bool judge(const JudgmentModel& model, const SessionFeatures& features, Rng& rng) {
    return rng.uniform01() < correct_probability(model, features);
}

double accuracy(std::span<const JudgmentRecord> records) {
    if (records.empty()) throw std::invalid_argument("no judgment records");
    long correct = 0;
    for (const JudgmentRecord& r : records) correct += r.correct ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(records.size());
}

JudgmentModel calibrate_baseline(JudgmentModel model, double target,
                                 const GazeDynamics& dynamics, const ScoreTable& scores,
                                 double period_length, int sessions, Rng& rng) {
    if (target <= 0.0 || target >= 1.0) throw std::invalid_argument("target must be in (0,1)");
    if (sessions < 1) throw std::invalid_argument("need at least one calibration session");
    model.validate();

    std::vector<SessionFeatures> feats;
    feats.reserve(sessions);
    auto no_aid = [](int) { return VisualAid{0}; };
    for (int i = 0; i < sessions; ++i) {
        double T = sample_inspection_time(dynamics, rng);
        VsTrajectory traj = simulate_session(dynamics, no_aid, T, period_length, rng, {0, i});
        feats.push_back(extract_features(traj, scores, period_length));
    }
    auto mean_accuracy = [&](double b0) {
        JudgmentModel m = model;
        m.b0 = b0;
        double sum = 0.0;
        for (const SessionFeatures& f : feats) sum += correct_probability(m, f);
        return sum / static_cast<double>(feats.size());
    };

    double lo = -10.0, hi = 10.0;
    int widen = 0;
    while (mean_accuracy(lo) > target) {
        lo *= 2.0;
        if (++widen > 8) throw std::runtime_error("calibration interval does not bracket target");
    }
    while (mean_accuracy(hi) < target) {
        hi *= 2.0;
        if (++widen > 8) throw std::runtime_error("calibration interval does not bracket target");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double acc = mean_accuracy(mid);
        if (std::abs(acc - target) <= 0.005) {
            model.b0 = mid;
            return model;
        }
        (acc < target ? lo : hi) = mid;
    }
    throw std::runtime_error("calibration bisection did not converge");
}

}  // namespace attnsim
