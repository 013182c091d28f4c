#include "attnsim/harness.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

namespace attnsim {

namespace {
constexpr double kTimeTol = 1e-9;
constexpr double kSampleHz = 60.0;
}  // namespace

void ExperimentConfig::validate() const {
    dynamics.validate();
    scores.validate();
    if (scores.num_states() != dynamics.num_states())
        throw std::invalid_argument("score table and dynamics disagree on the state count");
    attention.validate();
    learning.validate();
    judgment.validate();
    if (emails_per_stage < 1) throw std::invalid_argument("need at least one email per stage");
    if (repeats < 1) throw std::invalid_argument("need at least one repeat");
    if (initial_stages < 1 || initial_stages >= total_stages)
        throw std::invalid_argument("need 1 <= initial stages < total stages");
    box.validate();
}

ResolvedParams resolve_theta(const ExperimentConfig& config, const Eigen::VectorXd& theta) {
    ResolvedParams out{config.attention, config.scores};
    if (theta.size() == 0) return out;
    if (theta.size() == 2) {
        out.attention.quantizer = QuantizerKind::Binary;
        out.attention.num_levels = 2;
        out.attention.threshold = theta(0);
        out.attention.period_length = theta(1) / kSampleHz;
        out.attention.validate();
        return out;
    }
    const int s = config.dynamics.num_states();
    if (theta.size() == 2 + 2 * s) {
        out.attention.quantizer = QuantizerKind::Uniform;
        out.attention.period_length = theta(0) / kSampleHz;
        out.attention.num_levels = std::max(2, static_cast<int>(std::lround(theta(1))));
        out.scores.score = theta.segment(2, s);
        out.scores.decay = theta.segment(2 + s, s).cwiseMax(1e-6);
        out.attention.validate();
        out.scores.validate();
        return out;
    }
    throw std::invalid_argument("theta must have dimension 0, 2, or 2 + 2(I+2)");
}

SessionResult run_individual_with_time(const ExperimentConfig& config, LearnerState state,
                                       const Eigen::VectorXd& theta, double inspection_time,
                                       Rng& rng, SessionId session) {
    ResolvedParams rp = resolve_theta(config, theta);
    const double period = rp.attention.period_length;
    auto [lo, hi] = attainable_aal_range(rp.scores);

    SessionResult out;
    out.inspection_time = inspection_time;
    out.trajectory.session = session;

    VisualState s = sample_initial_state(config.dynamics, rng);
    int x_prev = state.attention_state;
    VisualAid aid = select_aid(state.table, x_prev,
                               epsilon_at(state.stage_count, config.learning.epsilon), rng);

    for (int k = 0; k * period < inspection_time - kTimeTol; ++k) {
        double t0 = k * period;
        double duration = std::min(period, inspection_time - t0);
        StageResult stage = simulate_stage(config.dynamics, aid, s, duration, rng);
        for (const TrajectorySegment& seg : stage.segments) {
            auto& segs = out.trajectory.segments;
            if (!segs.empty() && segs.back().state == seg.state)
                segs.back().duration += seg.duration;
            else
                segs.push_back({seg.state, t0 + seg.start, seg.duration});
        }
        s = stage.end_state;

        if (duration >= period - kTimeTol) {  // a full generation stage ended
            double v_end = cal(stage.segments, rp.scores, duration);
            int x_k = quantize(aal(v_end, duration), rp.attention);

            state.table.visits(x_prev, aid.id) += 1;  // the governed stage completed
            double reward = representative_level(x_prev, rp.attention, lo, hi);
            q_update(state.table, x_prev, aid.id, reward, x_k, config.learning);
            state.stage_count += 1;
            out.stages += 1;
            for (int x = 0; x < state.table.num_states(); ++x)
                for (int a = 0; a < state.table.num_aids(); ++a)
                    out.curve.push_back({state.stage_count, x, a, state.table.q(x, a)});

            aid = select_aid(state.table, x_k,
                             epsilon_at(state.stage_count, config.learning.epsilon), rng);
            x_prev = x_k;
        }
    }

    state.attention_state = x_prev;
    out.features = extract_features(out.trajectory, rp.scores, period);
    out.correct = judge(config.judgment, out.features, rng);
    out.state = std::move(state);
    return out;
}

SessionResult run_individual(const ExperimentConfig& config, LearnerState state,
                             const Eigen::VectorXd& theta, Rng& rng, SessionId session) {
    double t = sample_inspection_time(config.dynamics, rng);
    return run_individual_with_time(config, std::move(state), theta, t, rng, session);
}

PopulationResult run_population(const ExperimentConfig& config, const Eigen::VectorXd& theta,
                                Rng& rng) {
    ResolvedParams rp = resolve_theta(config, theta);
    PopulationResult out;
    out.state = {QTable::zeros(rp.attention.num_levels, config.dynamics.num_aids()), 0, 0};

    double aal_sum = 0.0;
    for (int n = 0; n < config.emails_per_stage; ++n) {
        SessionResult sr =
            run_individual(config, std::move(out.state), theta, rng, SessionId{0, n});
        out.state = std::move(sr.state);
        out.total_stages += sr.stages;
        aal_sum += sr.features.mean_aal;
        out.records.push_back({SessionId{0, n}, sr.correct, theta});
        out.curve.insert(out.curve.end(), sr.curve.begin(), sr.curve.end());
    }
    out.mean_aal = aal_sum / config.emails_per_stage;
    out.accuracy = accuracy(out.records);
    return out;
}

RunReport run_tuning(const ExperimentConfig& config, Rng& rng) {
    config.validate();

    RunReport report;
    report.master_seed = config.master_seed;
    int stage = 0;
    auto evaluator = [&](const Eigen::VectorXd& theta) {
        int l = stage++;
        std::vector<std::future<double>> repeats;
        repeats.reserve(config.repeats);
        for (int r = 0; r < config.repeats; ++r) {
            repeats.push_back(std::async(std::launch::async, [&, l, r, theta] {
                Rng stream = Rng::from_stream(config.master_seed, 1 + l, r);
                return run_population(config, theta, stream).accuracy;
            }));
        }
        double sum = 0.0, sum_sq = 0.0;
        for (auto& f : repeats) {
            double v = f.get();
            sum += v;
            sum_sq += v * v;
        }
        double mean = sum / config.repeats;
        double var = std::max(sum_sq / config.repeats - mean * mean, 0.0);
        report.sample_sd.push_back(std::sqrt(var));
        return mean;
    };

    TuneParams tp;
    tp.total_stages = config.total_stages;
    tp.initial_stages = config.initial_stages;
    tp.search = config.search;
    tp.mle_restarts = config.mle_restarts;
    report.tuning = tune(evaluator, config.box, tp, rng);
    return report;
}

}  // namespace attnsim
