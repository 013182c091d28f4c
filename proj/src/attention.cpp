#include "attnsim/attention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace attnsim {

namespace {
constexpr double kTimeTol = 1e-9;
}

void ScoreTable::validate() const {
    if (score.size() < 3 || score.size() != decay.size())
        throw std::invalid_argument("score table must cover all I+2 states");
    if ((decay.array() <= 0.0).any())
        throw std::invalid_argument("decay rates must be positive");
}

void AttentionConfig::validate() const {
    if (period_length <= 0.0) throw std::invalid_argument("period length must be positive");
    if (num_levels < 2) throw std::invalid_argument("need at least two attention states");
    if (quantizer == QuantizerKind::Binary && num_levels != 2)
        throw std::invalid_argument("binary quantizer forces X = 2");
    if (quantizer == QuantizerKind::Uniform && !(v_min < v_max))
        throw std::invalid_argument("uniform quantizer needs v_min < v_max");
}

double stage_reward(const ScoreTable& table, const VisualState& s, double t) {
    if (t < 0.0) throw std::invalid_argument("time must be non-negative");
    int idx = state_index(s, table.num_states() - 2);
    double a = table.decay(idx);
    return table.score(idx) * (-std::expm1(-a * t)) / a;
}

double cal(std::span<const TrajectorySegment> stage_segments, const ScoreTable& table,
           double t) {
    if (t < 0.0) throw std::invalid_argument("time must be non-negative");
    double covered = 0.0;
    double v = 0.0;
    for (const TrajectorySegment& seg : stage_segments) {
        if (std::abs(seg.start - covered) > 1e-6)
            throw std::invalid_argument("gap in stage segment coverage");
        if (seg.start >= t) break;
        v += stage_reward(table, seg.state, std::min(seg.duration, t - seg.start));
        covered = seg.start + seg.duration;
        if (covered >= t) break;
    }
    if (covered + 1e-6 < t) throw std::invalid_argument("stage segments do not cover [0, t)");
    return v;
}

double aal(double v_end, double period_length) {
    if (period_length <= 0.0) throw std::invalid_argument("period length must be positive");
    return v_end / period_length;
}

int quantize(double v, const AttentionConfig& config) {
    if (config.quantizer == QuantizerKind::Binary) return v >= config.threshold ? 1 : 0;
    double clamped = std::clamp(v, config.v_min, config.v_max);
    double width = (config.v_max - config.v_min) / config.num_levels;
    int bin = static_cast<int>((clamped - config.v_min) / width);
    return std::min(bin, config.num_levels - 1);
}

double representative_level(int x, const AttentionConfig& config, double lo, double hi) {
    if (hi < lo) std::swap(lo, hi);
    if (config.quantizer == QuantizerKind::Binary) {
        double cut = std::clamp(config.threshold, lo, hi);
        return x == 0 ? 0.5 * (lo + cut) : 0.5 * (cut + hi);
    }
    double width = (config.v_max - config.v_min) / config.num_levels;
    return config.v_min + (x + 0.5) * width;
}

std::pair<double, double> attainable_aal_range(const ScoreTable& table) {
    double lo = std::min(0.0, table.score.minCoeff());
    double hi = std::max(table.score.maxCoeff(), lo);
    return {lo, hi};
}

PupilTrace synth_pupil_trace(const VsTrajectory& trajectory, const ScoreTable& table,
                             double noise_sd, Rng& rng, double scale, double sample_hz) {
    if (noise_sd < 0.0) throw std::invalid_argument("noise sd must be non-negative");
    if (sample_hz <= 0.0) throw std::invalid_argument("sample rate must be positive");
    PupilTrace out;
    double span = trajectory.span();
    std::size_t seg = 0;
    int num_aois = table.num_states() - 2;
    for (long j = 0;; ++j) {
        double t = j / sample_hz;
        if (t >= span - kTimeTol) break;
        while (seg + 1 < trajectory.segments.size() &&
               t >= trajectory.segments[seg].start + trajectory.segments[seg].duration)
            ++seg;
        const TrajectorySegment& s = trajectory.segments[seg];
        double tau = t - s.start;
        int idx = state_index(s.state, num_aois);
        double d = scale * table.score(idx) * std::exp(-table.decay(idx) * tau);
        if (noise_sd > 0.0) d += rng.normal(0.0, noise_sd);
        out.time.push_back(t);
        out.diameter.push_back(d);
    }
    return out;
}

namespace {

struct StateSamples {
    std::vector<double> tau;
    std::vector<double> diameter;
};

double state_mse(double r, double a, const StateSamples& s) {
    double sse = 0.0;
    for (std::size_t i = 0; i < s.tau.size(); ++i) {
        double e = r * std::exp(-a * s.tau[i]) - s.diameter[i];
        sse += e * e;
    }
    return sse / static_cast<double>(s.tau.size());
}

}  // namespace

FitScoresResult fit_scores(const std::vector<PupilTrace>& traces,
                           const std::vector<VsTrajectory>& trajectories, const SaParams& sa,
                           const ScoreBounds& bounds, Rng& rng, const ScoreTable* initial,
                           std::vector<double>* objective_trace) {
    if (traces.size() != trajectories.size())
        throw std::invalid_argument("one trace per trajectory required");
    if (traces.empty()) throw std::invalid_argument("no traces to fit");
    if (bounds.score_lo >= bounds.score_hi || bounds.decay_lo >= bounds.decay_hi)
        throw std::invalid_argument("bad fit bounds");

    int num_states = initial ? initial->num_states() : 0;
    if (num_states == 0) {
        int max_aoi = 0;
        for (const VsTrajectory& traj : trajectories)
            for (const TrajectorySegment& seg : traj.segments)
                if (seg.state.kind == StateKind::Aoi) max_aoi = std::max(max_aoi, seg.state.aoi);
        num_states = max_aoi + 2;
    }
    const int num_aois = num_states - 2;

    // bucket samples by the state active at each sample time
    std::vector<StateSamples> samples(num_states);
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const VsTrajectory& traj = trajectories[k];
        const PupilTrace& trace = traces[k];
        if (trace.time.size() != trace.diameter.size())
            throw std::invalid_argument("malformed pupil trace");
        std::size_t seg = 0;
        for (std::size_t i = 0; i < trace.time.size(); ++i) {
            double t = trace.time[i];
            while (seg + 1 < traj.segments.size() &&
                   t >= traj.segments[seg].start + traj.segments[seg].duration)
                ++seg;
            if (seg >= traj.segments.size()) break;
            const TrajectorySegment& s = traj.segments[seg];
            if (t < s.start - kTimeTol || t > s.start + s.duration + kTimeTol)
                throw std::invalid_argument("trace not time-aligned with trajectory");
            StateSamples& bucket = samples[state_index(s.state, num_aois)];
            bucket.tau.push_back(t - s.start);
            bucket.diameter.push_back(trace.diameter[i]);
        }
    }

    double r_init = 0.5 * (bounds.score_lo + bounds.score_hi);
    double a_init = 0.5 * (bounds.decay_lo + bounds.decay_hi);
    double r_step = sa.proposal_scale * (bounds.score_hi - bounds.score_lo);
    double a_step = sa.proposal_scale * (bounds.decay_hi - bounds.decay_lo);

    FitScoresResult out;
    out.table.score = Eigen::VectorXd::Constant(num_states, r_init);
    out.table.decay = Eigen::VectorXd::Constant(num_states, a_init);
    if (initial) out.table = *initial;

    long total_n = 0;
    std::vector<double> sse(num_states, 0.0);  // incumbent SSE per state
    for (int st = 0; st < num_states; ++st) {
        if (samples[st].tau.empty()) continue;
        total_n += static_cast<long>(samples[st].tau.size());
        sse[st] = state_mse(out.table.score(st), out.table.decay(st), samples[st]) *
                  static_cast<double>(samples[st].tau.size());
    }
    auto objective = [&] {
        double s = 0.0;
        for (double v : sse) s += v;
        return total_n > 0 ? s / static_cast<double>(total_n) : 0.0;
    };

    for (int st = 0; st < num_states; ++st) {
        const StateSamples& ss = samples[st];
        if (ss.tau.empty()) continue;  // unidentifiable, keep the initial guess
        const double n_st = static_cast<double>(ss.tau.size());
        double r = out.table.score(st);
        double a = out.table.decay(st);
        double cur = state_mse(r, a, ss);
        double best_r = r, best_a = a, best = cur;
        double temp = sa.initial_temperature;
        for (int it = 0; it < sa.iterations; ++it) {
            double r2 = r + rng.normal(0.0, r_step);
            double a2 = a + rng.normal(0.0, a_step);
            temp *= sa.cooling;
            bool in_bounds = r2 >= bounds.score_lo && r2 <= bounds.score_hi &&
                             a2 >= bounds.decay_lo && a2 <= bounds.decay_hi;
            if (in_bounds) {  // out-of-bounds proposals are rejected outright
                double cand = state_mse(r2, a2, ss);
                double delta = cand - cur;
                if (delta <= 0.0 ||
                    rng.uniform01() < std::exp(-delta / std::max(temp, 1e-300))) {
                    r = r2;
                    a = a2;
                    cur = cand;
                    if (cur < best) {
                        best = cur;
                        best_r = r;
                        best_a = a;
                    }
                }
            }
            if (objective_trace) {
                sse[st] = best * n_st;
                objective_trace->push_back(objective());
            }
        }
        out.table.score(st) = best_r;
        out.table.decay(st) = best_a;
        sse[st] = best * n_st;
    }
    out.mse = objective();
    return out;
}

}  // namespace attnsim
