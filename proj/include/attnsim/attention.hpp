#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "attnsim/gaze.hpp"
#include "attnsim/rng.hpp"

namespace attnsim {

/// Concentration score r(s) and exponential decay rate alpha(s) per visual
/// state, indexed like GazeDynamics (AoIs, then ua, then da).
struct ScoreTable {
    Eigen::VectorXd score;
    Eigen::VectorXd decay;

    int num_states() const { return static_cast<int>(score.size()); }
    void validate() const;
};

enum class QuantizerKind { Binary, Uniform };

struct AttentionConfig {
    double period_length = 3.0;  // T_pl, seconds
    int num_levels = 2;          // X
    QuantizerKind quantizer = QuantizerKind::Binary;
    double threshold = 5.56;     // attention threshold, binary mode
    double v_min = -30.0;        // uniform mode range
    double v_max = 60.0;

    void validate() const;
};

/// Reward accrued by dwelling at `s` for `t` seconds with the decay clock
/// starting at the transition-stage entry: r * (1 - exp(-alpha t)) / alpha.
double stage_reward(const ScoreTable& table, const VisualState& s, double t);

/// Cumulative attention level at time `t` of one generation stage. Segments
/// are stage-relative, must start at 0 and cover [0, t) contiguously.
double cal(std::span<const TrajectorySegment> stage_segments, const ScoreTable& table, double t);

/// Average attention level over a stage of the given length.
double aal(double v_end, double period_length);

/// Attention state index in 0..X-1. Binary: 1 (attentive) iff v >= threshold.
/// Uniform: clamp to [v_min, v_max] and floor into X equal bins.
int quantize(double v, const AttentionConfig& config);

/// Numeric level represented by attention state x, given the attainable AAL
/// range [lo, hi]: bin midpoints in binary mode, bin centers in uniform mode.
double representative_level(int x, const AttentionConfig& config, double lo, double hi);

/// [min(0, min score), max score] — the AAL is always inside this interval.
std::pair<double, double> attainable_aal_range(const ScoreTable& table);

struct PupilTrace {
    std::vector<double> time;
    std::vector<double> diameter;
};

/// 60 Hz trace with diameter = scale * r(s_t) * exp(-alpha(s_t) * tau) plus
/// Gaussian noise, tau being the time since the current segment began.
PupilTrace synth_pupil_trace(const VsTrajectory& trajectory, const ScoreTable& table,
                             double noise_sd, Rng& rng, double scale = 1.0,
                             double sample_hz = 60.0);

struct SaParams {
    double initial_temperature = 10.0;
    double cooling = 0.995;
    int iterations = 10000;
    double proposal_scale = 0.02;  // fraction of the bound width
};

struct ScoreBounds {
    double score_lo = 0.0;
    double score_hi = 50.0;
    double decay_lo = 0.01;
    double decay_hi = 20.0;
};

struct FitScoresResult {
    ScoreTable table;
    double mse = 0.0;
};

/// Simulated-annealing fit of (r, alpha) per state against pupil traces, one
/// trace per trajectory, minimizing the mean squared error between the model
/// attention rate and the trace diameters. The objective separates by state,
/// so each visited state is annealed on its own samples; unvisited states
/// keep the initial guess. `objective_trace`, when given, records the
/// incumbent objective after every iteration of every state.
FitScoresResult fit_scores(const std::vector<PupilTrace>& traces,
                           const std::vector<VsTrajectory>& trajectories, const SaParams& sa,
                           const ScoreBounds& bounds, Rng& rng,
                           const ScoreTable* initial = nullptr,
                           std::vector<double>* objective_trace = nullptr);

}  // namespace attnsim
