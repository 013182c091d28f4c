#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attnsim/rng.hpp"

namespace attnsim {

enum class StateKind { Aoi, Uninformative, Distraction };

/// One of the I+2 visual states: an AoI (1-based index), the uninformative
/// on-screen area, or the off-screen distraction area.
struct VisualState {
    StateKind kind = StateKind::Uninformative;
    int aoi = 0;  // 1..I, meaningful only when kind == Aoi

    static VisualState Aoi(int i) { return {StateKind::Aoi, i}; }
    static VisualState Uninformative() { return {StateKind::Uninformative, 0}; }
    static VisualState Distraction() { return {StateKind::Distraction, 0}; }

    friend bool operator==(const VisualState& a, const VisualState& b) {
        return a.kind == b.kind && (a.kind != StateKind::Aoi || a.aoi == b.aoi);
    }
    friend bool operator!=(const VisualState& a, const VisualState& b) { return !(a == b); }
};

/// Flat index layout: 0..I-1 are AoIs 1..I, I is uninformative, I+1 distraction.
int state_index(const VisualState& s, int num_aois);
VisualState state_at(int index, int num_aois);
std::string state_name(const VisualState& s);
std::optional<VisualState> parse_state(const std::string& name, int num_aois);

struct VisualAid {
    int id = 0;
};

struct BurrParams {
    double rho1 = 11.7;
    double rho2 = 62.5;
    double rho3 = 0.04;
};

double burr_cdf(const BurrParams& p, double t);

/// Per-aid semi-Markov parameters over the I+2 visual states.
struct GazeDynamics {
    int num_aois = 0;
    std::vector<std::string> aid_names;       // one per aid
    std::vector<Eigen::MatrixXd> transition;  // per aid, (I+2)x(I+2), rows sum to 1
    std::vector<Eigen::VectorXd> sojourn;     // per aid, exponential scales in seconds
    Eigen::VectorXd initial;                  // initial-state distribution
    BurrParams burr;

    int num_states() const { return num_aois + 2; }
    int num_aids() const { return static_cast<int>(transition.size()); }
    void validate() const;  // throws std::invalid_argument
};

struct TrajectorySegment {
    VisualState state;
    double start = 0.0;     // seconds from session start
    double duration = 0.0;  // > 0
};

struct SessionId {
    int user = 0;
    int email = 0;
};

/// Canonical gaze record: contiguous segments starting at 0, adjacent states
/// always distinct (a re-entry of the same state is merged).
struct VsTrajectory {
    SessionId session;
    std::vector<TrajectorySegment> segments;

    double span() const {
        return segments.empty() ? 0.0 : segments.back().start + segments.back().duration;
    }
};

/// Inspection time T ~ Burr via inverse CDF; resamples the (measure-zero)
/// non-finite corner instead of surfacing it.
double sample_inspection_time(const GazeDynamics& dynamics, Rng& rng);

VisualState sample_initial_state(const GazeDynamics& dynamics, Rng& rng);

/// One jump of the semi-Markov chain: exponential sojourn at `current`, next
/// state from the matching transition row (never `current`; diagonals are 0).
std::pair<VisualState, double> step_semi_markov(const GazeDynamics& dynamics,
                                                const VisualState& current, VisualAid aid,
                                                Rng& rng);

struct StageResult {
    std::vector<TrajectorySegment> segments;  // starts relative to the stage
    VisualState end_state;                    // state in flight at the stage boundary
};

/// Runs the chain for one generation stage of the given duration; an in-flight
/// sojourn is truncated at the boundary and the state re-enters afterwards.
StageResult simulate_stage(const GazeDynamics& dynamics, VisualAid aid, VisualState start,
                           double duration, Rng& rng);

/// Full session of ceil(T / T_pl) generation stages; `aid_schedule` is
/// consulted once per stage (k = 0, 1, ...).
VsTrajectory simulate_session(const GazeDynamics& dynamics,
                              const std::function<VisualAid(int)>& aid_schedule,
                              double total_time, double period_length, Rng& rng,
                              SessionId session = {});

struct VisualAidEffect {
    double distraction_damping = 0.5;   // multiplies the ua/da columns, in [0,1]
    double content_sojourn_scale = 0.6; // multiplies the main-content sojourn, in (0,1]
    int content_aoi = 5;
};

/// Damps transitions into the uninformative/distraction states (renormalizing
/// each row) and shortens the main-content sojourn. A row left with no mass
/// is redistributed uniformly over the off-diagonal AoI columns.
GazeDynamics apply_visual_aid_effect(const GazeDynamics& base, const VisualAidEffect& effect);

struct EstimateDiagnostics {
    std::vector<std::pair<int, int>> zero_observation_rows;  // (aid, state index)
};

/// Empirical transition frequencies and mean sojourns per aid. `stage_aids`
/// gives, per trajectory, the aid active in each generation stage of length
/// `period_length`; a segment is attributed to the aid at its start time.
GazeDynamics estimate_dynamics(const std::vector<VsTrajectory>& trajectories,
                               const std::vector<std::vector<int>>& stage_aids,
                               double period_length, int num_aids, int num_aois,
                               EstimateDiagnostics* diagnostics = nullptr);

/// Single-aid convenience overload.
GazeDynamics estimate_dynamics(const std::vector<VsTrajectory>& trajectories, int num_aois,
                               EstimateDiagnostics* diagnostics = nullptr);

/// Segments intersecting [t0, t1), clipped and rebased so the window starts at 0.
std::vector<TrajectorySegment> clip_segments(const VsTrajectory& trajectory, double t0,
                                             double t1);

}  // namespace attnsim
