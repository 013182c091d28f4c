#include "attnsim/gaze.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsim {

namespace {

constexpr double kTimeTol = 1e-9;

int sample_discrete(const Eigen::Ref<const Eigen::RowVectorXd>& weights, Rng& rng) {
    double total = weights.sum();
    if (total <= 0.0) throw std::invalid_argument("transition row has no mass");
    double u = rng.uniform01() * total;
    double acc = 0.0;
    int last = -1;
    for (int j = 0; j < weights.size(); ++j) {
        if (weights(j) <= 0.0) continue;
        acc += weights(j);
        last = j;
        if (u < acc) return j;
    }
    return last;  // u landed in the rounding slack past the final entry
}

}  // namespace

int state_index(const VisualState& s, int num_aois) {
    switch (s.kind) {
        case StateKind::Aoi:
            if (s.aoi < 1 || s.aoi > num_aois)
                throw std::invalid_argument("AoI index out of range");
            return s.aoi - 1;
        case StateKind::Uninformative:
            return num_aois;
        case StateKind::Distraction:
            return num_aois + 1;
    }
    throw std::invalid_argument("bad visual state");
}

VisualState state_at(int index, int num_aois) {
    if (index < 0 || index >= num_aois + 2)
        throw std::invalid_argument("state index out of range");
    if (index < num_aois) return VisualState::Aoi(index + 1);
    return index == num_aois ? VisualState::Uninformative() : VisualState::Distraction();
}

std::string state_name(const VisualState& s) {
    switch (s.kind) {
        case StateKind::Aoi: return "s" + std::to_string(s.aoi);
        case StateKind::Uninformative: return "ua";
        case StateKind::Distraction: return "da";
    }
    return "?";
}

std::optional<VisualState> parse_state(const std::string& name, int num_aois) {
    if (name == "ua") return VisualState::Uninformative();
    if (name == "da") return VisualState::Distraction();
    if (name.size() >= 2 && name[0] == 's') {
        int i = 0;
        try {
            i = std::stoi(name.substr(1));
        } catch (...) {
            return std::nullopt;
        }
        if (i >= 1 && i <= num_aois) return VisualState::Aoi(i);
    }
    return std::nullopt;
}

double burr_cdf(const BurrParams& p, double t) {
    if (t <= 0.0) return 0.0;
    return 1.0 - std::pow(1.0 + std::pow(t / p.rho1, p.rho2), -p.rho3);
}

void GazeDynamics::validate() const {
    if (num_aois < 1) throw std::invalid_argument("dynamics need at least one AoI");
    const int n = num_states();
    if (transition.empty()) throw std::invalid_argument("dynamics need at least one aid");
    if (sojourn.size() != transition.size())
        throw std::invalid_argument("per-aid sojourn/transition count mismatch");
    if (!aid_names.empty() && aid_names.size() != transition.size())
        throw std::invalid_argument("aid name count mismatch");
    for (std::size_t a = 0; a < transition.size(); ++a) {
        const Eigen::MatrixXd& P = transition[a];
        if (P.rows() != n || P.cols() != n)
            throw std::invalid_argument("transition matrix has wrong shape");
        if ((P.array() < 0.0).any())
            throw std::invalid_argument("transition matrix has negative entries");
        for (int i = 0; i < n; ++i) {
            if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
                throw std::invalid_argument("transition row " + std::to_string(i) +
                                            " does not sum to 1");
        }
        if (sojourn[a].size() != n) throw std::invalid_argument("sojourn vector has wrong size");
        if ((sojourn[a].array() <= 0.0).any())
            throw std::invalid_argument("sojourn scales must be positive");
    }
    if (initial.size() != n) throw std::invalid_argument("initial distribution has wrong size");
    if ((initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("initial distribution must be a probability vector");
    if (burr.rho1 <= 0.0 || burr.rho2 <= 0.0 || burr.rho3 <= 0.0)
        throw std::invalid_argument("Burr parameters must be positive");
}

double sample_inspection_time(const GazeDynamics& dynamics, Rng& rng) {
    const BurrParams& p = dynamics.burr;
    for (;;) {
        double u = rng.uniform01();
        double t = p.rho1 * std::pow(std::pow(1.0 - u, -1.0 / p.rho3) - 1.0, 1.0 / p.rho2);
        if (std::isfinite(t) && t > 0.0) return t;
    }
}

VisualState sample_initial_state(const GazeDynamics& dynamics, Rng& rng) {
    int idx = sample_discrete(dynamics.initial.transpose(), rng);
    return state_at(idx, dynamics.num_aois);
}

std::pair<VisualState, double> step_semi_markov(const GazeDynamics& dynamics,
                                                const VisualState& current, VisualAid aid,
                                                Rng& rng) {
    if (aid.id < 0 || aid.id >= dynamics.num_aids())
        throw std::invalid_argument("aid id out of range");
    int idx = state_index(current, dynamics.num_aois);
    double sojourn = rng.exponential(dynamics.sojourn[aid.id](idx));
    int next = sample_discrete(dynamics.transition[aid.id].row(idx), rng);
    return {state_at(next, dynamics.num_aois), sojourn};
}

StageResult simulate_stage(const GazeDynamics& dynamics, VisualAid aid, VisualState start,
                           double duration, Rng& rng) {
    if (duration <= 0.0) throw std::invalid_argument("stage duration must be positive");
    StageResult out;
    VisualState s = start;
    double t = 0.0;
    while (t < duration - kTimeTol) {
        auto [next, sojourn] = step_semi_markov(dynamics, s, aid, rng);
        double end = std::min(t + sojourn, duration);
        if (end > t) out.segments.push_back({s, t, end - t});
        t = end;
        if (t >= duration - kTimeTol) break;
        s = next;
    }
    out.end_state = s;
    return out;
}

VsTrajectory simulate_session(const GazeDynamics& dynamics,
                              const std::function<VisualAid(int)>& aid_schedule,
                              double total_time, double period_length, Rng& rng,
                              SessionId session) {
    if (total_time <= 0.0) throw std::invalid_argument("total time must be positive");
    if (period_length <= 0.0) throw std::invalid_argument("period length must be positive");
    dynamics.validate();

    VsTrajectory traj;
    traj.session = session;
    VisualState s = sample_initial_state(dynamics, rng);
    for (int k = 0; k * period_length < total_time - kTimeTol; ++k) {
        double t0 = k * period_length;
        double duration = std::min(period_length, total_time - t0);
        StageResult stage = simulate_stage(dynamics, aid_schedule(k), s, duration, rng);
        for (const TrajectorySegment& seg : stage.segments) {
            if (!traj.segments.empty() && traj.segments.back().state == seg.state) {
                traj.segments.back().duration += seg.duration;  // boundary re-entry
            } else {
                traj.segments.push_back({seg.state, t0 + seg.start, seg.duration});
            }
        }
        s = stage.end_state;
    }
    return traj;
}

GazeDynamics apply_visual_aid_effect(const GazeDynamics& base, const VisualAidEffect& effect) {
    if (effect.distraction_damping < 0.0 || effect.distraction_damping > 1.0)
        throw std::invalid_argument("distraction damping must be in [0,1]");
    if (effect.content_sojourn_scale <= 0.0 || effect.content_sojourn_scale > 1.0)
        throw std::invalid_argument("content sojourn scale must be in (0,1]");
    base.validate();

    GazeDynamics out = base;
    const int n = base.num_states();
    const int ua = base.num_aois;
    const int da = base.num_aois + 1;
    for (int a = 0; a < out.num_aids(); ++a) {
        Eigen::MatrixXd& P = out.transition[a];
        for (int i = 0; i < n; ++i) {
            P(i, ua) *= effect.distraction_damping;
            P(i, da) *= effect.distraction_damping;
            double sum = P.row(i).sum();
            if (sum > 0.0) {
                P.row(i) /= sum;
            } else {
                // all mass sat on ua/da and the damping removed it
                int targets = 0;
                for (int j = 0; j < base.num_aois; ++j)
                    if (j != i) ++targets;
                if (targets == 0) throw std::invalid_argument("no AoI column to redistribute to");
                for (int j = 0; j < base.num_aois; ++j) P(i, j) = (j == i) ? 0.0 : 1.0 / targets;
            }
        }
        if (effect.content_aoi >= 1 && effect.content_aoi <= base.num_aois)
            out.sojourn[a](effect.content_aoi - 1) *= effect.content_sojourn_scale;
    }
    return out;
}

GazeDynamics estimate_dynamics(const std::vector<VsTrajectory>& trajectories,
                               const std::vector<std::vector<int>>& stage_aids,
                               double period_length, int num_aids, int num_aois,
                               EstimateDiagnostics* diagnostics) {
    if (trajectories.empty()) throw std::invalid_argument("no trajectories to estimate from");
    if (num_aids < 1 || num_aois < 1) throw std::invalid_argument("bad estimate dimensions");
    const int n = num_aois + 2;

    std::vector<Eigen::MatrixXd> counts(num_aids, Eigen::MatrixXd::Zero(n, n));
    std::vector<Eigen::VectorXd> soj_sum(num_aids, Eigen::VectorXd::Zero(n));
    std::vector<Eigen::VectorXd> soj_n(num_aids, Eigen::VectorXd::Zero(n));
    Eigen::VectorXd first = Eigen::VectorXd::Zero(n);

    for (std::size_t ti = 0; ti < trajectories.size(); ++ti) {
        const VsTrajectory& traj = trajectories[ti];
        if (traj.segments.empty()) continue;
        const std::vector<int>* aids = ti < stage_aids.size() ? &stage_aids[ti] : nullptr;
        auto aid_at = [&](double t) {
            if (!aids || aids->empty()) return 0;
            auto k = static_cast<std::size_t>(t / period_length);
            int a = (*aids)[std::min(k, aids->size() - 1)];
            if (a < 0 || a >= num_aids) throw std::invalid_argument("stage aid out of range");
            return a;
        };
        first(state_index(traj.segments.front().state, num_aois)) += 1.0;
        for (std::size_t i = 0; i < traj.segments.size(); ++i) {
            const TrajectorySegment& seg = traj.segments[i];
            int a = aid_at(seg.start);
            int from = state_index(seg.state, num_aois);
            soj_sum[a](from) += seg.duration;
            soj_n[a](from) += 1.0;
            if (i + 1 < traj.segments.size()) {
                int to = state_index(traj.segments[i + 1].state, num_aois);
                counts[a](from, to) += 1.0;
            }
        }
    }

    GazeDynamics out;
    out.num_aois = num_aois;
    out.initial = first / first.sum();
    for (int a = 0; a < num_aids; ++a) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd phi = Eigen::VectorXd::Ones(n);
        for (int i = 0; i < n; ++i) {
            double row_total = counts[a].row(i).sum();
            if (row_total > 0.0) {
                P.row(i) = counts[a].row(i) / row_total;
            } else {
                for (int j = 0; j < n; ++j) P(i, j) = (j == i) ? 0.0 : 1.0 / (n - 1);
                if (diagnostics) diagnostics->zero_observation_rows.emplace_back(a, i);
            }
            if (soj_n[a](i) > 0.0) phi(i) = soj_sum[a](i) / soj_n[a](i);
        }
        out.transition.push_back(std::move(P));
        out.sojourn.push_back(std::move(phi));
        out.aid_names.push_back("a" + std::to_string(a));
    }
    return out;
}

GazeDynamics estimate_dynamics(const std::vector<VsTrajectory>& trajectories, int num_aois,
                               EstimateDiagnostics* diagnostics) {
    return estimate_dynamics(trajectories, {}, 1.0, 1, num_aois, diagnostics);
}

std::vector<TrajectorySegment> clip_segments(const VsTrajectory& trajectory, double t0,
                                             double t1) {
    std::vector<TrajectorySegment> out;
    for (const TrajectorySegment& seg : trajectory.segments) {
        double lo = std::max(seg.start, t0);
        double hi = std::min(seg.start + seg.duration, t1);
        if (hi - lo > kTimeTol) out.push_back({seg.state, lo - t0, hi - lo});
    }
    return out;
}

}  // namespace attnsim
