#include "attnsim/fixtures.hpp"

namespace attnsim::fixtures {

namespace {

constexpr int kAois = 13;
constexpr int kContent = 4;  // flat index of s^5
constexpr int kUa = 13;
constexpr int kDa = 14;

}  // namespace

ScoreTable benchmark_scores() {
    ScoreTable t;
    t.score.resize(kAois + 2);
    t.decay.resize(kAois + 2);
    const double scores[kAois] = {9.48, 3.55, 7.62, 13.76, 21.05, 7.84, 6.47,
                                  6.44, 4.86, 3.81, 7.34,  7.26,  4.74};
    const double decays[kAois] = {2.17, 4.04, 0.22, 0.57, 0.16, 10.90, 5.46,
                                  5.16, 13.91, 6.68, 2.19, 2.02, 3.46};
    for (int i = 0; i < kAois; ++i) {
        t.score(i) = scores[i];
        t.decay(i) = decays[i];
    }
    t.score(kUa) = 0.0;
    t.decay(kUa) = 1.0;
    t.score(kDa) = 0.0;
    t.decay(kDa) = 1.0;
    return t;
}

VisualAidEffect case_study_effect() { return {0.35, 0.75, 5}; }

GazeDynamics case_study_dynamics() {
    const int n = kAois + 2;
    GazeDynamics d;
    d.num_aois = kAois;
    d.aid_names = {"aN"};

    Eigen::MatrixXd p(n, n);
    for (int i = 0; i < n; ++i) {
        Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(n);
        if (i < kAois) {
            // reading rows: mostly toward the main content, with a steady
            // leak into the uninformative and distraction areas
            w.head(kAois).setConstant(1.4);
            w(kContent) = 16.0;
            w(kUa) = 7.0;
            w(kDa) = 5.0;
        } else {
            // once off the content, attention mostly bounces between the
            // uninformative and distraction areas
            w.head(kAois).setConstant(0.5);
            w(kContent) = 5.0;
            w(kUa) = 30.0;
            w(kDa) = 30.0;
        }
        w(i) = 0.0;
        p.row(i) = w / w.sum();
    }

    Eigen::VectorXd phi(n);
    phi << 1.0, 0.6, 0.6, 0.8, 2.4, 0.5, 0.6, 0.5, 0.45, 0.45, 0.55, 0.6, 0.5, 1.0, 4.2;

    d.transition.push_back(p);
    d.sojourn.push_back(phi);
    d.initial = Eigen::VectorXd::Zero(n);
    d.initial(0) = 1.0;  // reading starts at the title
    d.burr = {11.7, 62.5, 0.04};

    GazeDynamics highlight = apply_visual_aid_effect(d, case_study_effect());
    d.transition.push_back(highlight.transition[0]);
    d.sojourn.push_back(highlight.sojourn[0]);
    d.aid_names.push_back("aY");
    d.validate();
    return d;
}

GazeDynamics single_aid(const GazeDynamics& dynamics, int aid) {
    if (aid < 0 || aid >= dynamics.num_aids())
        throw std::invalid_argument("aid id out of range");
    GazeDynamics out = dynamics;
    out.transition = {dynamics.transition[aid]};
    out.sojourn = {dynamics.sojourn[aid]};
    out.aid_names = {dynamics.aid_names.empty() ? std::string("a0") : dynamics.aid_names[aid]};
    return out;
}

AttentionConfig default_attention() { return {3.0, 2, QuantizerKind::Binary, 5.56, -30.0, 60.0}; }

LearningParams default_learning() {
    // kappa above the struct default keeps exploration alive long enough for
    // both (state, aid) columns to settle within one population run
    return {0.9, 10.0, {EpsilonSchedule::Kind::InverseStage, 150.0, 0.999}};
}

JudgmentModel default_judgment() {
    // intercept calibrated against the shipped no-aid dynamics (target 0.746)
    return {0.625, 0.15, 2.0, 1.0};
}

ExperimentConfig case_study_config() {
    ExperimentConfig cfg;
    cfg.dynamics = case_study_dynamics();
    cfg.scores = benchmark_scores();
    cfg.attention = default_attention();
    cfg.learning = default_learning();
    cfg.judgment = default_judgment();
    cfg.emails_per_stage = 100;
    cfg.repeats = 20;
    cfg.total_stages = 60;
    cfg.initial_stages = 10;
    cfg.master_seed = 1;
    cfg.box.lower = Eigen::Vector2d(1.0, 60.0);
    cfg.box.upper = Eigen::Vector2d(33.0, 600.0);
    return cfg;
}

}  // namespace attnsim::fixtures
