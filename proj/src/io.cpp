#include "attnsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace attnsim::io {

namespace {

Eigen::MatrixXd matrix_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw std::invalid_argument("expected a matrix");
    const auto nr = rows.size();
    const auto nc = rows.front().size();
    Eigen::MatrixXd m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i) {
        if (rows[i].size() != nc) throw std::invalid_argument("ragged matrix rows");
        for (std::size_t j = 0; j < nc; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    if (!arr.is_array()) throw std::invalid_argument("expected an array");
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer the shortest representation that still round-trips
    for (int prec = 1; prec <= 16; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double parsed = 0.0;
        std::sscanf(shorter, "%lf", &parsed);
        if (parsed == v) return shorter;
    }
    return buf;
}

json dump_gaze(const GazeDynamics& dynamics) {
    json j;
    j["num_aois"] = dynamics.num_aois;
    j["aids"] = dynamics.aid_names;
    for (int a = 0; a < dynamics.num_aids(); ++a) {
        const std::string& name = dynamics.aid_names.at(a);
        j["transition"][name] = matrix_to_json(dynamics.transition[a]);
        j["sojourn"][name] = vector_to_json(dynamics.sojourn[a]);
    }
    j["initial"] = vector_to_json(dynamics.initial);
    j["burr"] = {dynamics.burr.rho1, dynamics.burr.rho2, dynamics.burr.rho3};
    return j;
}

GazeDynamics load_gaze(const json& j, const GazeDynamics& defaults) {
    GazeDynamics d = defaults;
    if (j.contains("num_aois")) d.num_aois = j.at("num_aois").get<int>();
    if (j.contains("aids")) d.aid_names = j.at("aids").get<std::vector<std::string>>();
    if (j.contains("burr")) {
        auto b = j.at("burr");
        d.burr = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>()};
    }
    if (j.contains("initial")) d.initial = vector_from_json(j.at("initial"));
    if (j.contains("transition") || j.contains("sojourn")) {
        d.transition.clear();
        d.sojourn.clear();
        VisualAidEffect effect;
        bool have_effect = j.contains("effect");
        if (have_effect) {
            const json& e = j.at("effect");
            effect.distraction_damping = e.value("distraction_damping", effect.distraction_damping);
            effect.content_sojourn_scale =
                e.value("content_sojourn_scale", effect.content_sojourn_scale);
            effect.content_aoi = e.value("content_aoi", effect.content_aoi);
        }
        for (const std::string& name : d.aid_names) {
            bool have_p = j.contains("transition") && j.at("transition").contains(name);
            bool have_s = j.contains("sojourn") && j.at("sojourn").contains(name);
            if (have_p != have_s)
                throw std::invalid_argument("aid " + name + " needs both transition and sojourn");
            if (have_p) {
                d.transition.push_back(matrix_from_json(j.at("transition").at(name)));
                d.sojourn.push_back(vector_from_json(j.at("sojourn").at(name)));
            } else if (have_effect && !d.transition.empty()) {
                // derive this aid from aid 0 via the configured effect
                GazeDynamics base = d;
                base.transition = {d.transition.front()};
                base.sojourn = {d.sojourn.front()};
                base.aid_names = {d.aid_names.front()};
                GazeDynamics derived = apply_visual_aid_effect(base, effect);
                d.transition.push_back(derived.transition.front());
                d.sojourn.push_back(derived.sojourn.front());
            } else {
                throw std::invalid_argument("aid " + name +
                                            " has no transition data and no effect to derive it");
            }
        }
    }
    d.validate();
    return d;
}

json dump_scores(const ScoreTable& table, int num_aois) {
    json score, decay;
    for (int i = 0; i < table.num_states(); ++i) {
        std::string name = state_name(state_at(i, num_aois));
        score[name] = table.score(i);
        decay[name] = table.decay(i);
    }
    return json{{"score", score}, {"decay", decay}};
}

ScoreTable load_scores(const json& j, const ScoreTable& defaults) {
    ScoreTable t = defaults;
    const int num_aois = t.num_states() - 2;
    for (const char* key : {"score", "decay"}) {
        if (!j.contains(key)) continue;
        for (const auto& [name, value] : j.at(key).items()) {
            auto state = parse_state(name, num_aois);
            if (!state) throw std::invalid_argument("unknown state name: " + name);
            int idx = state_index(*state, num_aois);
            (key[0] == 's' ? t.score : t.decay)(idx) = value.get<double>();
        }
    }
    t.validate();
    return t;
}

json dump_attention(const AttentionConfig& config) {
    return json{{"period_length_s", config.period_length},
                {"levels", config.num_levels},
                {"quantizer", config.quantizer == QuantizerKind::Binary ? "binary" : "uniform"},
                {"threshold", config.threshold},
                {"v_min", config.v_min},
                {"v_max", config.v_max}};
}

AttentionConfig load_attention(const json& j, const AttentionConfig& defaults) {
    AttentionConfig c = defaults;
    c.period_length = j.value("period_length_s", c.period_length);
    c.num_levels = j.value("levels", c.num_levels);
    if (j.contains("quantizer")) {
        std::string q = j.at("quantizer").get<std::string>();
        if (q == "binary")
            c.quantizer = QuantizerKind::Binary;
        else if (q == "uniform")
            c.quantizer = QuantizerKind::Uniform;
        else
            throw std::invalid_argument("unknown quantizer: " + q);
    }
    c.threshold = j.value("threshold", c.threshold);
    c.v_min = j.value("v_min", c.v_min);
    c.v_max = j.value("v_max", c.v_max);
    c.validate();
    return c;
}

json dump_learning(const LearningParams& params) {
    json eps{{"kind", params.epsilon.kind == EpsilonSchedule::Kind::InverseStage
                          ? "inverse_stage"
                          : "exponential"},
             {"kappa", params.epsilon.kappa},
             {"decay", params.epsilon.decay}};
    return json{{"beta", params.beta}, {"eta0", params.eta0}, {"epsilon", eps}};
}

LearningParams load_learning(const json& j, const LearningParams& defaults) {
    LearningParams p = defaults;
    p.beta = j.value("beta", p.beta);
    p.eta0 = j.value("eta0", p.eta0);
    if (j.contains("epsilon")) {
        const json& e = j.at("epsilon");
        if (e.contains("kind")) {
            std::string k = e.at("kind").get<std::string>();
            if (k == "inverse_stage")
                p.epsilon.kind = EpsilonSchedule::Kind::InverseStage;
            else if (k == "exponential")
                p.epsilon.kind = EpsilonSchedule::Kind::Exponential;
            else
                throw std::invalid_argument("unknown epsilon schedule: " + k);
        }
        p.epsilon.kappa = e.value("kappa", p.epsilon.kappa);
        p.epsilon.decay = e.value("decay", p.epsilon.decay);
    }
    p.validate();
    return p;
}

json dump_judgment(const JudgmentModel& model) {
    return json{{"b0", model.b0}, {"b1", model.b1}, {"b2", model.b2}, {"b3", model.b3}};
}

JudgmentModel load_judgment(const json& j, const JudgmentModel& defaults) {
    JudgmentModel m = defaults;
    m.b0 = j.value("b0", m.b0);
    m.b1 = j.value("b1", m.b1);
    m.b2 = j.value("b2", m.b2);
    m.b3 = j.value("b3", m.b3);
    m.validate();
    return m;
}

json dump_config(const ExperimentConfig& config) {
    json j;
    j["gaze"] = dump_gaze(config.dynamics);
    j["scores"] = dump_scores(config.scores, config.dynamics.num_aois);
    j["attention"] = dump_attention(config.attention);
    j["learning"] = dump_learning(config.learning);
    j["judgment"] = dump_judgment(config.judgment);
    j["experiment"] = json{{"emails_per_stage", config.emails_per_stage},
                           {"repeats", config.repeats},
                           {"total_stages", config.total_stages},
                           {"initial_stages", config.initial_stages},
                           {"seed", config.master_seed},
                           {"box",
                            {{"lower", vector_to_json(config.box.lower)},
                             {"upper", vector_to_json(config.box.upper)}}}};
    return j;
}

ExperimentConfig load_config(const json& j, const ExperimentConfig& defaults) {
    ExperimentConfig c = defaults;
    if (j.contains("gaze")) c.dynamics = load_gaze(j.at("gaze"), defaults.dynamics);
    if (j.contains("scores")) c.scores = load_scores(j.at("scores"), defaults.scores);
    if (j.contains("attention"))
        c.attention = load_attention(j.at("attention"), defaults.attention);
    if (j.contains("learning")) c.learning = load_learning(j.at("learning"), defaults.learning);
    if (j.contains("judgment")) c.judgment = load_judgment(j.at("judgment"), defaults.judgment);
    if (j.contains("experiment")) {
        const json& e = j.at("experiment");
        c.emails_per_stage = e.value("emails_per_stage", c.emails_per_stage);
        c.repeats = e.value("repeats", c.repeats);
        c.total_stages = e.value("total_stages", c.total_stages);
        c.initial_stages = e.value("initial_stages", c.initial_stages);
        c.master_seed = e.value("seed", c.master_seed);
        if (e.contains("box")) {
            c.box.lower = vector_from_json(e.at("box").at("lower"));
            c.box.upper = vector_from_json(e.at("box").at("upper"));
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config_file(const std::string& path, const ExperimentConfig& defaults) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed config " + path + ": " + e.what());
    }
    return load_config(j, defaults);
}

void save_config_file(const std::string& path, const ExperimentConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write config file: " + path);
    out << dump_config(config).dump(2) << "\n";
}

void write_trajectory_csv(std::ostream& out, const VsTrajectory& trajectory) {
    out << "session_id,state,start_s,duration_s\n";
    std::string id = std::to_string(trajectory.session.user) + "-" +
                     std::to_string(trajectory.session.email);
    for (const TrajectorySegment& seg : trajectory.segments)
        out << id << ',' << state_name(seg.state) << ',' << format_number(seg.start) << ','
            << format_number(seg.duration) << '\n';
}

void write_cal_csv(std::ostream& out, const VsTrajectory& trajectory, const ScoreTable& table,
                   double period_length, double sample_hz) {
    out << "time_s,stage,cal\n";
    double span = trajectory.span();
    for (int k = 0; k * period_length < span - 1e-9; ++k) {
        double t0 = k * period_length;
        double t1 = std::min(t0 + period_length, span);
        auto segs = clip_segments(trajectory, t0, t1);
        for (long j = 0;; ++j) {
            double t = j / sample_hz;
            if (t > t1 - t0 + 1e-12) break;
            double v = cal(segs, table, std::min(t, t1 - t0));
            out << format_number(t0 + t) << ',' << k + 1 << ',' << format_number(v) << '\n';
        }
    }
}

void write_pupil_csv(std::ostream& out, const PupilTrace& trace) {
    out << "time_s,diameter\n";
    for (std::size_t i = 0; i < trace.time.size(); ++i)
        out << format_number(trace.time[i]) << ',' << format_number(trace.diameter[i]) << '\n';
}

void write_qcurve_csv(std::ostream& out, const std::vector<QCurveRow>& rows) {
    out << "stage,x,a,q_value\n";
    for (const QCurveRow& r : rows)
        out << r.stage << ',' << r.x << ',' << r.a << ',' << format_number(r.q) << '\n';
}

json qtable_json(const QTable& table) {
    json visits = json::array();
    for (int i = 0; i < table.num_states(); ++i) {
        json row = json::array();
        for (int a = 0; a < table.num_aids(); ++a) row.push_back(table.visits(i, a));
        visits.push_back(std::move(row));
    }
    return json{{"q", matrix_to_json(table.q)}, {"visits", visits}};
}

void write_records_csv(std::ostream& out, const std::vector<JudgmentRecord>& records) {
    int d = records.empty() ? 0 : static_cast<int>(records.front().theta.size());
    out << "session_id,z";
    for (int i = 0; i < d; ++i) out << ",theta" << i + 1;
    out << '\n';
    for (const JudgmentRecord& r : records) {
        out << r.session.user << '-' << r.session.email << ','
            << (r.correct ? "correct" : "wrong");
        for (int i = 0; i < d; ++i) out << ',' << format_number(r.theta(i));
        out << '\n';
    }
}

void write_history_csv(std::ostream& out, const RunReport& report) {
    const auto& history = report.tuning.history;
    int d = history.empty() ? 0 : static_cast<int>(history.front().theta.size());
    out << "stage";
    for (int i = 0; i < d; ++i) out << ",theta" << i + 1;
    out << ",value,incumbent\n";
    for (const TuneRecord& rec : history) {
        out << rec.stage;
        for (int i = 0; i < d; ++i) out << ',' << format_number(rec.theta(i));
        out << ',' << (rec.ok ? format_number(rec.value) : "nan") << ','
            << format_number(rec.incumbent) << '\n';
    }
}

json tuning_summary_json(const RunReport& report, int total_stages, int initial_stages) {
    return json{{"theta_star", vector_to_json(report.tuning.theta_star)},
                {"c_star", report.tuning.best_value},
                {"L", total_stages},
                {"L0", initial_stages}};
}

void write_surface_csv(std::ostream& out, const Kernel& kernel,
                       const std::vector<Observation>& observations, const HyperBox& box,
                       int grid_per_dim) {
    if (box.dims() != 2)
        throw std::invalid_argument("surface export is defined for 2-d boxes only");
    GpPosterior posterior(kernel, observations);
    out << "theta1,theta2,mean,sd\n";
    for (int i = 0; i < grid_per_dim; ++i) {
        for (int j = 0; j < grid_per_dim; ++j) {
            Eigen::Vector2d theta(
                box.lower(0) + (box.upper(0) - box.lower(0)) * i / (grid_per_dim - 1.0),
                box.lower(1) + (box.upper(1) - box.lower(1)) * j / (grid_per_dim - 1.0));
            auto [mean, sd] = posterior.predict(theta);
            out << format_number(theta(0)) << ',' << format_number(theta(1)) << ','
                << format_number(mean) << ',' << format_number(sd) << '\n';
        }
    }
}

}  // namespace attnsim::io
