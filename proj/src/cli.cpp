#include "attnsim/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attnsim/fixtures.hpp"
#include "attnsim/io.hpp"

namespace attnsim {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int repeats = 0;  // 0 = take from config
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Config file (JSON); defaults are built in");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--seed", o.seed, "Master seed override")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--repeats", o.repeats, "Repeats per evaluation override");
}

ExperimentConfig resolve_config(const CommonOpts& o) {
    ExperimentConfig cfg = fixtures::case_study_config();
    if (!o.config_path.empty()) cfg = io::load_config_file(o.config_path, cfg);
    if (o.seed_set) cfg.master_seed = o.seed;
    if (o.repeats > 0) cfg.repeats = o.repeats;
    return cfg;
}

std::ofstream open_out(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    fs::path p = fs::path(o.out_dir) / name;
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

Eigen::VectorXd parse_theta(const std::vector<double>& values) {
    Eigen::VectorXd theta(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) theta(i) = values[i];
    return theta;
}

int cmd_simulate(const CommonOpts& o, std::ostream& out) {
    ExperimentConfig cfg = resolve_config(o);
    Rng rng = Rng::from_stream(cfg.master_seed, 0x51);
    LearnerState state{QTable::zeros(cfg.attention.num_levels, cfg.dynamics.num_aids()), 0, 0};
    SessionResult sr = run_individual(cfg, std::move(state), Eigen::VectorXd(), rng, {0, 0});
    {
        auto f = open_out(o, "trajectory.csv");
        io::write_trajectory_csv(f, sr.trajectory);
    }
    {
        auto f = open_out(o, "cal.csv");
        io::write_cal_csv(f, sr.trajectory, cfg.scores, cfg.attention.period_length);
    }
    char line[160];
    std::snprintf(line, sizeof(line),
                  "inspection_s=%.3f stages=%d mean_aal=%.3f judgment=%s\n", sr.inspection_time,
                  sr.stages, sr.features.mean_aal, sr.correct ? "correct" : "wrong");
    out << line;
    return 0;
}

int cmd_learn(const CommonOpts& o, int emails, std::ostream& out) {
    ExperimentConfig cfg = resolve_config(o);
    if (emails > 0) cfg.emails_per_stage = emails;
    Rng rng = Rng::from_stream(cfg.master_seed, 0x1e);
    PopulationResult pr = run_population(cfg, Eigen::VectorXd(), rng);
    {
        auto f = open_out(o, "qcurve.csv");
        io::write_qcurve_csv(f, pr.curve);
    }
    {
        auto f = open_out(o, "qtable.json");
        f << io::qtable_json(pr.state.table).dump(2) << "\n";
    }
    {
        auto f = open_out(o, "records.csv");
        io::write_records_csv(f, pr.records);
    }
    char line[120];
    std::snprintf(line, sizeof(line), "accuracy=%.3f stages=%ld mean_aal=%.3f\n", pr.accuracy,
                  pr.total_stages, pr.mean_aal);
    out << line;
    return 0;
}

int cmd_tune(const CommonOpts& o, int stages, int initial, int emails, std::ostream& out) {
    ExperimentConfig cfg = resolve_config(o);
    if (stages > 0) cfg.total_stages = stages;
    if (initial > 0) cfg.initial_stages = initial;
    if (emails > 0) cfg.emails_per_stage = emails;
    Rng rng = Rng::from_stream(cfg.master_seed, 0xb0);
    RunReport report = run_tuning(cfg, rng);
    {
        auto f = open_out(o, "history.csv");
        io::write_history_csv(f, report);
    }
    {
        auto f = open_out(o, "summary.json");
        f << io::tuning_summary_json(report, cfg.total_stages, cfg.initial_stages).dump(2)
          << "\n";
    }
    if (cfg.box.dims() == 2) {
        auto f = open_out(o, "surface.csv");
        io::write_surface_csv(f, report.tuning.kernel, report.tuning.observations, cfg.box);
    }
    out << "theta_star=";
    for (int i = 0; i < report.tuning.theta_star.size(); ++i)
        out << (i ? "," : "") << io::format_number(report.tuning.theta_star(i));
    char line[48];
    std::snprintf(line, sizeof(line), " c_star=%.4f\n", report.tuning.best_value);
    out << line;
    return 0;
}

int cmd_fit_scores(const CommonOpts& o, int sessions, double noise, std::ostream& out) {
    ExperimentConfig cfg = resolve_config(o);
    Rng rng = Rng::from_stream(cfg.master_seed, 0xf1);
    GazeDynamics no_aid = fixtures::single_aid(cfg.dynamics, 0);

    std::vector<VsTrajectory> trajectories;
    std::vector<PupilTrace> traces;
    for (int i = 0; i < sessions; ++i) {
        double t = sample_inspection_time(no_aid, rng);
        VsTrajectory traj = simulate_session(
            no_aid, [](int) { return VisualAid{0}; }, t, cfg.attention.period_length, rng,
            {0, i});
        traces.push_back(synth_pupil_trace(traj, cfg.scores, noise, rng));
        trajectories.push_back(std::move(traj));
    }
    {
        auto f = open_out(o, "trace0.csv");
        io::write_pupil_csv(f, traces.front());
    }
    FitScoresResult fit = fit_scores(traces, trajectories, SaParams{}, ScoreBounds{}, rng);
    {
        auto f = open_out(o, "fitted_scores.json");
        f << io::dump_scores(fit.table, cfg.dynamics.num_aois).dump(2) << "\n";
    }
    char line[120];
    std::snprintf(line, sizeof(line), "mse=%.6f\n", fit.mse);
    out << line;
    for (int i = 0; i < fit.table.num_states(); ++i) {
        std::snprintf(line, sizeof(line), "%-4s score=%8.3f (ref %8.3f)  decay=%8.3f (ref %8.3f)\n",
                      state_name(state_at(i, cfg.dynamics.num_aois)).c_str(), fit.table.score(i),
                      cfg.scores.score(i), fit.table.decay(i), cfg.scores.decay(i));
        out << line;
    }
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::vector<double>& theta_values, std::ostream& out) {
    ExperimentConfig cfg = resolve_config(o);
    Eigen::VectorXd theta = parse_theta(theta_values);
    resolve_theta(cfg, theta);  // validate before spending time
    double sum = 0.0;
    for (int r = 0; r < cfg.repeats; ++r) {
        Rng rng = Rng::from_stream(cfg.master_seed, 0xe7a1, r);
        sum += run_population(cfg, theta, rng).accuracy;
    }
    char line[32];
    std::snprintf(line, sizeof(line), "%.3f\n", sum / cfg.repeats);
    out << line;
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaze-driven attention enhancement simulator"};
    app.require_subcommand(1);

    CommonOpts common;
    int emails = 0, stages = 0, initial = 0, sessions = 12;
    double noise = 0.0;
    std::vector<double> theta_values;

    CLI::App* simulate = app.add_subcommand("simulate", "One session: trajectory + CAL series");
    add_common(simulate, common);

    CLI::App* learn = app.add_subcommand("learn", "Population Q-learning run over N emails");
    add_common(learn, common);
    learn->add_option("--emails", emails, "Emails in the run");

    CLI::App* tune = app.add_subcommand("tune", "Bayesian-optimization hyperparameter tuning");
    add_common(tune, common);
    tune->add_option("--stages", stages, "Total tuning stages (L)");
    tune->add_option("--initial-stages", initial, "Uniform-design stages (L0)");
    tune->add_option("--emails", emails, "Emails per tuning stage");

    CLI::App* fit = app.add_subcommand("fit-scores", "Round-trip score fit from pupil traces");
    add_common(fit, common);
    fit->add_option("--sessions", sessions, "Sessions to synthesize");
    fit->add_option("--noise", noise, "Gaussian noise sd on the traces");

    CLI::App* eval = app.add_subcommand("eval", "Accuracy of a fixed hyperparameter");
    add_common(eval, common);
    eval->add_option("--theta", theta_values, "Hyperparameter vector (comma separated)")
        ->delimiter(',');

    CLI::App* init = app.add_subcommand("init-config", "Write the built-in config to --out");
    add_common(init, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(common, out);
        if (learn->parsed()) return cmd_learn(common, emails, out);
        if (tune->parsed()) return cmd_tune(common, stages, initial, emails, out);
        if (fit->parsed()) return cmd_fit_scores(common, sessions, noise, out);
        if (eval->parsed()) return cmd_eval(common, theta_values, out);
        if (init->parsed()) {
            fs::create_directories(common.out_dir);
            io::save_config_file((fs::path(common.out_dir) / "config.json").string(),
                                 resolve_config(common));
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace attnsim
