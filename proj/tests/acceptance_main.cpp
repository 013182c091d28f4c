// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Expected values that need an independent oracle are
// computed here (quadrature, explicit inversion, Monte Carlo), never through
// the code paths under test.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "attnsim/fixtures.hpp"
#include "attnsim/harness.hpp"
#include "support/oracles.hpp"

using namespace attnsim;

namespace {

int failures = 0;

double now_s() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct Timer {
    double t0 = now_s();
    double elapsed() const { return now_s() - t0; }
};

void report(int id, bool pass, const std::string& detail) {
    std::printf("[%2d] %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---- 1. baseline calibration ------------------------------------------------

void criterion_baseline() {
    Timer timer;
    GazeDynamics no_aid = fixtures::single_aid(fixtures::case_study_dynamics(), 0);
    ScoreTable scores = fixtures::benchmark_scores();
    Rng rng(42);
    JudgmentModel model =
        calibrate_baseline(fixtures::default_judgment(), 0.746, no_aid, scores, 3.0, 20000, rng);

    Rng fresh(43);
    const int sessions = 20000;
    long correct = 0;
    auto aid0 = [](int) { return VisualAid{0}; };
    for (int i = 0; i < sessions; ++i) {
        double t = sample_inspection_time(no_aid, fresh);
        VsTrajectory traj = simulate_session(no_aid, aid0, t, 3.0, fresh, {0, i});
        if (judge(model, extract_features(traj, scores, 3.0), fresh)) ++correct;
    }
    double acc = static_cast<double>(correct) / sessions;
    double secs = timer.elapsed();
    bool pass = std::abs(acc - 0.746) <= 0.02 && secs < 30.0;
    report(1, pass,
           fmt("baseline calibration: b0=%.4f, no-aid accuracy %.4f vs 0.746+-0.02 over 2e4 "
               "sessions (%.1f s < 30 s)",
               model.b0, acc, secs));
}

// ---- 2. attention-enhancement accuracy uplift -------------------------------

void criterion_uplift() {
    Timer timer;
    ExperimentConfig learned = fixtures::case_study_config();
    ExperimentConfig baseline = learned;
    baseline.dynamics = fixtures::single_aid(learned.dynamics, 0);

    const int seeds = 20;
    std::vector<double> diffs;
    for (int s = 0; s < seeds; ++s) {
        Rng r1 = Rng::from_stream(1001, s, 1);
        Rng r2 = Rng::from_stream(1001, s, 2);
        double a = run_population(learned, Eigen::VectorXd(), r1).accuracy;
        double b = run_population(baseline, Eigen::VectorXd(), r2).accuracy;
        diffs.push_back(a - b);
    }
    double mean = oracles::mean(diffs);
    double lcb = mean - 1.7291 * oracles::sample_sd(diffs) / std::sqrt(20.0);  // t(0.95, 19)
    double secs = timer.elapsed();
    bool pass = lcb >= 0.05 && secs < 120.0;
    report(2, pass,
           fmt("accuracy uplift of the learned policy: mean %+.3f, 95%% lower bound %+.3f "
               "(need >= +0.05; 20 seeds x 100 emails, %.1f s < 120 s)",
               mean, lcb, secs));
}

// ---- 3. q-learning fixed point ----------------------------------------------

void criterion_fixed_point() {
    Timer timer;
    LearningParams params{0.9, 50.0, {}};
    QTable table = QTable::zeros(1, 1);
    for (int k = 0; k < 10000; ++k) {
        table.visits(0, 0) += 1;
        q_update(table, 0, 0, 3.0, 0, params);
    }
    double target = 3.0 / (1.0 - 0.9);
    double err = std::abs(table.q(0, 0) - target);
    double secs = timer.elapsed();
    bool pass = err < 1e-3 && secs < 1.0;
    report(3, pass,
           fmt("q-learning fixed point: |q - r/(1-beta)| = %.2e after 1e4 updates, eta0=50 "
               "(need < 1e-3; %.2f s < 1 s)",
               err, secs));
}

// ---- 4. learned preference for the highlight aid ----------------------------

void criterion_q_pattern() {
    Timer timer;
    ExperimentConfig cfg = fixtures::case_study_config();
    cfg.emails_per_stage = 300;  // ~1800 stages, enough to call it converged
    const int seeds = 20;
    int good = 0;
    for (int s = 0; s < seeds; ++s) {
        Rng rng = Rng::from_stream(2002, s);
        PopulationResult pr = run_population(cfg, Eigen::VectorXd(), rng);
        const Eigen::MatrixXd& q = pr.state.table.q;
        if (q(0, 1) > q(0, 0) && q(1, 1) > q(1, 0)) ++good;
    }
    bool pass = good >= 18;
    report(4, pass,
           fmt("converged q prefers the highlight in both attention states: %d/20 seeds over "
               "300-email runs (need >= 18; %.1f s)",
               good, timer.elapsed()));
}

// ---- 5. gp posterior vs explicit inversion -----------------------------------

void criterion_gp_oracle() {
    Timer timer;
    Rng rng(3003);
    double worst = 0.0;
    for (int design = 0; design < 100; ++design) {
        int d = 1 + design % 3;
        int n = 1 + design % 8;
        Kernel kernel;
        kernel.mean0 = rng.uniform(-0.5, 0.5);
        kernel.amplitude = rng.uniform(0.05, 2.0);
        kernel.inv_lengthscale = Eigen::VectorXd(d);
        for (int i = 0; i < d; ++i) kernel.inv_lengthscale(i) = rng.uniform(0.5, 5.0);
        kernel.jitter = 1e-6;  // both solve routes share it; keeps either side of
                               // the comparison away from raw conditioning noise

        // jittered strata in the first coordinate keep designs well separated
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);
        std::vector<Observation> obs(n);
        for (int i = 0; i < n; ++i) {
            obs[i].theta = Eigen::VectorXd(d);
            obs[i].theta(0) = (order[i] + 0.2 + 0.6 * rng.uniform01()) / n;
            for (int k = 1; k < d; ++k) obs[i].theta(k) = rng.uniform01();
            obs[i].value = rng.uniform01();
        }

        Eigen::MatrixXd gram = gram_matrix(kernel, obs) +
                               kernel.jitter * Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd inv = gram.inverse();
        GpPosterior posterior(kernel, obs);
        for (int probe = 0; probe < 5; ++probe) {
            Eigen::VectorXd theta(d);
            for (int i = 0; i < d; ++i) theta(i) = rng.uniform01();
            Eigen::VectorXd kstar(n), resid(n);
            for (int i = 0; i < n; ++i) {
                kstar(i) = kernel_eval(kernel, theta, obs[i].theta);
                resid(i) = obs[i].value - kernel.mean0;
            }
            double omean = kernel.mean0 + kstar.dot(inv * resid);
            double ovar =
                std::max(kernel_eval(kernel, theta, theta) - kstar.dot(inv * kstar), 0.0);
            auto [mean, sd] = posterior.predict(theta);
            worst = std::max(worst, std::abs(mean - omean));
            worst = std::max(worst, std::abs(sd * sd - ovar));
        }
    }
    double secs = timer.elapsed();
    bool pass = worst < 1e-8 && secs < 5.0;
    report(5, pass,
           fmt("gp posterior vs explicit-inversion oracle: max |delta| = %.2e over 100 designs "
               "(need < 1e-8; %.2f s < 5 s)",
               worst, secs));
}

// ---- 6. expected improvement vs monte carlo -----------------------------------

void criterion_ei() {
    Timer timer;
    Rng rng(4004);
    int within = 0;
    bool nonneg = true;
    const int draws = 1000000;
    for (int trial = 0; trial < 100; ++trial) {
        double mean = rng.uniform(-1.0, 1.0);
        double sd = trial % 10 == 0 ? 0.0 : rng.uniform(0.01, 1.5);
        double incumbent = rng.uniform(-1.0, 1.0);
        double closed = expected_improvement(mean, sd, incumbent);
        if (closed < 0.0) nonneg = false;
        if (sd == 0.0) {
            if (closed == std::max(mean - incumbent, 0.0)) ++within;
            continue;
        }
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < draws; ++i) {
            double v = std::max(rng.normal(mean, sd) - incumbent, 0.0);
            sum += v;
            sum_sq += v * v;
        }
        double mc = sum / draws;
        double se = std::sqrt(std::max(sum_sq / draws - mc * mc, 0.0) / draws);
        if (std::abs(closed - mc) <= 3.0 * se + 1e-12) ++within;
    }
    double secs = timer.elapsed();
    bool pass = within == 100 && nonneg && secs < 30.0;
    report(6, pass,
           fmt("expected improvement vs 1e6-draw Monte Carlo: %d/100 triples within 3 SE, "
               "EI >= 0 %s (%.1f s < 30 s)",
               within, nonneg ? "always" : "VIOLATED", secs));
}

// ---- 7. bo efficiency on a known surrogate ------------------------------------

void criterion_bo_efficiency() {
    Timer timer;
    HyperBox box;
    box.lower = Eigen::Vector2d(0.0, 0.0);
    box.upper = Eigen::Vector2d(1.0, 1.0);
    const Eigen::Vector2d opt(0.3, 0.7);
    auto bowl = [&](const Eigen::VectorXd& theta) {
        return 0.95 - 0.4 * (theta - opt).squaredNorm();
    };
    TuneParams params;
    params.total_stages = 50;
    params.initial_stages = 10;

    int good = 0;
    bool monotone = true;
    for (int seed = 0; seed < 20; ++seed) {
        Rng rng(5005 + seed);
        TuneResult r = tune(bowl, box, params, rng);
        double prev = -1.0;
        for (const TuneRecord& rec : r.history) {
            if (rec.incumbent < prev) monotone = false;
            prev = rec.incumbent;
        }
        double inc_l0 = r.history[params.initial_stages - 1].incumbent;
        double inc_5 = r.history[params.initial_stages + 4].incumbent;
        double inc_end = r.history.back().incumbent;
        bool near_opt = std::abs(inc_end - 0.95) <= 0.01;
        bool front_loaded = (inc_5 - inc_l0) >= 0.5 * (inc_end - inc_l0);
        if (near_opt && front_loaded) ++good;
    }
    double secs = timer.elapsed();
    bool pass = good >= 18 && monotone && secs < 120.0;
    report(7, pass,
           fmt("bo efficiency on the 0.95-optimum bowl: %d/20 seeds within 0.01 by stage 50 "
               "with front-loaded improvement, incumbents monotone %s (%.1f s < 120 s)",
               good, monotone ? "in every run" : "VIOLATED", secs));
}

// ---- 8. closed-form stage reward vs quadrature ---------------------------------

void criterion_cal() {
    Timer timer;
    Rng rng(6006);
    ScoreTable table;
    table.score.resize(3);
    table.decay.resize(3);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double r = rng.uniform(0.05, 50.0);
        double a = rng.uniform(0.01, 20.0);
        double t = rng.uniform(1e-3, 10.0);
        table.score.setConstant(r);
        table.decay.setConstant(a);
        double closed = stage_reward(table, VisualState::Aoi(1), t);
        double quad = oracles::integrate(
            [&](double tau) { return r * std::exp(-a * tau); }, 0.0, t, 1e-13);
        worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
    }
    double secs = timer.elapsed();
    bool pass = worst < 1e-9 && secs < 5.0;
    report(8, pass,
           fmt("stage reward vs adaptive quadrature: max relative error %.2e over 1000 triples "
               "(need < 1e-9; %.1f s < 5 s)",
               worst, secs));
}

// ---- 9. statistical fidelity ----------------------------------------------------

void criterion_statistical() {
    Timer timer;
    GazeDynamics dynamics = fixtures::case_study_dynamics();
    const int n = 100000;

    int ks_ok = 0;
    double pooled_sum = 0.0;
    long pooled_n = 0;
    for (int seed = 0; seed < 20; ++seed) {
        Rng rng = Rng::from_stream(7007, seed);
        std::vector<double> samples(n);
        for (double& s : samples) s = sample_inspection_time(dynamics, rng);
        for (double s : samples) pooled_sum += s;
        pooled_n += n;
        double p = oracles::ks_pvalue(samples, [&](double t) { return burr_cdf(dynamics.burr, t); });
        if (p > 0.01) ++ks_ok;
    }
    double emp_mean = pooled_sum / static_cast<double>(pooled_n);
    bool mean_ok = std::abs(emp_mean - 18.7) <= 0.02 * 18.7;

    int rows_ok = 0, rows_total = 0;
    Rng chi_rng(7010);
    for (int aid = 0; aid < dynamics.num_aids(); ++aid) {
        for (int row = 0; row < dynamics.num_states(); ++row) {
            std::vector<long> counts(dynamics.num_states(), 0);
            VisualState from = state_at(row, dynamics.num_aois);
            for (int i = 0; i < n; ++i)
                counts[state_index(step_semi_markov(dynamics, from, {aid}, chi_rng).first,
                                   dynamics.num_aois)] += 1;
            std::vector<double> probs(dynamics.num_states());
            for (int j = 0; j < dynamics.num_states(); ++j)
                probs[j] = dynamics.transition[aid](row, j);
            ++rows_total;
            if (oracles::chi2_gof_pvalue(counts, probs) > 0.01) ++rows_ok;
        }
    }

    double secs = timer.elapsed();
    bool pass = ks_ok >= 19 && mean_ok && rows_ok == rows_total;
    report(9, pass,
           fmt("statistical fidelity: KS p>0.01 in %d/20 seeds (need >= 19); chi-square %d/%d "
               "rows ok; empirical mean %.3f s vs 18.7+-2%% -> %s (exact Burr(11.7,62.5,0.04) "
               "mean is 19.488 s, so this clause cannot hold; %.1f s)",
               ks_ok, rows_ok, rows_total, emp_mean, mean_ok ? "ok" : "FAIL", secs));
}

// ---- 10. score-fitting round trip ------------------------------------------------

void criterion_fit_round_trip() {
    Timer timer;
    ScoreTable truth = fixtures::benchmark_scores();
    GazeDynamics no_aid = fixtures::single_aid(fixtures::case_study_dynamics(), 0);
    Rng rng(8008);
    std::vector<VsTrajectory> trajectories;
    std::vector<PupilTrace> traces;
    for (int i = 0; i < 12; ++i) {
        double t = sample_inspection_time(no_aid, rng);
        VsTrajectory traj = simulate_session(
            no_aid, [](int) { return VisualAid{0}; }, t, 3.0, rng, {0, i});
        traces.push_back(synth_pupil_trace(traj, truth, 0.0, rng));
        trajectories.push_back(std::move(traj));
    }
    Rng fit_rng(8009);
    FitScoresResult fit =
        fit_scores(traces, trajectories, SaParams{}, ScoreBounds{}, fit_rng);
    double r_err = std::abs(fit.table.score(4) - 21.05) / 21.05;
    double a_err = std::abs(fit.table.decay(4) - 0.16) / 0.16;
    double secs = timer.elapsed();
    bool pass = r_err <= 0.10 && a_err <= 0.20 && secs < 60.0;
    report(10, pass,
           fmt("score-fit round trip: content score %.2f (err %.1f%%, need <= 10%%), decay %.3f "
               "(err %.1f%%, need <= 20%%) (%.1f s < 60 s)",
               fit.table.score(4), 100.0 * r_err, fit.table.decay(4), 100.0 * a_err, secs));
}

}  // namespace

int main() {
    std::printf("acceptance suite: case-study configuration\n");
    criterion_baseline();
    criterion_uplift();
    criterion_fixed_point();
    criterion_q_pattern();
    criterion_gp_oracle();
    criterion_ei();
    criterion_bo_efficiency();
    criterion_cal();
    criterion_statistical();
    criterion_fit_round_trip();
    if (failures > 0)
        std::printf("%d of 10 criteria failed\n", failures);
    else
        std::printf("all 10 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
