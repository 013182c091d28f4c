#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "attnsim/fixtures.hpp"
#include "attnsim/gaze.hpp"
#include "support/oracles.hpp"

using namespace attnsim;

namespace {

GazeDynamics tiny_dynamics(int num_aois, const Eigen::MatrixXd& p, const Eigen::VectorXd& phi) {
    GazeDynamics d;
    d.num_aois = num_aois;
    d.aid_names = {"a0"};
    d.transition = {p};
    d.sojourn = {phi};
    d.initial = Eigen::VectorXd::Zero(num_aois + 2);
    d.initial(0) = 1.0;
    return d;
}

}  // namespace

TEST_CASE("state indexing round-trips and names are stable") {
    const int aois = 13;
    for (int i = 0; i < aois + 2; ++i) {
        VisualState s = state_at(i, aois);
        CHECK(state_index(s, aois) == i);
        CHECK(parse_state(state_name(s), aois).value() == s);
    }
    CHECK(state_name(VisualState::Aoi(5)) == "s5");
    CHECK(state_name(VisualState::Uninformative()) == "ua");
    CHECK(state_name(VisualState::Distraction()) == "da");
    CHECK(!parse_state("s14", 13).has_value());
    CHECK_THROWS_AS(state_index(VisualState::Aoi(0), 13), std::invalid_argument);
}

TEST_CASE("burr cdf closed form") {
    BurrParams p{11.7, 62.5, 0.04};
    // F(rho1) = 1 - 2^(-rho3), evaluated directly
    double expected = 1.0 - std::pow(2.0, -0.04);
    CHECK(burr_cdf(p, 11.7) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(burr_cdf(p, 0.0) == 0.0);
}

TEST_CASE("inspection time sampler matches the distribution") {
    GazeDynamics d = fixtures::case_study_dynamics();
    Rng rng(7);
    const int n = 1000000;
    double sum = 0.0;
    double min_t = 1e300;
    for (int i = 0; i < n; ++i) {
        double t = sample_inspection_time(d, rng);
        sum += t;
        min_t = std::min(min_t, t);
    }
    CHECK(min_t > 0.0);

    // oracle: E[T] = integral of the survival function
    BurrParams p = d.burr;
    auto survival = [&](double t) { return 1.0 - burr_cdf(p, t); };
    double tail_start = 2e4;
    double model_mean = oracles::integrate(survival, 0.0, tail_start, 1e-10);
    // tail: (t/rho1)^(-rho2 rho3) integrated from tail_start
    double k = p.rho2 * p.rho3;
    model_mean += std::pow(p.rho1, k) * std::pow(tail_start, 1.0 - k) / (k - 1.0);
    CHECK(model_mean == doctest::Approx(19.488).epsilon(0.001));
    CHECK(sum / n == doctest::Approx(model_mean).epsilon(0.02));
}

TEST_CASE("burr sampler passes a KS test against the closed-form cdf") {
    GazeDynamics d = fixtures::case_study_dynamics();
    Rng rng(11);
    std::vector<double> samples(20000);
    for (double& s : samples) s = sample_inspection_time(d, rng);
    double p = oracles::ks_pvalue(samples, [&](double t) { return burr_cdf(d.burr, t); });
    CHECK(p > 0.01);
}

TEST_CASE("semi-markov step: degenerate row is deterministic") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
    p(0, 3) = 1.0;  // title -> distraction, always
    p(1, 0) = 1.0;
    p(2, 0) = 1.0;
    p(3, 0) = 1.0;
    Eigen::VectorXd phi = Eigen::VectorXd::Constant(4, 1.0);
    GazeDynamics d = tiny_dynamics(2, p, phi);
    d.validate();
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        auto [next, sojourn] = step_semi_markov(d, VisualState::Aoi(1), {0}, rng);
        CHECK(next == VisualState::Distraction());
        CHECK(sojourn > 0.0);
    }
}

TEST_CASE("semi-markov step: exponential sojourn has the configured mean") {
    Eigen::MatrixXd p(3, 3);
    p << 0.0, 0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    Eigen::VectorXd phi(3);
    phi << 2.0, 1.0, 1.0;
    GazeDynamics d = tiny_dynamics(1, p, phi);
    Rng rng(5);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += step_semi_markov(d, VisualState::Aoi(1), {0}, rng).second;
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("semi-markov step: next-state frequencies pass a chi-square test") {
    Eigen::MatrixXd p(4, 4);
    p << 0.0, 0.2, 0.5, 0.3,
         0.6, 0.0, 0.25, 0.15,
         0.5, 0.5, 0.0, 0.0,
         0.9, 0.05, 0.05, 0.0;
    Eigen::VectorXd phi = Eigen::VectorXd::Constant(4, 1.0);
    GazeDynamics d = tiny_dynamics(2, p, phi);
    d.validate();
    Rng rng(17);
    const int n = 100000;
    for (int row = 0; row < 4; ++row) {
        std::vector<long> counts(4, 0);
        VisualState from = state_at(row, 2);
        for (int i = 0; i < n; ++i)
            counts[state_index(step_semi_markov(d, from, {0}, rng).first, 2)] += 1;
        std::vector<double> probs(4);
        for (int j = 0; j < 4; ++j) probs[j] = p(row, j);
        CHECK(oracles::chi2_gof_pvalue(counts, probs) > 0.01);
    }
}

TEST_CASE("simulate_session consults the schedule once per generation stage") {
    GazeDynamics d = fixtures::case_study_dynamics();
    Rng rng(23);
    std::vector<int> consulted;
    auto schedule = [&](int k) {
        consulted.push_back(k);
        return VisualAid{k % 2};
    };
    VsTrajectory traj = simulate_session(d, schedule, 12.0, 3.0, rng);
    CHECK(consulted == std::vector<int>{0, 1, 2, 3});
    CHECK(traj.span() == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("simulate_session truncates a first sojourn longer than the session") {
    Eigen::MatrixXd p(3, 3);
    p << 0.0, 0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
    Eigen::VectorXd phi(3);
    phi << 1e9, 1.0, 1.0;  // effectively never leaves the first state
    GazeDynamics d = tiny_dynamics(1, p, phi);
    Rng rng(1);
    VsTrajectory traj = simulate_session(d, [](int) { return VisualAid{0}; }, 2.5, 10.0, rng);
    REQUIRE(traj.segments.size() == 1);
    CHECK(traj.segments[0].state == VisualState::Aoi(1));
    CHECK(traj.segments[0].start == 0.0);
    CHECK(traj.segments[0].duration == doctest::Approx(2.5));
}

TEST_CASE("simulate_session produces canonical contiguous segments") {
    GazeDynamics d = fixtures::case_study_dynamics();
    Rng rng(29);
    VsTrajectory traj =
        simulate_session(d, [](int k) { return VisualAid{k % 2}; }, 30.0, 3.0, rng);
    REQUIRE(!traj.segments.empty());
    CHECK(traj.segments.front().start == 0.0);
    for (std::size_t i = 0; i < traj.segments.size(); ++i) {
        CHECK(traj.segments[i].duration > 0.0);
        if (i > 0) {
            CHECK(traj.segments[i].state != traj.segments[i - 1].state);
            double prev_end = traj.segments[i - 1].start + traj.segments[i - 1].duration;
            CHECK(traj.segments[i].start == doctest::Approx(prev_end).epsilon(1e-9));
        }
    }
    // interior stage windows are fully covered
    for (int k = 0; k + 1 < 10; ++k) {
        auto segs = clip_segments(traj, 3.0 * k, 3.0 * (k + 1));
        double total = 0.0;
        for (const auto& s : segs) total += s.duration;
        CHECK(total == doctest::Approx(3.0).epsilon(1e-9));
    }
}

TEST_CASE("simulate_session is bit-reproducible for a fixed seed") {
    GazeDynamics d = fixtures::case_study_dynamics();
    auto run = [&] {
        Rng rng(123456);
        return simulate_session(d, [](int k) { return VisualAid{(k / 2) % 2}; }, 25.0, 3.0, rng);
    };
    VsTrajectory a = run(), b = run();
    REQUIRE(a.segments.size() == b.segments.size());
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        CHECK(a.segments[i].state == b.segments[i].state);
        CHECK(a.segments[i].start == b.segments[i].start);      // exact
        CHECK(a.segments[i].duration == b.segments[i].duration);
    }
}

TEST_CASE("visual aid effect: identity and annihilation") {
    GazeDynamics base = fixtures::single_aid(fixtures::case_study_dynamics(), 0);

    GazeDynamics same = apply_visual_aid_effect(base, {1.0, 1.0, 5});
    CHECK((same.transition[0] - base.transition[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((same.sojourn[0] - base.sojourn[0]).cwiseAbs().maxCoeff() == 0.0);

    GazeDynamics damped = apply_visual_aid_effect(base, {0.0, 1.0, 5});
    const int ua = base.num_aois, da = base.num_aois + 1;
    for (int i = 0; i < base.num_states(); ++i) {
        CHECK(damped.transition[0](i, ua) == 0.0);
        CHECK(damped.transition[0](i, da) == 0.0);
    }
    damped.validate();
}

TEST_CASE("visual aid effect: hand-checked renormalization") {
    // row from s1: half the mass on AoIs, 0.3 on ua, 0.2 on da
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
    p.row(0) << 0.0, 0.5, 0.3, 0.2;
    p.row(1) << 1.0, 0.0, 0.0, 0.0;
    p.row(2) << 0.5, 0.5, 0.0, 0.0;
    p.row(3) << 0.5, 0.5, 0.0, 0.0;
    Eigen::VectorXd phi = Eigen::VectorXd::Constant(4, 1.0);
    GazeDynamics d = tiny_dynamics(2, p, phi);
    GazeDynamics out = apply_visual_aid_effect(d, {0.5, 1.0, 5});
    // (0.5, 0.15, 0.10) / 0.75
    CHECK(out.transition[0](0, 1) == doctest::Approx(0.5 / 0.75).epsilon(1e-12));
    CHECK(out.transition[0](0, 2) == doctest::Approx(0.15 / 0.75).epsilon(1e-12));
    CHECK(out.transition[0](0, 3) == doctest::Approx(0.10 / 0.75).epsilon(1e-12));
}

TEST_CASE("visual aid effect: a row stranded on ua/da spreads over the AoIs") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(5, 5);
    p.row(0) << 0.0, 0.0, 0.0, 0.6, 0.4;  // all mass on ua/da
    for (int i = 1; i < 5; ++i) p(i, 0) = 1.0;
    Eigen::VectorXd phi = Eigen::VectorXd::Constant(5, 1.0);
    GazeDynamics d = tiny_dynamics(3, p, phi);
    GazeDynamics out = apply_visual_aid_effect(d, {0.0, 1.0, 5});
    CHECK(out.transition[0](0, 0) == 0.0);  // diagonal stays empty
    CHECK(out.transition[0](0, 1) == doctest::Approx(0.5));
    CHECK(out.transition[0](0, 2) == doctest::Approx(0.5));
    CHECK(out.transition[0](0, 3) == 0.0);
    CHECK(out.transition[0](0, 4) == 0.0);
}

TEST_CASE("visual aid effect scales only the content sojourn") {
    GazeDynamics base = fixtures::single_aid(fixtures::case_study_dynamics(), 0);
    GazeDynamics out = apply_visual_aid_effect(base, {1.0, 0.6, 5});
    for (int i = 0; i < base.num_states(); ++i) {
        double expected = base.sojourn[0](i) * (i == 4 ? 0.6 : 1.0);
        CHECK(out.sojourn[0](i) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("estimate_dynamics recovers a deterministic alternation") {
    VsTrajectory traj;
    traj.segments = {{VisualState::Aoi(1), 0.0, 1.0},
                     {VisualState::Aoi(2), 1.0, 1.0},
                     {VisualState::Aoi(1), 2.0, 1.0},
                     {VisualState::Aoi(2), 3.0, 1.0}};
    GazeDynamics est = estimate_dynamics({traj}, 2);
    CHECK(est.transition[0](0, 1) == 1.0);
    CHECK(est.transition[0](1, 0) == 1.0);
    CHECK(est.sojourn[0](0) == doctest::Approx(1.0));
    CHECK(est.sojourn[0](1) == doctest::Approx(1.0));
    CHECK(est.initial(0) == 1.0);
}

TEST_CASE("estimate_dynamics empty input errors") {
    CHECK_THROWS_AS(estimate_dynamics({}, 2), std::invalid_argument);
}

TEST_CASE("estimate_dynamics round-trips the generator at n = 1e5 steps") {
    Eigen::MatrixXd p(4, 4);
    p << 0.0, 0.3, 0.45, 0.25,
         0.55, 0.0, 0.2, 0.25,
         0.6, 0.25, 0.0, 0.15,
         0.35, 0.3, 0.35, 0.0;
    Eigen::VectorXd phi(4);
    phi << 0.8, 1.5, 0.6, 2.0;
    GazeDynamics truth = tiny_dynamics(2, p, phi);
    truth.validate();

    Rng rng(101);
    // one long session; ~1e5 transitions given the mean sojourn
    double total = 120000.0;
    VsTrajectory traj =
        simulate_session(truth, [](int) { return VisualAid{0}; }, total, total, rng);
    REQUIRE(traj.segments.size() > 80000);
    GazeDynamics est = estimate_dynamics({traj}, 2);
    CHECK((est.transition[0] - p).cwiseAbs().maxCoeff() < 0.01);
    for (int i = 0; i < 4; ++i)
        CHECK(est.sojourn[0](i) == doctest::Approx(phi(i)).epsilon(0.03));
}

TEST_CASE("estimate_dynamics: unobserved row falls back to uniform and is reported") {
    // states: s1..s3 + ua + da, never visit s3 (index 2)
    VsTrajectory traj;
    traj.segments = {{VisualState::Aoi(1), 0.0, 1.0},
                     {VisualState::Uninformative(), 1.0, 0.5},
                     {VisualState::Aoi(2), 1.5, 2.0},
                     {VisualState::Distraction(), 3.5, 1.0},
                     {VisualState::Aoi(1), 4.5, 1.0}};
    EstimateDiagnostics diag;
    GazeDynamics est = estimate_dynamics({traj}, 3, &diag);
    int missing = 2;
    CHECK(est.transition[0](missing, missing) == 0.0);
    for (int j = 0; j < 5; ++j)
        if (j != missing) CHECK(est.transition[0](missing, j) == doctest::Approx(0.25));
    bool reported = false;
    for (auto [aid, state] : diag.zero_observation_rows)
        if (aid == 0 && state == missing) reported = true;
    CHECK(reported);
}

TEST_CASE("case-study dynamics satisfy all invariants") {
    GazeDynamics d = fixtures::case_study_dynamics();
    d.validate();
    CHECK(d.num_aids() == 2);
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < d.num_states(); ++i) {
            CHECK(d.transition[a](i, i) == 0.0);
            CHECK(std::abs(d.transition[a].row(i).sum() - 1.0) < 1e-12);
        }
    // the highlight damps ua/da transitions and shortens the content dwell
    const int ua = d.num_aois, da = d.num_aois + 1;
    for (int i = 0; i < d.num_states(); ++i) {
        if (i != ua) CHECK(d.transition[1](i, ua) < d.transition[0](i, ua));
        if (i != da) CHECK(d.transition[1](i, da) < d.transition[0](i, da));
    }
    CHECK(d.sojourn[1](4) < d.sojourn[0](4));
}

TEST_CASE("dynamics validation rejects broken inputs") {
    GazeDynamics d = fixtures::case_study_dynamics();
    GazeDynamics bad = d;
    bad.transition[0](0, 0) += 0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = d;
    bad.sojourn[0](3) = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = d;
    bad.initial(0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
