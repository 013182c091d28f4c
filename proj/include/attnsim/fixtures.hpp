#pragma once

#include "attnsim/attention.hpp"
#include "attnsim/gaze.hpp"
#include "attnsim/harness.hpp"
#include "attnsim/judgment.hpp"
#include "attnsim/policy.hpp"

namespace attnsim::fixtures {

/// Benchmark concentration scores / decay rates for the 13 email AoIs; the
/// uninformative and distraction states score 0 with unit decay.
ScoreTable benchmark_scores();

/// Synthetic case-study dynamics over 13 AoIs: content-heavy transition rows,
/// an uninformative<->distraction loop, and a binary aid library {aN, aY}
/// where aY damps transitions into ua/da and shortens the content sojourn.
GazeDynamics case_study_dynamics();

/// The aY effect used to derive the case-study highlight dynamics.
VisualAidEffect case_study_effect();

/// Dynamics restricted to a single aid (library of one), e.g. the no-aid
/// baseline arm.
GazeDynamics single_aid(const GazeDynamics& dynamics, int aid);

AttentionConfig default_attention();
LearningParams default_learning();

/// Judgment oracle with the intercept pre-calibrated so the shipped no-aid
/// configuration scores ~0.746.
JudgmentModel default_judgment();

ExperimentConfig case_study_config();

}  // namespace attnsim::fixtures
