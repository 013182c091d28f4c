#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "attnsim/harness.hpp"

namespace attnsim::io {

using nlohmann::json;

// config sections; loaders start from the passed defaults and override any
// keys present, so hand-written configs can stay partial
json dump_gaze(const GazeDynamics& dynamics);
GazeDynamics load_gaze(const json& j, const GazeDynamics& defaults);

json dump_scores(const ScoreTable& table, int num_aois);
ScoreTable load_scores(const json& j, const ScoreTable& defaults);

json dump_attention(const AttentionConfig& config);
AttentionConfig load_attention(const json& j, const AttentionConfig& defaults);

json dump_learning(const LearningParams& params);
LearningParams load_learning(const json& j, const LearningParams& defaults);

json dump_judgment(const JudgmentModel& model);
JudgmentModel load_judgment(const json& j, const JudgmentModel& defaults);

json dump_config(const ExperimentConfig& config);
ExperimentConfig load_config(const json& j, const ExperimentConfig& defaults);
ExperimentConfig load_config_file(const std::string& path, const ExperimentConfig& defaults);
void save_config_file(const std::string& path, const ExperimentConfig& config);

// CSV / JSON artifacts
void write_trajectory_csv(std::ostream& out, const VsTrajectory& trajectory);
void write_cal_csv(std::ostream& out, const VsTrajectory& trajectory, const ScoreTable& table,
                   double period_length, double sample_hz = 60.0);
void write_pupil_csv(std::ostream& out, const PupilTrace& trace);
void write_qcurve_csv(std::ostream& out, const std::vector<QCurveRow>& rows);
json qtable_json(const QTable& table);
void write_records_csv(std::ostream& out, const std::vector<JudgmentRecord>& records);
void write_history_csv(std::ostream& out, const RunReport& report);
json tuning_summary_json(const RunReport& report, int total_stages, int initial_stages);
void write_surface_csv(std::ostream& out, const Kernel& kernel,
                       const std::vector<Observation>& observations, const HyperBox& box,
                       int grid_per_dim = 50);

/// Shortest decimal form that round-trips a double; shared by all writers so
/// reruns are byte-identical.
std::string format_number(double v);

}  // namespace attnsim::io
