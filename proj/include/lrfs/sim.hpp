#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lrfs/divergence.hpp"
#include "lrfs/gaussian.hpp"
#include "lrfs/label.hpp"
#include "lrfs/tracker.hpp"

namespace lrfs {

enum class FusionRule { Mil, Gci, None };
enum class DensityFamily { Lmb, Mdglmb };

struct TargetSpec {
    int birth_time = 0;
    int death_time = 0;  // exclusive
    Eigen::Vector4d initial_state = Eigen::Vector4d::Zero();  // [x, vx, y, vy]
};

struct SensorSpec {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double range_var = 400.0;        // m^2
    double bearing_var_deg2 = 0.64;  // stored in degrees^2, converted at load
    double detection_prob = 0.98;
    double fov_radius = std::numeric_limits<double>::infinity();
    double clutter_rate = 8.0;
};

/// Thrown on malformed configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string name = "scenario";
    double region_xmin = 0.0, region_xmax = 5000.0;
    double region_ymin = 0.0, region_ymax = 5000.0;
    int duration = 100;

    double dt = 1.0;
    double q_pos = 16.0, q_vel = 1.0;
    double survival = 0.95;
    bool truth_process_noise = true;

    std::vector<TargetSpec> targets;
    std::vector<SensorSpec> sensors;
    std::vector<std::vector<int>> adjacency;  // symmetric 0/1, no self loops needed

    FusionRule fusion_rule = FusionRule::Mil;
    DensityFamily family = DensityFamily::Lmb;
    int consensus_rounds = 1;
    bool geometric_fov_mode = false;  // label-comparison subspaces by default

    double birth_existence = 0.01;
    Eigen::Vector4d birth_cov_diag = Eigen::Vector4d(1600.0, 400.0, 1600.0, 400.0);

    GmReduceParams reduction;  // prune 1e-5, merge 10, cap 20
    DivergenceKind match_cost = DivergenceKind::JsdSigmaPoint;
    double match_threshold = 50.0;

    double extraction_threshold = 0.55;
    double ospa_p = 2.0, ospa_c = 50.0;
    double gate_dist2 = 25.0;
    int max_events = 100;
    int max_hypotheses = 100;

    int trials = 10;
    std::uint64_t seed = 1;

    void validate() const;
    [[nodiscard]] MotionModel<double> motion_model() const;
    [[nodiscard]] SensorModel<double> sensor_model(std::size_t i) const;
    [[nodiscard]] BirthModel<double> birth_model() const;
};

ScenarioConfig config_from_file(const std::string& path);

/// Ground truth plus per-agent measurement streams for one trial.
struct TruthData {
    // alive targets per time step: (target index, state)
    std::vector<std::vector<std::pair<int, Eigen::Vector4d>>> truth;
    // measurements[agent][time] = (range, bearing) pairs
    std::vector<std::vector<std::vector<Eigen::Vector2d>>> measurements;
};

TruthData generate_truth_and_measurements(const ScenarioConfig& config, std::uint64_t seed);

/// Seed used for trial `index` of a run (exposed so tooling can regenerate a
/// trial's truth stream).
std::uint64_t trial_seed(const ScenarioConfig& config, int index);

struct TrackSnapshot {
    Label label;
    double existence = 0.0;
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
};

struct StepRecord {
    std::vector<std::vector<TrackSnapshot>> local;  // per agent, before fusion
    std::vector<std::vector<TrackSnapshot>> fused;  // per agent, after consensus
    std::vector<std::vector<std::pair<Label, Eigen::Vector4d>>> estimates;
    std::vector<double> agent_ospa;
    double mean_ospa = 0.0;
    double mean_cardinality = 0.0;
    int true_cardinality = 0;
};

struct TrialResult {
    std::vector<StepRecord> steps;
    double wall_seconds = 0.0;
};

TrialResult run_trial(const ScenarioConfig& config, int trial_index);

struct RunResult {
    std::vector<TrialResult> trials;
    std::vector<double> mean_ospa;  // per time, across trials
    std::vector<double> std_ospa;
    std::vector<double> mean_cardinality;
    std::vector<int> true_cardinality;
};

RunResult monte_carlo(const ScenarioConfig& config);

/// Write ospa.csv, cardinality.csv, tracks.json and meta.json (plus SVG
/// plots when requested) into the output directory.
void write_outputs(const RunResult& result, const ScenarioConfig& config,
                   const std::string& out_dir, bool plots = false);

}  // namespace lrfs
