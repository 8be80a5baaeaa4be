#include "lrfs/sim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>

#include "lrfs/fov.hpp"
#include "lrfs/fusion.hpp"
#include "lrfs/label_match.hpp"
#include "lrfs/ospa.hpp"
#include "lrfs/serialization.hpp"

namespace lrfs {

using nlohmann::json;

namespace {

double deg2_to_rad2(double deg2) {
    const double deg = std::sqrt(deg2);
    const double rad = deg * std::numbers::pi / 180.0;
    return rad * rad;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 step
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (region_xmax <= region_xmin || region_ymax <= region_ymin)
        throw ConfigError("region must have positive extent");
    if (duration <= 0) throw ConfigError("duration must be positive");
    if (dt <= 0) throw ConfigError("sampling interval must be positive");
    if (survival < 0.0 || survival > 1.0) throw ConfigError("survival must be in [0,1]");
    if (sensors.empty()) throw ConfigError("at least one sensor is required");
    if (consensus_rounds < 0) throw ConfigError("consensus rounds must be >= 0");
    if (!(birth_existence > 0.0) || birth_existence >= 1.0)
        throw ConfigError("birth existence must be in (0,1)");
    if (trials <= 0) throw ConfigError("trials must be positive");
    if (ospa_p < 1.0 || ospa_c <= 0.0) throw ConfigError("ospa needs p >= 1 and c > 0");
    for (const auto& s : sensors) {
        if (s.detection_prob < 0.0 || s.detection_prob > 1.0)
            throw ConfigError("detection probability must be in [0,1]");
        if (s.clutter_rate < 0.0) throw ConfigError("clutter rate must be >= 0");
        if (s.range_var <= 0.0 || s.bearing_var_deg2 <= 0.0)
            throw ConfigError("measurement noise must be positive");
    }
    for (const auto& t : targets) {
        if (t.birth_time < 0 || t.death_time <= t.birth_time)
            throw ConfigError("target lifetime must be a nonempty interval");
    }
    if (!adjacency.empty()) {
        if (adjacency.size() != sensors.size())
            throw ConfigError("adjacency size must match the sensor count");
        for (std::size_t i = 0; i < adjacency.size(); ++i) {
            if (adjacency[i].size() != sensors.size())
                throw ConfigError("adjacency must be square");
            for (std::size_t j = 0; j < adjacency.size(); ++j)
                if (adjacency[i][j] != adjacency[j][i])
                    throw ConfigError("adjacency must be symmetric");
        }
    }
}

MotionModel<double> ScenarioConfig::motion_model() const {
    return MotionModel<double>::white_noise_acceleration(dt, q_pos, q_vel, survival);
}

SensorModel<double> ScenarioConfig::sensor_model(std::size_t i) const {
    const SensorSpec& spec = sensors.at(i);
    SensorModel<double> s;
    s.position = spec.position;
    s.noise.setZero();
    s.noise(0, 0) = spec.range_var;
    s.noise(1, 1) = deg2_to_rad2(spec.bearing_var_deg2);
    s.detection_prob = spec.detection_prob;
    s.fov_radius = spec.fov_radius;
    s.clutter_rate = spec.clutter_rate;
    s.region_xmin = region_xmin;
    s.region_xmax = region_xmax;
    s.region_ymin = region_ymin;
    s.region_ymax = region_ymax;
    return s;
}

BirthModel<double> ScenarioConfig::birth_model() const {
    BirthModel<double> b;
    b.existence = birth_existence;
    b.cov = Eigen::MatrixXd::Zero(4, 4);
    b.cov.diagonal() = birth_cov_diag;
    return b;
}

ScenarioConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ScenarioConfig c;
    try {
        c.name = j.value("name", c.name);
        if (j.contains("region")) {
            const auto& r = j["region"];
            c.region_xmin = r.at("xmin").get<double>();
            c.region_xmax = r.at("xmax").get<double>();
            c.region_ymin = r.at("ymin").get<double>();
            c.region_ymax = r.at("ymax").get<double>();
        }
        c.duration = j.value("duration", c.duration);
        if (j.contains("motion")) {
            const auto& m = j["motion"];
            c.dt = m.value("dt", c.dt);
            c.q_pos = m.value("q_pos", c.q_pos);
            c.q_vel = m.value("q_vel", c.q_vel);
            c.survival = m.value("survival", c.survival);
            c.truth_process_noise = m.value("truth_process_noise", c.truth_process_noise);
        }
        for (const auto& t : j.value("targets", json::array())) {
            TargetSpec spec;
            spec.birth_time = t.at("birth").get<int>();
            spec.death_time = t.at("death").get<int>();
            const auto s = t.at("state").get<std::vector<double>>();
            if (s.size() != 4) throw ConfigError("target state must have 4 entries");
            spec.initial_state = Eigen::Vector4d(s[0], s[1], s[2], s[3]);
            c.targets.push_back(spec);
        }
        for (const auto& s : j.value("sensors", json::array())) {
            SensorSpec spec;
            const auto p = s.at("position").get<std::vector<double>>();
            if (p.size() != 2) throw ConfigError("sensor position must have 2 entries");
            spec.position = Eigen::Vector2d(p[0], p[1]);
            spec.range_var = s.value("range_var", spec.range_var);
            spec.bearing_var_deg2 = s.value("bearing_var_deg2", spec.bearing_var_deg2);
            spec.detection_prob = s.value("pd", spec.detection_prob);
            if (s.contains("fov_radius") && !s["fov_radius"].is_null())
                spec.fov_radius = s["fov_radius"].get<double>();
            spec.clutter_rate = s.value("clutter_rate", spec.clutter_rate);
            c.sensors.push_back(spec);
        }
        c.adjacency = j.value("adjacency", c.adjacency);
        if (j.contains("fusion")) {
            const auto& f = j["fusion"];
            const std::string rule = f.value("rule", "mil");
            if (rule == "mil")
                c.fusion_rule = FusionRule::Mil;
            else if (rule == "gci")
                c.fusion_rule = FusionRule::Gci;
            else if (rule == "none")
                c.fusion_rule = FusionRule::None;
            else
                throw ConfigError("unknown fusion rule: " + rule);
            const std::string family = f.value("family", "lmb");
            if (family == "lmb")
                c.family = DensityFamily::Lmb;
            else if (family == "mdglmb")
                c.family = DensityFamily::Mdglmb;
            else
                throw ConfigError("unknown density family: " + family);
            c.consensus_rounds = f.value("consensus_rounds", c.consensus_rounds);
            c.geometric_fov_mode = f.value("geometric_fov_mode", c.geometric_fov_mode);
        }
        if (j.contains("birth")) {
            const auto& b = j["birth"];
            c.birth_existence = b.value("ep", c.birth_existence);
            if (b.contains("cov_diag")) {
                const auto d = b["cov_diag"].get<std::vector<double>>();
                if (d.size() != 4) throw ConfigError("birth cov_diag must have 4 entries");
                c.birth_cov_diag = Eigen::Vector4d(d[0], d[1], d[2], d[3]);
            }
        }
        if (j.contains("reduction")) {
            const auto& r = j["reduction"];
            c.reduction.prune_threshold = r.value("prune", c.reduction.prune_threshold);
            c.reduction.merge_threshold = r.value("merge", c.reduction.merge_threshold);
            c.reduction.max_components = r.value("cap", c.reduction.max_components);
        }
        if (j.contains("matching")) {
            const auto& m = j["matching"];
            const std::string cost = m.value("cost", "jsd");
            if (cost == "jsd")
                c.match_cost = DivergenceKind::JsdSigmaPoint;
            else if (cost == "csd")
                c.match_cost = DivergenceKind::CsdAnalytic;
            else if (cost == "kld")
                c.match_cost = DivergenceKind::KldSigmaPoint;
            else
                throw ConfigError("unknown matching cost: " + cost);
            c.match_threshold = m.value("td", c.match_threshold);
        }
        if (j.contains("extraction"))
            c.extraction_threshold = j["extraction"].value("threshold", c.extraction_threshold);
        if (j.contains("ospa")) {
            c.ospa_p = j["ospa"].value("p", c.ospa_p);
            c.ospa_c = j["ospa"].value("c", c.ospa_c);
        }
        if (j.contains("association")) {
            const auto& a = j["association"];
            c.gate_dist2 = a.value("gate_dist2", c.gate_dist2);
            c.max_events = a.value("max_events", c.max_events);
            c.max_hypotheses = a.value("max_hypotheses", c.max_hypotheses);
        }
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    c.validate();
    return c;
}

std::uint64_t trial_seed(const ScenarioConfig& config, int index) {
    return mix_seed(config.seed, static_cast<std::uint64_t>(index));
}

TruthData generate_truth_and_measurements(const ScenarioConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const MotionModel<double> motion = config.motion_model();
    Eigen::Matrix4d noise_sqrt = Eigen::Matrix4d::Zero();
    if (config.truth_process_noise)
        noise_sqrt = Eigen::Matrix4d(motion.process_noise.llt().matrixL());

    TruthData data;
    data.truth.resize(config.duration);
    data.measurements.assign(config.sensors.size(),
                             std::vector<std::vector<Eigen::Vector2d>>(config.duration));

    std::vector<Eigen::Vector4d> states(config.targets.size());

    for (int t = 0; t < config.duration; ++t) {
        for (std::size_t k = 0; k < config.targets.size(); ++k) {
            const TargetSpec& spec = config.targets[k];
            if (t < spec.birth_time || t >= spec.death_time) continue;
            if (t == spec.birth_time) {
                states[k] = spec.initial_state;
            } else {
                Eigen::Vector4d w = Eigen::Vector4d::Zero();
                if (config.truth_process_noise) {
                    Eigen::Vector4d u;
                    for (int d = 0; d < 4; ++d) u(d) = gauss(rng);
                    w = noise_sqrt * u;
                }
                states[k] = motion.transition * states[k] + w;
            }
            data.truth[t].emplace_back(static_cast<int>(k), states[k]);
        }

        for (std::size_t a = 0; a < config.sensors.size(); ++a) {
            const SensorModel<double> sensor = config.sensor_model(a);
            auto& bucket = data.measurements[a][t];
            for (const auto& [idx, x] : data.truth[t]) {
                Eigen::Vector2d pos(x(0), x(2));
                if (!sensor.in_fov(pos)) continue;  // zero detection outside the FoV
                if (uniform(rng) > sensor.detection_prob) continue;
                Eigen::Vector2d z = sensor.measure(x);
                z(0) += std::sqrt(sensor.noise(0, 0)) * gauss(rng);
                z(1) = wrap_angle(z(1) + std::sqrt(sensor.noise(1, 1)) * gauss(rng));
                bucket.push_back(z);
            }
            if (sensor.clutter_rate > 0.0) {
                std::poisson_distribution<int> poisson(sensor.clutter_rate);
                const int n_clutter = poisson(rng);
                for (int c = 0; c < n_clutter; ++c) {
                    Eigen::Vector2d pos;
                    if (sensor.limited_fov()) {
                        // uniform over the FoV disk
                        const double u = uniform(rng);
                        const double radius = sensor.fov_radius * std::sqrt(u);
                        const double angle =
                            uniform(rng) * 2.0 * std::numbers::pi - std::numbers::pi;
                        pos = sensor.position +
                              radius * Eigen::Vector2d(std::cos(angle), std::sin(angle));
                    } else {
                        pos.x() = config.region_xmin +
                                  uniform(rng) * (config.region_xmax - config.region_xmin);
                        pos.y() = config.region_ymin +
                                  uniform(rng) * (config.region_ymax - config.region_ymin);
                    }
                    Eigen::Vector4d fake(pos.x(), 0.0, pos.y(), 0.0);
                    bucket.push_back(sensor.measure(fake));
                }
            }
        }
    }
    return data;
}

namespace {

// family-specific hooks shared by the consensus loop
struct LmbAgentOps {
    using Density = LmbDensity<double>;

    static Density fuse(const std::vector<Density>& locals, const FusionWeights<double>& w,
                        const ScenarioConfig& config, FusionRule rule) {
        if (rule == FusionRule::Mil)
            return mil_fuse_lmb_fov(locals, w, config.reduction, 1e-5);
        return gci_fuse_lmb(locals, w, config.reduction, 1e-5);
    }

    static std::vector<TrackSnapshot> snapshot(const Density& d) {
        std::vector<TrackSnapshot> out;
        out.reserve(d.tracks.size());
        for (const auto& t : d.tracks) {
            TrackSnapshot s;
            s.label = t.label;
            s.existence = t.existence;
            if (!t.pdf.empty()) {
                const auto* best = &t.pdf.components.front();
                for (const auto& c : t.pdf.components)
                    if (c.weight > best->weight) best = &c;
                s.mean = best->mean;
            }
            out.push_back(std::move(s));
        }
        return out;
    }
};

struct MdglmbAgentOps {
    using Density = MdglmbDensity<double>;

    static Density fuse(const std::vector<Density>& locals, const FusionWeights<double>& w,
                        const ScenarioConfig& config, FusionRule rule) {
        if (rule == FusionRule::Mil)
            return mil_fuse_mdglmb_fov(locals, w, config.reduction, 1e-20,
                                       config.max_hypotheses);
        return gci_fuse_mdglmb(locals, w, config.reduction, 1e-20, config.max_hypotheses);
    }

    static std::vector<TrackSnapshot> snapshot(const Density& d) {
        return LmbAgentOps::snapshot(mdglmb_to_lmb(d));
    }
};

template <typename Ops>
TrialResult run_trial_impl(const ScenarioConfig& config, int trial_index) {
    using Density = typename Ops::Density;
    const auto t_start = std::chrono::steady_clock::now();

    const TruthData data =
        generate_truth_and_measurements(config, trial_seed(config, trial_index));
    const MotionModel<double> motion = config.motion_model();
    const BirthModel<double> birth = config.birth_model();
    const std::size_t n_agents = config.sensors.size();

    UpdateParams update_params;
    update_params.gate_dist2 = config.gate_dist2;
    update_params.max_events = config.max_events;
    update_params.reduce = config.reduction;

    std::vector<Density> densities(n_agents);
    std::vector<SensorModel<double>> sensors;
    sensors.reserve(n_agents);
    for (std::size_t a = 0; a < n_agents; ++a) sensors.push_back(config.sensor_model(a));

    if constexpr (std::is_same_v<Density, MdglmbDensity<double>>) {
        for (auto& d : densities) d.hypotheses.push_back({{}, 1.0, {}});
    }

    TrialResult result;
    result.steps.resize(config.duration);

    for (int t = 0; t < config.duration; ++t) {
        StepRecord& record = result.steps[t];
        record.local.resize(n_agents);
        record.fused.resize(n_agents);
        record.estimates.resize(n_agents);
        record.agent_ospa.resize(n_agents);

        // local filtering: predict with measurement-driven births, then update
        for (std::size_t a = 0; a < n_agents; ++a) {
            std::vector<BernoulliTrack<double>> births;
            if (t > 0)
                births = adaptive_birth(data.measurements[a][t - 1], sensors[a], birth, t,
                                        static_cast<int>(a));
            Density predicted = predict(densities[a], motion, births);
            densities[a] = update(predicted, sensors[a], data.measurements[a][t],
                                  update_params);
            densities[a].compact_label_space();
            record.local[a] = Ops::snapshot(densities[a]);
        }

        // consensus: repeated neighbor-wise fusion on canonicalized labels
        if (config.fusion_rule != FusionRule::None && config.consensus_rounds > 0) {
            for (int round = 0; round < config.consensus_rounds; ++round) {
                const std::vector<Density> before = densities;
                for (std::size_t a = 0; a < n_agents; ++a) {
                    std::vector<Density> gathered;
                    gathered.push_back(before[a]);  // self first: matching reference
                    if (!config.adjacency.empty()) {
                        for (std::size_t b = 0; b < n_agents; ++b)
                            if (b != a && config.adjacency[a][b]) gathered.push_back(before[b]);
                    } else {
                        for (std::size_t b = 0; b < n_agents; ++b)
                            if (b != a) gathered.push_back(before[b]);
                    }
                    if (gathered.size() == 1) continue;
                    auto [matched, label_map] = canonicalize(
                        gathered, 0, config.match_cost, config.match_threshold);
                    const auto weights = FusionWeights<double>::uniform(matched.size());
                    densities[a] = Ops::fuse(matched, weights, config, config.fusion_rule);
                    densities[a].compact_label_space();
                }
            }
        }

        // extraction and scoring
        std::vector<Eigen::Vector2d> truth_positions;
        for (const auto& [idx, x] : data.truth[t])
            truth_positions.emplace_back(x(0), x(2));
        record.true_cardinality = static_cast<int>(truth_positions.size());

        double card_sum = 0.0, ospa_sum = 0.0;
        for (std::size_t a = 0; a < n_agents; ++a) {
            record.fused[a] = Ops::snapshot(densities[a]);
            auto estimates = extract(densities[a], config.extraction_threshold);
            std::vector<Eigen::Vector2d> est_positions;
            est_positions.reserve(estimates.size());
            for (const auto& [label, mean] : estimates)
                est_positions.emplace_back(mean(0), mean(2));
            record.agent_ospa[a] =
                ospa(truth_positions, est_positions, config.ospa_p, config.ospa_c);
            ospa_sum += record.agent_ospa[a];
            card_sum += static_cast<double>(estimates.size());
            for (auto& [label, mean] : estimates)
                record.estimates[a].emplace_back(label, Eigen::Vector4d(mean));
        }
        record.mean_ospa = ospa_sum / static_cast<double>(n_agents);
        record.mean_cardinality = card_sum / static_cast<double>(n_agents);
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace

TrialResult run_trial(const ScenarioConfig& config, int trial_index) {
    config.validate();
    if (config.family == DensityFamily::Lmb)
        return run_trial_impl<LmbAgentOps>(config, trial_index);
    return run_trial_impl<MdglmbAgentOps>(config, trial_index);
}

RunResult monte_carlo(const ScenarioConfig& config) {
    config.validate();
    RunResult result;
    result.trials.reserve(config.trials);
    for (int trial = 0; trial < config.trials; ++trial)
        result.trials.push_back(run_trial(config, trial));

    const int duration = config.duration;
    result.mean_ospa.assign(duration, 0.0);
    result.std_ospa.assign(duration, 0.0);
    result.mean_cardinality.assign(duration, 0.0);
    result.true_cardinality.assign(duration, 0);
    for (int t = 0; t < duration; ++t) {
        double sum = 0.0, sum2 = 0.0, card = 0.0;
        for (const auto& trial : result.trials) {
            const double v = trial.steps[t].mean_ospa;
            sum += v;
            sum2 += v * v;
            card += trial.steps[t].mean_cardinality;
        }
        const double n = static_cast<double>(result.trials.size());
        result.mean_ospa[t] = sum / n;
        const double var = std::max(sum2 / n - (sum / n) * (sum / n), 0.0);
        result.std_ospa[t] = std::sqrt(var);
        result.mean_cardinality[t] = card / n;
        result.true_cardinality[t] = result.trials.front().steps[t].true_cardinality;
    }
    return result;
}

namespace {

std::string meta_comment(const ScenarioConfig& config) {
    std::string rule = config.fusion_rule == FusionRule::Mil
                           ? "mil"
                           : config.fusion_rule == FusionRule::Gci ? "gci" : "none";
    std::string family = config.family == DensityFamily::Lmb ? "lmb" : "mdglmb";
    return "# scenario=" + config.name + " seed=" + std::to_string(config.seed) +
           " trials=" + std::to_string(config.trials) + " fusion=" + rule +
           " family=" + family + " weights=uniform sigma_kappa=3-d";
}

void write_svg_curve(const std::string& path, const std::vector<double>& values,
                     double y_max, const std::string& title) {
    const int width = 640, height = 360, margin = 40;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title
        << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    const double x_scale =
        values.size() > 1 ? double(width - 2 * margin) / double(values.size() - 1) : 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = margin + x_scale * double(i);
        const double y =
            height - margin - (height - 2 * margin) * std::min(values[i] / y_max, 1.0);
        out << format_double(x) << "," << format_double(y) << " ";
    }
    out << "\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n</svg>\n";
}

}  // namespace

void write_outputs(const RunResult& result, const ScenarioConfig& config,
                   const std::string& out_dir, bool plots) {
    std::filesystem::create_directories(out_dir);
    const std::string comment = meta_comment(config);

    {
        std::ofstream out(out_dir + "/ospa.csv");
        if (!out) throw std::runtime_error("cannot write ospa.csv");
        out << comment << "\n";
        out << "time,mean_ospa,std_ospa\n";
        for (std::size_t t = 0; t < result.mean_ospa.size(); ++t)
            out << t << "," << format_double(result.mean_ospa[t]) << ","
                << format_double(result.std_ospa[t]) << "\n";
    }
    {
        std::ofstream out(out_dir + "/cardinality.csv");
        if (!out) throw std::runtime_error("cannot write cardinality.csv");
        out << comment << "\n";
        out << "time,true_n,mean_est_n\n";
        for (std::size_t t = 0; t < result.mean_cardinality.size(); ++t)
            out << t << "," << result.true_cardinality[t] << ","
                << format_double(result.mean_cardinality[t]) << "\n";
    }
    {
        json trials = json::array();
        for (std::size_t trial = 0; trial < result.trials.size(); ++trial) {
            json agents = json::array();
            const auto& steps = result.trials[trial].steps;
            const std::size_t n_agents = steps.empty() ? 0 : steps[0].estimates.size();
            for (std::size_t a = 0; a < n_agents; ++a) {
                std::map<Label, json> tracks;
                for (std::size_t t = 0; t < steps.size(); ++t) {
                    for (const auto& [label, mean] : steps[t].estimates[a]) {
                        auto& entry = tracks[label];
                        if (entry.is_null()) {
                            entry = json::object();
                            entry["label"] = to_json(label);
                            entry["points"] = json::array();
                        }
                        entry["points"].push_back(
                            json::array({t, mean(0), mean(2)}));
                    }
                }
                json agent;
                agent["agent"] = a;
                agent["tracks"] = json::array();
                for (auto& [label, entry] : tracks) agent["tracks"].push_back(entry);
                agents.push_back(std::move(agent));
            }
            json jt;
            jt["trial"] = trial;
            jt["agents"] = std::move(agents);
            trials.push_back(std::move(jt));
        }
        json out;
        out["meta"] = comment.substr(2);
        out["trials"] = std::move(trials);
        write_json_file(out_dir + "/tracks.json", out);
    }
    {
        json meta;
        meta["scenario"] = config.name;
        meta["seed"] = config.seed;
        meta["trials"] = config.trials;
        meta["fusion_weights"] = "uniform over self and neighbors";
        meta["sigma_point_spread"] = "kappa = 3 - d";
        meta["consensus_rounds"] = config.consensus_rounds;
        write_json_file(out_dir + "/meta.json", meta);
    }
    if (plots) {
        write_svg_curve(out_dir + "/ospa.svg", result.mean_ospa, config.ospa_c,
                        "mean OSPA [m]");
        std::vector<double> card(result.mean_cardinality);
        double top = 1.0;
        for (std::size_t t = 0; t < card.size(); ++t)
            top = std::max({top, card[t], double(result.true_cardinality[t])});
        write_svg_curve(out_dir + "/cardinality.svg", card, top, "mean estimated cardinality");
    }
}

}  // namespace lrfs
