#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lrfs/ospa.hpp"
#include "lrfs/sim.hpp"

using namespace lrfs;

namespace {

ScenarioConfig small_scenario() {
    ScenarioConfig c;
    c.name = "unit";
    c.region_xmin = 0.0;
    c.region_xmax = 2000.0;
    c.region_ymin = 0.0;
    c.region_ymax = 2000.0;
    c.duration = 12;
    c.trials = 1;
    c.seed = 7;
    c.targets.push_back({0, 12, Eigen::Vector4d(500.0, 5.0, 500.0, 4.0)});
    c.targets.push_back({3, 12, Eigen::Vector4d(1500.0, -5.0, 1400.0, -3.0)});
    SensorSpec s1, s2;
    s1.position = Eigen::Vector2d(200.0, 200.0);
    s2.position = Eigen::Vector2d(1800.0, 1800.0);
    s1.clutter_rate = s2.clutter_rate = 2.0;
    c.sensors = {s1, s2};
    c.adjacency = {{0, 1}, {1, 0}};
    c.consensus_rounds = 1;
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("ospa basics") {
    std::vector<Eigen::Vector2d> a{{0.0, 0.0}, {10.0, 10.0}};
    CHECK(ospa(a, a, 2.0, 50.0) == doctest::Approx(0.0));

    std::vector<Eigen::Vector2d> empty;
    CHECK(ospa(empty, empty, 2.0, 50.0) == 0.0);

    // one truth target, empty estimate: pure cardinality penalty
    std::vector<Eigen::Vector2d> one{{100.0, 100.0}};
    CHECK(ospa(one, empty, 2.0, 50.0) == doctest::Approx(50.0));

    // two singletons 30 m apart
    std::vector<Eigen::Vector2d> est{{130.0, 100.0}};
    CHECK(ospa(one, est, 2.0, 50.0) == doctest::Approx(30.0));

    // symmetry and cutoff
    std::vector<Eigen::Vector2d> far{{5000.0, 5000.0}};
    CHECK(ospa(one, far, 2.0, 50.0) == doctest::Approx(50.0));
    CHECK(ospa(one, est, 2.0, 50.0) == ospa(est, one, 2.0, 50.0));
}

TEST_CASE("noise-free measurements reproduce the measurement map exactly") {
    ScenarioConfig c = small_scenario();
    c.truth_process_noise = false;
    for (auto& s : c.sensors) {
        s.clutter_rate = 0.0;
        s.detection_prob = 1.0;
        s.range_var = 1e-12;  // effectively noiseless
        s.bearing_var_deg2 = 1e-16;
    }
    auto data = generate_truth_and_measurements(c, 1);
    for (int t = 0; t < c.duration; ++t) {
        for (std::size_t a = 0; a < c.sensors.size(); ++a) {
            const auto sensor = c.sensor_model(a);
            REQUIRE(data.measurements[a][t].size() == data.truth[t].size());
            for (std::size_t k = 0; k < data.truth[t].size(); ++k) {
                Eigen::Vector2d expected = sensor.measure(data.truth[t][k].second);
                bool found = false;
                for (const auto& z : data.measurements[a][t])
                    found = found || (z - expected).norm() < 1e-3;
                CHECK(found);
            }
        }
    }
}

TEST_CASE("clutter count concentrates around its rate") {
    ScenarioConfig c = small_scenario();
    c.duration = 1000;
    c.targets.clear();
    c.sensors.resize(1);
    c.sensors[0].clutter_rate = 8.0;
    c.sensors[0].detection_prob = 0.0;
    auto data = generate_truth_and_measurements(c, 42);
    double total = 0.0;
    for (int t = 0; t < c.duration; ++t) total += data.measurements[0][t].size();
    const double mean = total / c.duration;
    const double sigma = std::sqrt(8.0 / c.duration);
    CHECK(std::abs(mean - 8.0) < 3.0 * sigma);
}

TEST_CASE("targets outside a limited field of view are never detected") {
    ScenarioConfig c = small_scenario();
    c.targets = {{0, 12, Eigen::Vector4d(1900.0, 0.0, 1900.0, 0.0)}};
    c.sensors.resize(1);
    c.sensors[0].fov_radius = 300.0;  // target ~2400 m away
    c.sensors[0].clutter_rate = 0.0;
    c.sensors[0].detection_prob = 1.0;
    auto data = generate_truth_and_measurements(c, 3);
    for (int t = 0; t < c.duration; ++t) CHECK(data.measurements[0][t].empty());
}

TEST_CASE("a run without fusion equals independent local tracking") {
    ScenarioConfig c = small_scenario();
    c.fusion_rule = FusionRule::None;
    auto with_rounds = run_trial(c, 0);
    c.consensus_rounds = 0;
    c.fusion_rule = FusionRule::Mil;
    auto no_rounds = run_trial(c, 0);
    REQUIRE(with_rounds.steps.size() == no_rounds.steps.size());
    for (std::size_t t = 0; t < with_rounds.steps.size(); ++t)
        CHECK(with_rounds.steps[t].mean_ospa ==
              doctest::Approx(no_rounds.steps[t].mean_ospa).epsilon(1e-12));
}

TEST_CASE("identical measurements over a complete graph give identical densities") {
    // both sensors at the same spot with the same clutter stream is not
    // reproducible; instead check the symmetric setting: after one round of
    // fusion over a complete 2-graph both agents hold the same track set
    ScenarioConfig c = small_scenario();
    c.fusion_rule = FusionRule::Mil;
    auto trial = run_trial(c, 0);
    const auto& last = trial.steps.back();
    REQUIRE(last.fused.size() == 2);
    REQUIRE(!last.fused[0].empty());
    // same number of alive tracks on both agents after symmetric fusion
    CHECK(last.fused[0].size() == last.fused[1].size());
}

TEST_CASE("monte carlo aggregation of one trial is that trial") {
    ScenarioConfig c = small_scenario();
    c.trials = 1;
    auto run = monte_carlo(c);
    REQUIRE(run.trials.size() == 1);
    for (int t = 0; t < c.duration; ++t) {
        CHECK(run.mean_ospa[t] == doctest::Approx(run.trials[0].steps[t].mean_ospa));
        CHECK(run.std_ospa[t] == doctest::Approx(0.0));
    }
}

TEST_CASE("fixed seeds give byte-identical outputs") {
    ScenarioConfig c = small_scenario();
    c.duration = 8;
    const auto dir1 = std::filesystem::temp_directory_path() / "lrfs_det_1";
    const auto dir2 = std::filesystem::temp_directory_path() / "lrfs_det_2";
    write_outputs(monte_carlo(c), c, dir1.string());
    write_outputs(monte_carlo(c), c, dir2.string());
    CHECK(slurp((dir1 / "ospa.csv").string()) == slurp((dir2 / "ospa.csv").string()));
    CHECK(slurp((dir1 / "cardinality.csv").string()) ==
          slurp((dir2 / "cardinality.csv").string()));
    CHECK(slurp((dir1 / "tracks.json").string()) == slurp((dir2 / "tracks.json").string()));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("config validation failures carry the config error type") {
    ScenarioConfig c = small_scenario();
    c.duration = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);

    ScenarioConfig c2 = small_scenario();
    c2.adjacency = {{0, 1}, {0, 0}};  // asymmetric
    CHECK_THROWS_AS(c2.validate(), ConfigError);
}
