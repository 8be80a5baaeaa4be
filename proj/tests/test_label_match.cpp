#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "lrfs/label_match.hpp"

using namespace lrfs;

namespace {

BernoulliTrack<double> track(Label l, double r, double mean, double var = 1.0) {
    BernoulliTrack<double> t;
    t.label = l;
    t.existence = r;
    t.pdf = gaussian1d(mean, var);
    return t;
}

// exhaustive minimum over all feasible match/unmatch decisions
double brute_force_total(const Eigen::MatrixXd& real_costs, double td) {
    const int n1 = static_cast<int>(real_costs.rows());
    const int n2 = static_cast<int>(real_costs.cols());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> choice(n1, -1);  // -1 = unmatched
    std::function<void(int, std::vector<bool>&, double)> rec =
        [&](int row, std::vector<bool>& used, double acc) {
            if (row == n1) {
                double total = acc;
                for (int j = 0; j < n2; ++j) {
                    bool taken = false;
                    for (int i = 0; i < n1; ++i) taken = taken || choice[i] == j;
                    if (!taken) total += td;
                }
                best = std::min(best, total);
                return;
            }
            choice[row] = -1;
            rec(row + 1, used, acc + td);
            for (int j = 0; j < n2; ++j) {
                if (used[j] || !std::isfinite(real_costs(row, j))) continue;
                used[j] = true;
                choice[row] = j;
                rec(row + 1, used, acc + real_costs(row, j));
                used[j] = false;
                choice[row] = -1;
            }
        };
    std::vector<bool> used(n2, false);
    rec(0, used, 0.0);
    return best;
}

MatchAssignment solve_raw(const Eigen::MatrixXd& real_costs, double td) {
    CostMatrix<double> cost;
    cost.threshold = td;
    cost.entries.resize(real_costs.rows() + 1, real_costs.cols() + 1);
    cost.entries.setConstant(td);
    cost.entries.topLeftCorner(real_costs.rows(), real_costs.cols()) = real_costs;
    cost.entries(real_costs.rows(), real_costs.cols()) =
        std::numeric_limits<double>::infinity();
    return solve_assignment(cost);
}

}  // namespace

TEST_CASE("cost matrix construction") {
    LmbDensity<double> d1, d2;
    d1.add_track(track(Label{0, 0, 1}, 0.5, 0.0));
    d1.add_track(track(Label{0, 1, 1}, 0.5, 10.0));
    d2.add_track(track(Label{0, 0, 2}, 0.9, 0.0));
    d2.add_track(track(Label{0, 1, 2}, 0.9, 10.0));

    auto cost = build_cost_matrix(d1, d2, DivergenceKind::JsdSigmaPoint, 50.0);
    REQUIRE(cost.entries.rows() == 3);
    REQUIRE(cost.entries.cols() == 3);
    CHECK(cost.entries(0, 0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cost.entries(1, 1) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cost.entries(0, 1) > 0.0);
    CHECK(cost.entries(1, 0) > 0.0);
    CHECK(cost.entries(0, 2) == 50.0);  // unassignment column
    CHECK(cost.entries(2, 0) == 50.0);  // unassignment row
    CHECK(std::isinf(cost.entries(2, 2)));

    // costs ignore existence probabilities entirely
    LmbDensity<double> d1_scaled = d1, d2_scaled = d2;
    for (auto& t : d1_scaled.tracks) t.existence *= 0.1;
    for (auto& t : d2_scaled.tracks) t.existence *= 0.1;
    auto cost2 = build_cost_matrix(d1_scaled, d2_scaled, DivergenceKind::JsdSigmaPoint, 50.0);
    CHECK((cost.entries - cost2.entries).topLeftCorner(2, 2).norm() == 0.0);

    CHECK_THROWS(build_cost_matrix(d1, d2, DivergenceKind::JsdSigmaPoint, 0.0));
}

TEST_CASE("identical tracks match along the diagonal") {
    Eigen::MatrixXd costs(2, 2);
    costs << 0.0, 9.0, 9.0, 0.0;
    auto match = solve_raw(costs, 50.0);
    REQUIRE(match.matched.size() == 2);
    CHECK(match.matched[0] == std::pair<int, int>{0, 0});
    CHECK(match.matched[1] == std::pair<int, int>{1, 1});
    CHECK(match.total_cost == doctest::Approx(0.0));
}

TEST_CASE("a single pair below twice the threshold still matches") {
    // matching at cost 60 beats paying 2 * 50 to leave both unmatched
    Eigen::MatrixXd costs(1, 1);
    costs << 60.0;
    auto match = solve_raw(costs, 50.0);
    REQUIRE(match.matched.size() == 1);
    CHECK(match.total_cost == doctest::Approx(60.0));

    // above twice the threshold the pair separates
    costs << 101.0;
    auto separated = solve_raw(costs, 50.0);
    CHECK(separated.matched.empty());
    CHECK(separated.unmatched1.size() == 1);
    CHECK(separated.unmatched2.size() == 1);
    CHECK(separated.total_cost == doctest::Approx(100.0));
}

TEST_CASE("single track against an empty density stays unmatched at the threshold") {
    LmbDensity<double> d1, d2;
    d1.add_track(track(Label{0, 0, 1}, 0.5, 0.0));
    auto cost = build_cost_matrix(d1, d2, DivergenceKind::JsdSigmaPoint, 50.0);
    auto match = solve_assignment(cost);
    CHECK(match.matched.empty());
    CHECK(match.unmatched1 == std::vector<int>{0});
    CHECK(match.total_cost == doctest::Approx(50.0));
}

TEST_CASE("assignment optimum equals brute force on random instances") {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n1 = 1 + static_cast<int>(rng() % 4);
        const int n2 = 1 + static_cast<int>(rng() % 4);
        const double td = 10.0 + u(rng) * 0.5;
        Eigen::MatrixXd costs(n1, n2);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) costs(i, j) = u(rng);
        auto match = solve_raw(costs, td);
        CHECK(match.total_cost ==
              doctest::Approx(brute_force_total(costs, td)).epsilon(1e-9));

        // validity: each label used at most once, corner never selected
        std::vector<bool> used1(n1, false), used2(n2, false);
        for (const auto& [i, j] : match.matched) {
            REQUIRE(!used1[i]);
            REQUIRE(!used2[j]);
            used1[i] = used2[j] = true;
        }
        CHECK(match.matched.size() + match.unmatched1.size() ==
              static_cast<std::size_t>(n1));
        CHECK(match.matched.size() + match.unmatched2.size() ==
              static_cast<std::size_t>(n2));
    }
}

TEST_CASE("matching is symmetric up to transposition") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> um(-20.0, 20.0);
    LmbDensity<double> d1, d2;
    for (int i = 0; i < 3; ++i) d1.add_track(track(Label{0, i, 1}, 0.5, um(rng)));
    for (int i = 0; i < 4; ++i) d2.add_track(track(Label{0, i, 2}, 0.5, um(rng)));

    auto ab = solve_assignment(build_cost_matrix(d1, d2, DivergenceKind::CsdAnalytic, 50.0));
    auto ba = solve_assignment(build_cost_matrix(d2, d1, DivergenceKind::CsdAnalytic, 50.0));
    auto flipped = ba.matched;
    for (auto& [i, j] : flipped) std::swap(i, j);
    std::sort(flipped.begin(), flipped.end());
    std::sort(ab.matched.begin(), ab.matched.end());
    CHECK(ab.matched == flipped);
}

TEST_CASE("canonicalize unifies identical densities with different raw ids") {
    LmbDensity<double> d1, d2;
    d1.add_track(track(Label{0, 0, 1}, 0.6, 0.0));
    d1.add_track(track(Label{0, 1, 1}, 0.6, 20.0));
    d2.add_track(track(Label{3, 7, 2}, 0.6, 0.0));
    d2.add_track(track(Label{4, 9, 2}, 0.6, 20.0));

    auto [matched, map] = canonicalize<double>({d1, d2}, 0, DivergenceKind::JsdSigmaPoint,
                                               50.0);
    CHECK(map.entries.size() == 2);  // no fresh ids beyond the reference's
    for (const auto& [id, sources] : map.entries) CHECK(sources.size() == 2);
    CHECK(matched[0].track_labels() == matched[1].track_labels());
}

TEST_CASE("canonicalize keeps well-separated disjoint densities apart") {
    LmbDensity<double> d1, d2;
    d1.add_track(track(Label{0, 0, 1}, 0.6, 0.0));
    d2.add_track(track(Label{0, 0, 2}, 0.6, 1000.0));
    auto [matched, map] = canonicalize<double>({d1, d2}, 0, DivergenceKind::JsdSigmaPoint,
                                               50.0);
    CHECK(map.entries.size() == 2);  // all fresh
    for (const auto& [id, sources] : map.entries) CHECK(sources.size() == 1);
}

TEST_CASE("three agents with one perturbed common track share a canonical id") {
    LmbDensity<double> d1, d2, d3;
    d1.add_track(track(Label{0, 0, 1}, 0.6, 0.00));
    d2.add_track(track(Label{5, 3, 2}, 0.6, 0.15));
    d3.add_track(track(Label{8, 1, 3}, 0.6, -0.10));
    auto [matched, map] = canonicalize<double>({d1, d2, d3}, 0,
                                               DivergenceKind::JsdSigmaPoint, 50.0);
    REQUIRE(map.entries.size() == 1);
    CHECK(map.entries.begin()->second.size() == 3);
    const Label unified = matched[0].tracks[0].label;
    CHECK(matched[1].tracks[0].label == unified);
    CHECK(matched[2].tracks[0].label == unified);
    CHECK(unified.canonical_id >= 0);
}

TEST_CASE("existence scaling leaves the assignment unchanged") {
    std::mt19937_64 rng(111);
    std::uniform_real_distribution<double> um(-30.0, 30.0);
    LmbDensity<double> d1, d2;
    for (int i = 0; i < 4; ++i) d1.add_track(track(Label{0, i, 1}, 0.8, um(rng)));
    for (int i = 0; i < 4; ++i) d2.add_track(track(Label{0, i, 2}, 0.8, um(rng)));
    auto base = solve_assignment(
        build_cost_matrix(d1, d2, DivergenceKind::JsdSigmaPoint, 50.0));

    for (auto& t : d1.tracks) t.existence *= 0.05;
    for (auto& t : d2.tracks) t.existence *= 0.05;
    auto scaled = solve_assignment(
        build_cost_matrix(d1, d2, DivergenceKind::JsdSigmaPoint, 50.0));
    CHECK(base.matched == scaled.matched);
}
