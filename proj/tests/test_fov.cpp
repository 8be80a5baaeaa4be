#include <doctest.h>

#include <random>

#include "lrfs/fov.hpp"
#include "lrfs/grid.hpp"

using namespace lrfs;

namespace {

const Label kL1{0, 1, 0};
const Label kL2{0, 2, 0};
const Label kL3{0, 3, 0};

BernoulliTrack<double> track(Label l, double r, double mean, double var = 1.0) {
    BernoulliTrack<double> t;
    t.label = l;
    t.existence = r;
    t.pdf = gaussian1d(mean, var);
    return t;
}

MdglmbDensity<double> agent2_table() {
    // p({}) = 0.05, p({l1}) = 0.05, p({l3}) = 0.05, p({l1,l3}) = 0.85
    MdglmbDensity<double> d;
    d.label_space = {kL1, kL3};
    d.hypotheses.push_back({{}, 0.05, {}});
    d.hypotheses.push_back({{kL1}, 0.05, {{kL1, gaussian1d(1.0, 1.0)}}});
    d.hypotheses.push_back({{kL3}, 0.05, {{kL3, gaussian1d(3.0, 1.0)}}});
    d.hypotheses.push_back(
        {{kL1, kL3}, 0.85, {{kL1, gaussian1d(1.0, 1.0)}, {kL3, gaussian1d(3.0, 1.0)}}});
    return d;
}

}  // namespace

TEST_CASE("subspace discovery by label comparison") {
    SUBCASE("partially overlapping spaces split into three singletons") {
        std::vector<LabelSet> spaces{{kL1, kL2}, {kL1, kL3}};
        auto part = discover_subspaces(spaces);
        REQUIRE(part.subspaces.size() == 3);
        CHECK(part.global_space() == LabelSet{kL1, kL2, kL3});
        const int m1 = part.subspace_of(kL1);
        const int m2 = part.subspace_of(kL2);
        const int m3 = part.subspace_of(kL3);
        CHECK(part.subspaces[m1] == LabelSet{kL1});
        CHECK(part.membership[m1] == std::vector<int>{0, 1});
        CHECK(part.membership[m2] == std::vector<int>{0});
        CHECK(part.membership[m3] == std::vector<int>{1});
    }

    SUBCASE("identical spaces collapse to one subspace") {
        std::vector<LabelSet> spaces{{kL1, kL2}, {kL1, kL2}};
        auto part = discover_subspaces(spaces);
        REQUIRE(part.subspaces.size() == 1);
        CHECK(part.subspaces[0] == LabelSet{kL1, kL2});
        CHECK(part.membership[0] == std::vector<int>{0, 1});
    }

    SUBCASE("disjoint spaces give one subspace per agent") {
        std::vector<LabelSet> spaces{{kL1}, {kL2}, {kL3}};
        auto part = discover_subspaces(spaces);
        REQUIRE(part.subspaces.size() == 3);
        for (std::size_t m = 0; m < 3; ++m) CHECK(part.membership[m].size() == 1);
    }

    SUBCASE("subspaces partition the global space") {
        std::vector<LabelSet> spaces{{kL1, kL2}, {kL1, kL3}};
        auto part = discover_subspaces(spaces, SubspaceGranularity::SingletonPerLabel);
        LabelSet all;
        std::size_t total = 0;
        for (const auto& s : part.subspaces) {
            total += s.size();
            all = set_union(all, s);
        }
        CHECK(total == all.size());  // pairwise disjoint
        CHECK(all == LabelSet{kL1, kL2, kL3});
    }
}

TEST_CASE("geometric subspace discovery uses sensor coverage") {
    std::vector<LabelSet> spaces{{kL1}, {kL2}};
    auto position_of = [&](const Label& l) {
        return l == kL1 ? Eigen::Vector2d(0.0, 0.0) : Eigen::Vector2d(10.0, 0.0);
    };
    std::vector<Eigen::Vector2d> sensors{{0.0, 0.0}, {10.0, 0.0}};
    std::vector<double> radius{6.0, 6.0};
    auto part = discover_subspaces_geometric(spaces, position_of, sensors, radius);
    CHECK(part.membership[part.subspace_of(kL1)] == std::vector<int>{0});
    CHECK(part.membership[part.subspace_of(kL2)] == std::vector<int>{1});
}

TEST_CASE("decomposition sums hypothesis mass over supersets") {
    auto d = agent2_table();
    SubspacePartition part;
    part.subspaces = {{kL1}, {kL3}};
    part.membership = {{0}, {0}};
    auto subs = decompose(d, part, GmReduceParams::none());
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].jep_of({kL1}) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(subs[0].jep_of({}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(subs[1].jep_of({kL3}) == doctest::Approx(0.9).epsilon(1e-15));
    for (const auto& s : subs) CHECK(s.jep_sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-subspace decomposition returns the original density") {
    auto d = agent2_table();
    SubspacePartition part;
    part.subspaces = {{kL1, kL3}};
    part.membership = {{0}};
    auto subs = decompose(d, part, GmReduceParams::none());
    REQUIRE(subs.size() == 1);
    for (const auto& h : d.hypotheses)
        CHECK(subs[0].jep_of(h.labels) == doctest::Approx(h.jep).epsilon(1e-15));
}

TEST_CASE("LMB decomposition into singletons reconstructs exactly") {
    LmbDensity<double> d;
    d.add_track(track(kL1, 0.7, 0.0));
    d.add_track(track(kL2, 0.3, 5.0));
    auto part = discover_subspaces({d.label_space},
                                   SubspaceGranularity::SingletonPerLabel);
    auto subs = decompose(d, part);
    REQUIRE(subs.size() == 2);

    // product of sub-densities gives back the original jep on every subset
    for (const auto& subset : enumerate_subsets(d.label_space)) {
        double product = 1.0;
        for (std::size_t m = 0; m < part.subspaces.size(); ++m) {
            LabelSet trace = set_intersection(subset, part.subspaces[m]);
            product *= lmb_jep(subs[m], trace);
        }
        CHECK(product == doctest::Approx(lmb_jep(d, subset)).epsilon(1e-12));
    }
}

TEST_CASE("decomposition of a subspace-independent table is exact on every jep") {
    // build a product of independent sub-densities over {l1} and {l2, l3}
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 20; ++trial) {
        const double ra = u(rng);
        MdglmbDensity<double> left;
        left.label_space = {kL1};
        left.hypotheses.push_back({{}, 1.0 - ra, {}});
        left.hypotheses.push_back({{kL1}, ra, {{kL1, gaussian1d(0.0, 1.0)}}});

        double w0 = u(rng), w1 = u(rng), w2 = u(rng), w3 = u(rng);
        const double norm = w0 + w1 + w2 + w3;
        MdglmbDensity<double> right;
        right.label_space = {kL2, kL3};
        right.hypotheses.push_back({{}, w0 / norm, {}});
        right.hypotheses.push_back({{kL2}, w1 / norm, {{kL2, gaussian1d(2.0, 1.0)}}});
        right.hypotheses.push_back({{kL3}, w2 / norm, {{kL3, gaussian1d(3.0, 1.0)}}});
        right.hypotheses.push_back(
            {{kL2, kL3}, w3 / norm,
             {{kL2, gaussian1d(2.0, 1.0)}, {kL3, gaussian1d(3.0, 1.0)}}});

        // assemble the product density
        MdglmbDensity<double> product;
        product.label_space = {kL1, kL2, kL3};
        for (const auto& hl : left.hypotheses)
            for (const auto& hr : right.hypotheses) {
                Hypothesis<double> h;
                h.labels = set_union(hl.labels, hr.labels);
                h.jep = hl.jep * hr.jep;
                h.pdfs = hl.pdfs;
                h.pdfs.insert(hr.pdfs.begin(), hr.pdfs.end());
                product.hypotheses.push_back(std::move(h));
            }

        SubspacePartition part;
        part.subspaces = {{kL1}, {kL2, kL3}};
        part.membership = {{0}, {0}};
        auto subs = decompose(product, part, GmReduceParams::none());
        for (const auto& h : left.hypotheses)
            CHECK(subs[0].jep_of(h.labels) == doctest::Approx(h.jep).epsilon(1e-12));
        for (const auto& h : right.hypotheses)
            CHECK(subs[1].jep_of(h.labels) == doctest::Approx(h.jep).epsilon(1e-12));
    }
}

TEST_CASE("subspace fusion keeps exclusive-coverage tracks alive") {
    // two agents, shared l1 plus one exclusive track each
    LmbDensity<double> d1, d2;
    d1.add_track(track(kL1, 0.9, 0.0));
    d1.add_track(track(kL2, 0.9, 5.0));
    d2.add_track(track(kL1, 0.9, 0.0));
    d2.add_track(track(kL3, 0.9, -5.0));

    auto fused = mil_fuse_lmb_fov({d1, d2}, FusionWeights<double>::uniform(2),
                                  GmReduceParams::none());
    CHECK(fused.existence_of(kL1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(fused.existence_of(kL2) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(fused.existence_of(kL3) == doctest::Approx(0.9).epsilon(1e-12));

    // joint existence of all three labels is the product, strictly positive
    const double joint = lmb_jep(fused, {kL1, kL2, kL3});
    CHECK(joint == doctest::Approx(0.9 * 0.9 * 0.9).epsilon(1e-12));
    CHECK(joint > 0.0);
}

TEST_CASE("all agents sharing one subspace reduces to plain fusion") {
    LmbDensity<double> d1, d2;
    d1.add_track(track(kL1, 0.8, 0.0));
    d2.add_track(track(kL1, 0.4, 1.0));
    auto direct = mil_fuse_lmb({d1, d2}, FusionWeights<double>::uniform(2),
                               GmReduceParams::none());
    auto via_fov = mil_fuse_lmb_fov({d1, d2}, FusionWeights<double>::uniform(2),
                                    GmReduceParams::none());
    CHECK(via_fov.existence_of(kL1) ==
          doctest::Approx(direct.existence_of(kL1)).epsilon(1e-14));
}

TEST_CASE("geometric-mean fusion factorizes over independent subspaces") {
    // discrete cross-check on a grid: fusing per subspace then taking the
    // product equals fusing the assembled product tables
    const auto grid = StateGrid<double>::uniform_1d(-8.0, 8.0, 16);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.1, 0.9);

    auto bernoulli_table = [&](const Label& l, double r, double mean) {
        MdglmbDensity<double> d;
        d.label_space = {l};
        d.hypotheses.push_back({{}, 1.0 - r, {}});
        d.hypotheses.push_back({{l}, r, {{l, gaussian1d(mean, 1.0)}}});
        return d;
    };

    for (int trial = 0; trial < 10; ++trial) {
        // per-agent independent sub-densities on subspaces {l1}, {l2}
        std::vector<std::vector<MdglmbDensity<double>>> per_agent(2);
        for (int agent = 0; agent < 2; ++agent) {
            per_agent[agent].push_back(bernoulli_table(kL1, u(rng), u(rng)));
            per_agent[agent].push_back(bernoulli_table(kL2, u(rng), -u(rng)));
        }
        auto product_of = [&](const std::vector<MdglmbDensity<double>>& subs) {
            MdglmbDensity<double> out;
            out.label_space = set_union(subs[0].label_space, subs[1].label_space);
            for (const auto& ha : subs[0].hypotheses)
                for (const auto& hb : subs[1].hypotheses) {
                    Hypothesis<double> h;
                    h.labels = set_union(ha.labels, hb.labels);
                    h.jep = ha.jep * hb.jep;
                    h.pdfs = ha.pdfs;
                    h.pdfs.insert(hb.pdfs.begin(), hb.pdfs.end());
                    out.hypotheses.push_back(std::move(h));
                }
            return out;
        };

        const auto w = FusionWeights<double>::uniform(2);
        // route 1: fuse per subspace, then assemble the product
        std::vector<MdglmbDensity<double>> fused_subs;
        for (int m = 0; m < 2; ++m)
            fused_subs.push_back(gci_fuse_mdglmb(
                {per_agent[0][m], per_agent[1][m]}, w, GmReduceParams::none(), 0.0, 1 << 20));
        auto route1 = product_of(fused_subs);
        // route 2: assemble products first, then fuse
        auto route2 =
            gci_fuse_mdglmb({product_of(per_agent[0]), product_of(per_agent[1])}, w,
                            GmReduceParams::none(), 0.0, 1 << 20);

        auto disc1 = discretize(route1, grid);
        auto disc2 = discretize(route2, grid);
        for (const auto& [set, e1] : disc1.hypotheses) {
            auto it = disc2.hypotheses.find(set);
            REQUIRE(it != disc2.hypotheses.end());
            CHECK(std::abs(e1.jep - it->second.jep) < 1e-9);
            for (const auto& [l, pmf] : e1.pmfs)
                CHECK((pmf - it->second.pmfs.at(l)).template lpNorm<Eigen::Infinity>() <
                      1e-9);
        }
    }
}

TEST_CASE("decomposed jep is a stationary point of the reconstruction loss") {
    // 2 subspaces x 2 labels on a discrete grid: perturbing any sub-jep by
    // +-1% cannot reduce the KLD from the original to the reconstruction
    const auto grid = StateGrid<double>::uniform_1d(-6.0, 6.0, 12);
    MdglmbDensity<double> original;
    original.label_space = {kL1, kL2};
    original.hypotheses.push_back({{}, 0.15, {}});
    original.hypotheses.push_back({{kL1}, 0.2, {{kL1, gaussian1d(-1.0, 1.0)}}});
    original.hypotheses.push_back({{kL2}, 0.3, {{kL2, gaussian1d(2.0, 1.5)}}});
    original.hypotheses.push_back(
        {{kL1, kL2}, 0.35,
         {{kL1, gaussian1d(-1.2, 1.0)}, {kL2, gaussian1d(2.2, 1.5)}}});

    SubspacePartition part;
    part.subspaces = {{kL1}, {kL2}};
    part.membership = {{0}, {0}};
    auto subs = decompose(original, part, GmReduceParams::none());

    const auto disc_original = discretize(original, grid);
    auto reconstruction_kld = [&](const std::vector<MdglmbDensity<double>>& pieces) {
        MdglmbDensity<double> product;
        product.label_space = original.label_space;
        for (const auto& ha : pieces[0].hypotheses)
            for (const auto& hb : pieces[1].hypotheses) {
                Hypothesis<double> h;
                h.labels = set_union(ha.labels, hb.labels);
                h.jep = ha.jep * hb.jep;
                h.pdfs = ha.pdfs;
                h.pdfs.insert(hb.pdfs.begin(), hb.pdfs.end());
                product.hypotheses.push_back(std::move(h));
            }
        return kld_discrete(disc_original, discretize(product, grid));
    };

    const double base = reconstruction_kld(subs);
    REQUIRE(std::isfinite(base));
    for (std::size_t m = 0; m < 2; ++m) {
        for (std::size_t h = 0; h < subs[m].hypotheses.size(); ++h) {
            for (double factor : {0.99, 1.01}) {
                auto perturbed = subs;
                perturbed[m].hypotheses[h].jep *= factor;
                double mass = perturbed[m].jep_sum();
                for (auto& hh : perturbed[m].hypotheses) hh.jep /= mass;
                CHECK(reconstruction_kld(perturbed) >= base - 1e-12);
            }
        }
    }
}
