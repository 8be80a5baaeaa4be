#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "lrfs/fov.hpp"
#include "lrfs/fusion.hpp"
#include "lrfs/label_match.hpp"
#include "lrfs/serialization.hpp"
#include "lrfs/sim.hpp"

namespace {

int cmd_simulate(const std::string& config_path, int trials, long seed,
                 const std::string& out_dir, const std::string& fusion,
                 const std::string& family, bool plots) {
    lrfs::ScenarioConfig config = lrfs::config_from_file(config_path);
    if (trials > 0) config.trials = trials;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!fusion.empty()) {
        if (fusion == "mil")
            config.fusion_rule = lrfs::FusionRule::Mil;
        else if (fusion == "gci")
            config.fusion_rule = lrfs::FusionRule::Gci;
        else if (fusion == "none")
            config.fusion_rule = lrfs::FusionRule::None;
        else
            throw lrfs::ConfigError("unknown fusion rule: " + fusion);
    }
    if (!family.empty()) {
        if (family == "lmb")
            config.family = lrfs::DensityFamily::Lmb;
        else if (family == "mdglmb")
            config.family = lrfs::DensityFamily::Mdglmb;
        else
            throw lrfs::ConfigError("unknown density family: " + family);
    }
    config.validate();

    lrfs::RunResult result = lrfs::monte_carlo(config);
    lrfs::write_outputs(result, config, out_dir, plots);

    double mean = 0.0;
    for (double v : result.mean_ospa) mean += v;
    mean /= std::max<std::size_t>(result.mean_ospa.size(), 1);
    std::cout << "simulated " << config.trials << " trial(s), " << config.duration
              << " steps, " << config.sensors.size() << " agents; time-averaged OSPA "
              << mean << " -> " << out_dir << "\n";
    return 0;
}

int cmd_fuse(const std::string& path_a, const std::string& path_b, const std::string& rule,
             double weight_a, const std::string& out_path) {
    const auto file_a = lrfs::density_from_file(path_a);
    const auto file_b = lrfs::density_from_file(path_b);
    if (file_a.is_lmb != file_b.is_lmb)
        throw lrfs::ConfigError("cannot fuse densities of different families");
    lrfs::FusionWeights<double> w;
    w.w = {weight_a, 1.0 - weight_a};

    nlohmann::json out;
    if (file_a.is_lmb) {
        std::vector<lrfs::LmbDensity<double>> locals{file_a.lmb, file_b.lmb};
        lrfs::LmbDensity<double> fused;
        if (rule == "mil")
            fused = lrfs::mil_fuse_lmb_fov(locals, w);
        else if (rule == "gci")
            fused = lrfs::gci_fuse_lmb(locals, w);
        else
            throw lrfs::ConfigError("unknown fusion rule: " + rule);
        out = lrfs::to_json(fused);
    } else {
        std::vector<lrfs::MdglmbDensity<double>> locals{file_a.mdglmb, file_b.mdglmb};
        lrfs::MdglmbDensity<double> fused;
        if (rule == "mil")
            fused = lrfs::mil_fuse_mdglmb_fov(locals, w);
        else if (rule == "gci")
            fused = lrfs::gci_fuse_mdglmb(locals, w);
        else
            throw lrfs::ConfigError("unknown fusion rule: " + rule);
        out = lrfs::to_json(fused);
    }
    out["fusion_weights"] = {weight_a, 1.0 - weight_a};
    lrfs::write_json_file(out_path, out);
    std::cout << "fused " << path_a << " and " << path_b << " (" << rule << ") -> "
              << out_path << "\n";
    return 0;
}

int cmd_match(const std::string& path_a, const std::string& path_b, const std::string& cost,
              double threshold, const std::string& out_path) {
    auto as_lmb = [](const lrfs::DensityFile& f) {
        return f.is_lmb ? f.lmb : lrfs::mdglmb_to_lmb(f.mdglmb);
    };
    const auto a = as_lmb(lrfs::density_from_file(path_a));
    const auto b = as_lmb(lrfs::density_from_file(path_b));

    lrfs::DivergenceKind kind;
    if (cost == "jsd")
        kind = lrfs::DivergenceKind::JsdSigmaPoint;
    else if (cost == "csd")
        kind = lrfs::DivergenceKind::CsdAnalytic;
    else if (cost == "kld")
        kind = lrfs::DivergenceKind::KldSigmaPoint;
    else
        throw lrfs::ConfigError("unknown matching cost: " + cost);

    auto [matched, label_map] = lrfs::canonicalize<double>({a, b}, 0, kind, threshold);
    nlohmann::json out;
    out["label_map"] = lrfs::to_json(label_map);
    out["densities"] = nlohmann::json::array({lrfs::to_json(matched[0]),
                                              lrfs::to_json(matched[1])});
    if (out_path.empty())
        std::cout << out.dump(2) << "\n";
    else {
        lrfs::write_json_file(out_path, out);
        std::cout << "matched " << path_a << " and " << path_b << " -> " << out_path
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"labeled RFS density fusion and distributed tracking simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", fusion, family;
    int trials = 0;
    long seed = -1;
    bool plots = false;
    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo tracking scenario");
    sim->add_option("config", config_path, "scenario config (JSON)")->required();
    sim->add_option("--trials", trials, "override Monte Carlo trial count");
    sim->add_option("--seed", seed, "override RNG seed");
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--fusion", fusion, "fusion rule: mil|gci|none");
    sim->add_option("--family", family, "density family: lmb|mdglmb");
    sim->add_flag("--plots", plots, "also write SVG plots");

    std::string fuse_a, fuse_b, fuse_rule = "mil", fuse_out = "fused.json";
    double fuse_weight = 0.5;
    auto* fuse = app.add_subcommand("fuse", "fuse two density files");
    fuse->add_option("a", fuse_a, "first density (JSON)")->required();
    fuse->add_option("b", fuse_b, "second density (JSON)")->required();
    fuse->add_option("--rule", fuse_rule, "mil|gci");
    fuse->add_option("--weight", fuse_weight, "weight of the first density")
        ->check(CLI::Range(0.0, 1.0));
    fuse->add_option("--out", fuse_out, "output file");

    std::string match_a, match_b, match_cost = "jsd", match_out;
    double match_td = 50.0;
    auto* match = app.add_subcommand("match", "match labels between two density files");
    match->add_option("a", match_a, "first density (JSON)")->required();
    match->add_option("b", match_b, "second density (JSON)")->required();
    match->add_option("--cost", match_cost, "jsd|csd|kld");
    match->add_option("--td", match_td, "unassignment threshold");
    match->add_option("--out", match_out, "output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, trials, seed, out_dir, fusion, family, plots);
        if (fuse->parsed())
            return cmd_fuse(fuse_a, fuse_b, fuse_rule, fuse_weight, fuse_out);
        if (match->parsed())
            return cmd_match(match_a, match_b, match_cost, match_td, match_out);
    } catch (const lrfs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
