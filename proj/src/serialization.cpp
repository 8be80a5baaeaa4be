#include "lrfs/serialization.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace lrfs {

using nlohmann::json;

json to_json(const Label& l) { return json::array({l.birth_time, l.birth_index, l.agent_id}); }

Label label_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("label must be [birth_time, birth_index, agent_id]");
    return Label{j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

json to_json(const GaussianMixture<double>& mix) {
    json out = json::array();
    for (const auto& c : mix.components) {
        json comp;
        comp["w"] = c.weight;
        comp["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
        json cov = json::array();
        for (Eigen::Index r = 0; r < c.cov.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index cc = 0; cc < c.cov.cols(); ++cc) row.push_back(c.cov(r, cc));
            cov.push_back(std::move(row));
        }
        comp["cov"] = std::move(cov);
        out.push_back(std::move(comp));
    }
    return out;
}

GaussianMixture<double> mixture_from_json(const json& j) {
    GaussianMixture<double> mix;
    for (const auto& comp : j) {
        const auto mean_vals = comp.at("mean").get<std::vector<double>>();
        Eigen::VectorXd mean =
            Eigen::Map<const Eigen::VectorXd>(mean_vals.data(), mean_vals.size());
        const auto& cov_json = comp.at("cov");
        Eigen::MatrixXd cov(cov_json.size(), cov_json.size());
        for (std::size_t r = 0; r < cov_json.size(); ++r)
            for (std::size_t c = 0; c < cov_json[r].size(); ++c)
                cov(r, c) = cov_json[r][c].get<double>();
        mix.components.emplace_back(comp.at("w").get<double>(), std::move(mean),
                                    std::move(cov));
    }
    return mix;
}

json to_json(const LmbDensity<double>& density) {
    json out;
    out["type"] = "lmb";
    json space = json::array();
    for (const Label& l : density.label_space) space.push_back(to_json(l));
    out["label_space"] = std::move(space);
    json tracks = json::array();
    for (const auto& t : density.tracks) {
        json jt;
        jt["label"] = to_json(t.label);
        if (t.label.canonical_id >= 0) jt["canonical_id"] = t.label.canonical_id;
        jt["r"] = t.existence;
        jt["pdf"] = to_json(t.pdf);
        tracks.push_back(std::move(jt));
    }
    out["tracks"] = std::move(tracks);
    return out;
}

LmbDensity<double> lmb_from_json(const json& j) {
    LmbDensity<double> d;
    if (j.contains("label_space"))
        for (const auto& l : j.at("label_space"))
            d.label_space = set_union(d.label_space, {label_from_json(l)});
    for (const auto& jt : j.at("tracks")) {
        BernoulliTrack<double> t;
        t.label = label_from_json(jt.at("label"));
        if (jt.contains("canonical_id")) t.label.canonical_id = jt["canonical_id"].get<int>();
        t.existence = jt.at("r").get<double>();
        t.pdf = mixture_from_json(jt.at("pdf"));
        d.add_track(std::move(t));
    }
    return d;
}

json to_json(const MdglmbDensity<double>& density) {
    MdglmbDensity<double> sorted = density;
    sorted.sort_hypotheses();
    json out;
    out["type"] = "mdglmb";
    json space = json::array();
    for (const Label& l : sorted.label_space) space.push_back(to_json(l));
    out["label_space"] = std::move(space);
    json hyps = json::array();
    for (const auto& h : sorted.hypotheses) {
        json jh;
        json labels = json::array();
        json pdfs = json::array();
        for (const Label& l : h.labels) {
            labels.push_back(to_json(l));
            auto it = h.pdfs.find(l);
            pdfs.push_back(it == h.pdfs.end() ? json::array() : to_json(it->second));
        }
        jh["labels"] = std::move(labels);
        jh["jep"] = h.jep;
        jh["pdfs"] = std::move(pdfs);
        hyps.push_back(std::move(jh));
    }
    out["hypotheses"] = std::move(hyps);
    return out;
}

MdglmbDensity<double> mdglmb_from_json(const json& j) {
    MdglmbDensity<double> d;
    if (j.contains("label_space"))
        for (const auto& l : j.at("label_space"))
            d.label_space = set_union(d.label_space, {label_from_json(l)});
    for (const auto& jh : j.at("hypotheses")) {
        Hypothesis<double> h;
        h.jep = jh.at("jep").get<double>();
        const auto& labels = jh.at("labels");
        const auto& pdfs = jh.at("pdfs");
        for (std::size_t i = 0; i < labels.size(); ++i) {
            Label l = label_from_json(labels[i]);
            h.labels.push_back(l);
            h.pdfs[l] = mixture_from_json(pdfs[i]);
        }
        h.labels = make_label_set(std::move(h.labels));
        d.hypotheses.push_back(std::move(h));
    }
    d.sort_hypotheses();
    return d;
}

json to_json(const SubspacePartition& partition) {
    json out;
    json subs = json::array();
    for (const auto& s : partition.subspaces) {
        json labels = json::array();
        for (const Label& l : s) labels.push_back(to_json(l));
        subs.push_back(std::move(labels));
    }
    out["subspaces"] = std::move(subs);
    out["membership"] = partition.membership;
    return out;
}

SubspacePartition partition_from_json(const json& j) {
    SubspacePartition p;
    for (const auto& s : j.at("subspaces")) {
        LabelSet labels;
        for (const auto& l : s) labels.push_back(label_from_json(l));
        p.subspaces.push_back(make_label_set(std::move(labels)));
    }
    p.membership = j.at("membership").get<std::vector<std::vector<int>>>();
    return p;
}

json to_json(const LabelMap& map) {
    json out = json::object();
    for (const auto& [id, sources] : map.entries) {
        json list = json::array();
        for (const auto& [agent, label] : sources)
            list.push_back(json::array({agent, to_json(label)}));
        out[std::to_string(id)] = std::move(list);
    }
    return out;
}

DensityFile density_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open density file: " + path);
    json j = json::parse(in);
    DensityFile out;
    const std::string type = j.at("type").get<std::string>();
    if (type == "lmb") {
        out.is_lmb = true;
        out.lmb = lmb_from_json(j);
    } else if (type == "mdglmb") {
        out.is_lmb = false;
        out.mdglmb = mdglmb_from_json(j);
    } else {
        throw std::invalid_argument("unknown density type: " + type);
    }
    return out;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace lrfs
